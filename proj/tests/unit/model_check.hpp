// Copyright 2026 The Topdown Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Tiny model configs and the end-to-end finite-difference gradient check,
// shared by the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <string>

#include "topdown/nn/model.hpp"
#include "topdown/rng.hpp"

namespace topdown::testing {

inline nn::ModelConfig tiny_model(nn::HeadKind head) {
  nn::ModelConfig c;
  c.input_frames = 3;
  c.input_size = 8;
  c.widths = {2, 2, 2};
  c.latent = 4;
  c.head = head;
  c.mixture_k = 2;
  c.grid_size = 8;
  c.grid_width = 2;
  c.prior_widths = {2, 2};
  return c;
}

inline nn::ModelInput random_input(const nn::ModelConfig& cfg, std::uint64_t seed) {
  Rng rng(seed);
  nn::ModelInput in;
  in.shape = {raster::kNumChannels, cfg.input_frames, cfg.input_size, cfg.input_size};
  in.values.resize(nn::shape_size(in.shape));
  for (auto& v : in.values) v = static_cast<float>(rng.uniform(0.0, 1.0));
  return in;
}

inline nn::Target random_target(const nn::ModelConfig& cfg, std::uint64_t seed) {
  Rng rng(seed);
  nn::Target t;
  for (auto& d : t.displacements) d = {rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0)};
  const int cells = cfg.grid_size * cfg.grid_size;
  for (int i = 0; i < kHorizon; ++i) t.cells.push_back(static_cast<int>(rng.uniform(0.0, 1.0) * cells) % cells);
  return t;
}

struct GradCheck {
  double max_rel_error = 0.0;
  std::string worst;       // parameter entry with the largest error
  std::size_t params = 0;  // parameters checked
  std::size_t live = 0;    // parameters with a non-zero analytic gradient
};

/// Central differences (h = 1e-4) on every parameter of the likelihood loss.
/// Relative error uses max(|fd|, |analytic|, 1e-3) as the scale. Positive
/// biases keep most ReLUs active so gradient reaches every layer.
inline GradCheck model_grad_check(nn::HeadKind head, std::uint64_t seed = 5) {
  const nn::ModelConfig cfg = tiny_model(head);
  nn::Model model(cfg, seed);
  Rng rng(seed + 1);
  for (const auto& p : model.parameters()) {
    const bool bias = p->op.ends_with(".b");
    for (auto& v : p->value) v = bias ? rng.uniform(0.1, 0.5) : rng.uniform(-0.6, 0.6);
  }
  const nn::ModelInput in = random_input(cfg, seed + 2);
  const nn::Target target = random_target(cfg, seed + 3);
  const auto value = [&] { return model.loss(model.forward_raw(in), target, nn::LossKind::Likelihood)->value[0]; };

  model.zero_grad();
  nn::backward(model.loss(model.forward_raw(in), target, nn::LossKind::Likelihood));
  GradCheck out;
  out.params = model.parameter_count();
  const double h = 1e-4;
  for (const auto& p : model.parameters()) {
    for (std::size_t i = 0; i < p->size(); ++i) {
      if (p->grad[i] != 0.0) ++out.live;
      const double orig = p->value[i];
      p->value[i] = orig + h;
      const double up = value();
      p->value[i] = orig - h;
      const double down = value();
      p->value[i] = orig;
      const double fd = (up - down) / (2 * h);
      const double an = p->grad[i];
      const double err = std::abs(fd - an) / std::max({std::abs(fd), std::abs(an), 1e-3});
      if (err > out.max_rel_error) {
        out.max_rel_error = err;
        out.worst = p->op + "[" + std::to_string(i) + "]";
      }
    }
  }
  return out;
}

}  // namespace topdown::testing
