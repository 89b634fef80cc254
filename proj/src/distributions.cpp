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

#include "topdown/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "topdown/error.hpp"

namespace topdown::dist {
namespace {

[[noreturn]] void fail(const std::string& msg) { throw Error("distributions", msg); }

constexpr double kLog2Pi = 1.8378770664093454836;

}  // namespace

std::vector<int> MixtureTrajectories::ranked() const {
  std::vector<int> idx(weights.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return weights[a] > weights[b]; });
  return idx;
}

void validate(const BivariateGaussian& p) {
  if (!finite(p.mu) || !finite(p.log_sigma)) fail("Gaussian parameters must be finite");
  if (!(std::abs(p.rho) <= kRhoLimit)) fail("|rho| must not exceed 1 - 1e-6");
}

void validate(const MixtureTrajectories& m) {
  if (m.weights.empty()) fail("mixture needs at least one component");
  if (m.weights.size() != m.components.size()) fail("mixture weight/component count mismatch");
  double sum = 0.0;
  for (double w : m.weights) {
    if (!(w >= 0.0)) fail("mixture weights must be non-negative");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-6) fail("mixture weights must sum to 1");
  for (const auto& c : m.components) {
    for (const auto& p : c) validate(p);
  }
}

void validate(const OccupancyGrids& g) {
  if (g.size <= 0 || g.steps <= 0) fail("occupancy grid dimensions must be positive");
  if (g.probs.size() != g.cells() * g.steps) fail("occupancy grid storage size mismatch");
  for (int t = 0; t < g.steps; ++t) {
    double sum = 0.0;
    for (double p : g.grid(t)) {
      if (!(p >= 0.0)) fail("occupancy probabilities must be non-negative");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-6) fail("occupancy grid " + std::to_string(t) + " does not sum to 1");
  }
}

double rho_from_raw(double raw) { return std::clamp(std::tanh(raw), -kRhoLimit, kRhoLimit); }

double gaussian_nll(const BivariateGaussian& p, Vec2 y) {
  const double sx = std::exp(p.log_sigma.x);
  const double sy = std::exp(p.log_sigma.y);
  const double zx = (y.x - p.mu.x) / sx;
  const double zy = (y.y - p.mu.y) / sy;
  const double one_minus = 1.0 - p.rho * p.rho;
  const double q = zx * zx + zy * zy - 2.0 * p.rho * zx * zy;
  return kLog2Pi + p.log_sigma.x + p.log_sigma.y + 0.5 * std::log(one_minus) + 0.5 * q / one_minus;
}

double trajectory_nll(std::span<const BivariateGaussian> traj, std::span<const Vec2> y) {
  if (traj.size() != y.size()) {
    fail("trajectory has " + std::to_string(traj.size()) + " steps but target has " + std::to_string(y.size()));
  }
  double sum = 0.0;
  for (std::size_t t = 0; t < traj.size(); ++t) sum += gaussian_nll(traj[t], y[t]);
  return sum;
}

double mixture_nll(const MixtureTrajectories& mix, std::span<const Vec2> y) {
  std::vector<double> terms;
  terms.reserve(mix.weights.size());
  for (std::size_t i = 0; i < mix.weights.size(); ++i) {
    if (mix.weights[i] <= 0.0) continue;
    terms.push_back(std::log(mix.weights[i]) - trajectory_nll(mix.components[i], y));
  }
  if (terms.empty()) return INFINITY;
  const double top = *std::max_element(terms.begin(), terms.end());
  if (!std::isfinite(top)) return -top;
  double acc = 0.0;
  for (double v : terms) acc += std::exp(v - top);
  return -(top + std::log(acc));
}

bool is_unimodal_pair(double y1, double y2, double sigma) {
  if (!(sigma > 0.0)) fail("sigma must be positive");
  return std::abs(y1 - y2) <= 2.0 * sigma;
}

int collapsed_pairs(const MixtureTrajectories& mix) {
  int count = 0;
  for (int i = 0; i < mix.k(); ++i) {
    for (int j = i + 1; j < mix.k(); ++j) {
      const auto& a = mix.components[i].back();
      const auto& b = mix.components[j].back();
      const double sx = 0.5 * (std::exp(a.log_sigma.x) + std::exp(b.log_sigma.x));
      const double sy = 0.5 * (std::exp(a.log_sigma.y) + std::exp(b.log_sigma.y));
      if (is_unimodal_pair(a.mu.x, b.mu.x, sx) && is_unimodal_pair(a.mu.y, b.mu.y, sy)) ++count;
    }
  }
  return count;
}

std::vector<double> gumbel_softmax_sample(std::span<const double> logits, double tau,
                                          std::span<const double> noise) {
  if (!(tau > 0.0)) fail("Gumbel-softmax temperature must be positive");
  if (logits.size() != noise.size() || logits.empty()) fail("logits and noise must have equal, non-zero length");
  std::vector<double> z(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (!(noise[i] > 0.0 && noise[i] < 1.0)) fail("Gumbel noise must lie in (0, 1)");
    z[i] = (logits[i] - std::log(-std::log(noise[i]))) / tau;
  }
  const double top = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (double& v : z) {
    v = std::exp(v - top);
    sum += v;
  }
  for (double& v : z) v /= sum;
  return z;
}

std::vector<double> gumbel_softmax_backward(std::span<const double> y, double tau,
                                            std::span<const double> grad_y) {
  double inner = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) inner += grad_y[i] * y[i];
  std::vector<double> g(y.size());
  for (std::size_t j = 0; j < y.size(); ++j) g[j] = y[j] * (grad_y[j] - inner) / tau;
  return g;
}

std::optional<raster::Pixel> displacement_cell(Vec2 displacement, const raster::GridSpec& spec) {
  return raster::world_to_pixel(spec.center + displacement, spec);
}

double grid_cross_entropy(const OccupancyGrids& grids, std::span<const Vec2> y,
                          const raster::GridSpec& out_spec) {
  if (static_cast<int>(y.size()) != grids.steps) fail("grid steps and target length differ");
  if (out_spec.size_px != grids.size) fail("output grid spec does not match the grid size");
  double loss = 0.0;
  for (int t = 0; t < grids.steps; ++t) {
    const auto cell = displacement_cell(y[t], out_spec);
    if (!cell) fail("target displacement at timestep " + std::to_string(t) + " lies outside the output grid");
    loss -= std::log(grids.at(t, cell->row, cell->col));
  }
  return loss;
}

}  // namespace topdown::dist
