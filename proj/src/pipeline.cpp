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

#include "topdown/pipeline.hpp"

#include <exception>

#include "topdown/error.hpp"

namespace topdown::pipeline {

raster::GridSpec input_spec(const Scene& scene, const GridConfig& cfg) {
  return raster::centered_on_target(scene, cfg.input_size, cfg.input_extent);
}

raster::GridSpec output_spec(const GridConfig& cfg) { return {cfg.output_size, cfg.output_extent, {}}; }

bool future_in_bounds(const Scene& scene, const raster::GridSpec& out_spec) {
  for (const Vec2& d : scene.future) {
    if (!dist::displacement_cell(d, out_spec)) return false;
  }
  return true;
}

std::vector<Scene> filter_in_bounds(std::span<const Scene> scenes, const raster::GridSpec& out_spec) {
  std::vector<Scene> out;
  for (const auto& s : scenes) {
    if (future_in_bounds(s, out_spec)) out.push_back(s);
  }
  return out;
}

nn::Target make_target(const Scene& scene, const raster::GridSpec& out_spec) {
  nn::Target t;
  t.displacements = scene.future;
  for (int i = 0; i < kHorizon; ++i) {
    const auto cell = dist::displacement_cell(scene.future[i], out_spec);
    if (!cell) throw Error("eval", "future displacement at step " + std::to_string(i) + " is outside the output grid");
    t.cells.push_back(cell->row * out_spec.size_px + cell->col);
  }
  return t;
}

std::vector<nn::Example> make_examples(std::span<const Scene> scenes, const GridConfig& cfg,
                                       const raster::FeatureScaling& scaling, const raster::FeatureGroups& groups) {
  std::vector<nn::Example> out(scenes.size());
  std::vector<std::exception_ptr> errors(scenes.size());
  const raster::GridSpec out_spec = output_spec(cfg);
  const long long n = static_cast<long long>(scenes.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (long long i = 0; i < n; ++i) {
    try {
      const Scene& s = scenes[i];
      out[i].input = nn::to_model_input(raster::build_input(s, input_spec(s, cfg), scaling, groups));
      out[i].target = make_target(s, out_spec);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

decode::DecodeConfig decode_config_for(const Scene& scene, const raster::GridSpec& out_spec,
                                       decode::DecodeConfig base) {
  base.velocity_hat = decode::velocity_to_cells(scene.target().velocity * kFutureStep, out_spec);
  return base;
}

Ranked from_decoded(const decode::DiverseSet& set, const raster::GridSpec& out_spec) {
  Ranked r;
  for (const auto& t : set.trajectories) {
    const auto pts = decode::trajectory_to_world(t, out_spec);
    if (pts.size() != static_cast<std::size_t>(kHorizon)) throw Error("eval", "decoded trajectory has the wrong length");
    Trajectory traj;
    std::copy(pts.begin(), pts.end(), traj.begin());
    r.trajectories.push_back(traj);
    r.weights.push_back(t.weight);
  }
  return r;
}

Ranked rank_prediction(const nn::Prediction& pred, const Scene& scene, const raster::GridSpec& out_spec,
                       const decode::DecodeConfig& base) {
  Ranked r;
  auto means = [](const dist::GaussianTrajectory& g) {
    Trajectory t;
    for (int i = 0; i < kHorizon; ++i) t[i] = g[i].mu;
    return t;
  };
  if (const auto* g = std::get_if<dist::GaussianTrajectory>(&pred)) {
    r.trajectories.push_back(means(*g));
    r.weights.push_back(1.0);
  } else if (const auto* mix = std::get_if<dist::MixtureTrajectories>(&pred)) {
    for (int i : mix->ranked()) {
      r.trajectories.push_back(means(mix->components[i]));
      r.weights.push_back(mix->weights[i]);
    }
  } else {
    const auto& grids = std::get<dist::OccupancyGrids>(pred);
    r = from_decoded(decode::extract_diverse(grids, decode_config_for(scene, out_spec, base)), out_spec);
  }
  return r;
}

}  // namespace topdown::pipeline
