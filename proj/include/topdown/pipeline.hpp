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

#include <span>
#include <vector>

#include "topdown/decoder.hpp"
#include "topdown/nn/model.hpp"
#include "topdown/nn/train.hpp"
#include "topdown/raster.hpp"

namespace topdown::pipeline {

/// Input and output grid geometry shared by training, prediction and decoding.
struct GridConfig {
  int input_size = 128;
  double input_extent = 50.0;
  int output_size = 64;
  double output_extent = 50.0;
};

/// Input grid centred on the scene's target at the prediction instant.
raster::GridSpec input_spec(const Scene& scene, const GridConfig& cfg);
/// Output grid in displacement coordinates (centre at the origin).
raster::GridSpec output_spec(const GridConfig& cfg);

/// True when every future displacement maps inside the output grid.
bool future_in_bounds(const Scene& scene, const raster::GridSpec& out_spec);
std::vector<Scene> filter_in_bounds(std::span<const Scene> scenes, const raster::GridSpec& out_spec);

nn::Target make_target(const Scene& scene, const raster::GridSpec& out_spec);

/// Rasterises each scene (in parallel) and attaches its target.
std::vector<nn::Example> make_examples(std::span<const Scene> scenes, const GridConfig& cfg,
                                       const raster::FeatureScaling& scaling, const raster::FeatureGroups& groups);

/// Point trajectories ranked best first, with their weights.
struct Ranked {
  std::vector<Trajectory> trajectories;
  std::vector<double> weights;
};

/// Decoder settings for a scene: the velocity estimate comes from the target's
/// observed velocity at the prediction instant.
decode::DecodeConfig decode_config_for(const Scene& scene, const raster::GridSpec& out_spec,
                                       decode::DecodeConfig base);

/// Gaussian: the mean sequence. Mixture: component means by descending weight.
/// Grids: extract_diverse trajectories in weight order.
Ranked rank_prediction(const nn::Prediction& pred, const Scene& scene, const raster::GridSpec& out_spec,
                       const decode::DecodeConfig& base);

Ranked from_decoded(const decode::DiverseSet& set, const raster::GridSpec& out_spec);

}  // namespace topdown::pipeline
