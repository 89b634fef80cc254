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

#include <cstdint>
#include <filesystem>
#include <vector>

#include "topdown/predictions.hpp"

namespace topdown::viz {

struct Image8 {
  int size = 0;
  std::vector<std::uint8_t> rgb;  // row-major, 3 bytes per pixel
};

struct VizOptions {
  int size_px = 400;
  double extent_m = 60.0;
  /// Trajectories with weight at or below this are not drawn.
  double min_weight = 0.05;
};

inline constexpr raster::Rgb kGroundTruth{1.0f, 0.41f, 0.71f};
inline constexpr raster::Rgb kTopTrajectory{0.0f, 1.0f, 1.0f};
inline constexpr raster::Rgb kAlternate{0.0f, 1.0f, 0.0f};

/// Closed 1-sigma ellipse of a bivariate Gaussian, `n` points, offset by `origin`.
std::vector<Vec2> ellipse_points(const dist::BivariateGaussian& p, Vec2 origin, int n = 48);

/// Road underlay and boxes at the prediction instant, ground truth in pink, the
/// top trajectory in cyan with 1-sigma ellipses, alternates in green.
Image8 render(const Scene& scene, const predictions::Record* pred, const VizOptions& opts = {});

/// 8-bit RGB PNG, fixed compression settings and no timestamp chunk.
void write_png(const std::filesystem::path& path, const Image8& image);

}  // namespace topdown::viz
