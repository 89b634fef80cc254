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

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "topdown/scene.hpp"

namespace topdown::raster {

/// Square top-down grid centred on `center`. Row 0 is the north edge; the
/// extent is half-open, so a point exactly extent/2 east of centre is outside.
struct GridSpec {
  int size_px = 128;
  double extent_m = 50.0;
  Vec2 center;

  double meters_per_pixel() const { return extent_m / size_px; }
};

/// Throws topdown::Error("rasterizer", ...) for non-positive sizes.
void validate(const GridSpec& spec);

struct Pixel {
  int row = 0;
  int col = 0;
  friend bool operator==(const Pixel&, const Pixel&) = default;
  friend auto operator<=>(const Pixel&, const Pixel&) = default;
};

/// Floor quantisation; empty when the point falls outside the grid.
std::optional<Pixel> world_to_pixel(Vec2 p, const GridSpec& spec);

/// World coordinates of the centre of `px`.
Vec2 pixel_center(Pixel px, const GridSpec& spec);

/// Scale factors dividing entity state before it is written to the grid.
struct FeatureScaling {
  double velocity = 1.0;
  double acceleration = 1.0;
  std::array<double, 3> covariance{1.0, 1.0, 1.0};

  friend bool operator==(const FeatureScaling&, const FeatureScaling&) = default;
};

void validate(const FeatureScaling& s);

/// Per-quantity nearest-rank 99th percentile of magnitudes over every entity
/// in every frame: |velocity|, |acceleration| and each covariance norm.
/// Percentiles below 1e-6 are replaced by 1.0.
FeatureScaling fit_feature_scaling(std::span<const Scene> scenes);

/// Nearest-rank percentile (q in (0, 100]) of the values; sorts a copy.
double nearest_rank_percentile(std::vector<double> values, double q);

/// Channel layout of each frame of a WorldTensor.
inline constexpr int kTargetChannels = 0;    // 7 channels
inline constexpr int kOtherChannels = 7;     // 7 channels
inline constexpr int kDynamicChannels = 14;  // RGB
inline constexpr int kRoadChannels = 17;     // RGB
inline constexpr int kEntityChannels = 7;
inline constexpr int kNumChannels = 20;

using Rgb = std::array<float, 3>;

/// Fixed palettes. Road kinds are drawn in enum order, later kinds on top.
Rgb road_color(RoadKind kind);
Rgb class_color(EntityClass cls);
Rgb permissibility_color(Permissibility p);

/// H x W x 3 image, row-major, channel-last.
struct RgbImage {
  int size = 0;
  std::vector<float> data;

  explicit RgbImage(int n = 0) : size(n), data(static_cast<std::size_t>(n) * n * 3, 0.0f) {}
  float* at(int row, int col) { return &data[(static_cast<std::size_t>(row) * size + col) * 3]; }
  const float* at(int row, int col) const {
    return &data[(static_cast<std::size_t>(row) * size + col) * 3];
  }
  void fill(Pixel px, Rgb c) {
    float* p = at(px.row, px.col);
    p[0] = c[0];
    p[1] = c[1];
    p[2] = c[2];
  }
};

/// Scanline fill: pixels whose centres lie inside the polygon (even-odd
/// rule, half-open on the right and bottom crossing).
std::vector<Pixel> polygon_pixels(std::span<const Vec2> polygon, const GridSpec& spec);

/// 1 px wide Bresenham polyline, clipped to the grid.
std::vector<Pixel> polyline_pixels(std::span<const Vec2> polyline, const GridSpec& spec);

/// Corners of an entity's oriented bounding box, counter-clockwise.
std::array<Vec2, 4> entity_box(const EntityState& e);

struct RoadRenderStats {
  int degenerate_polygons = 0;
};

/// Static road raster R.
RgbImage render_road(std::span<const RoadElement> road, const GridSpec& spec,
                     RoadRenderStats* stats = nullptr);

/// Colours junction connections by permissibility: permitted first, then
/// yield, then prohibited on top.
void render_light_masks(std::span<const RoadElement> road, std::span<const TrafficLightState> lights,
                        const GridSpec& spec, RgbImage& image);

/// Which parts of the dynamic context to draw.
struct DynamicLayers {
  bool lights = true;
  bool target = true;
  bool others = true;
  std::int64_t target_id = 0;
};

/// D for one frame: light masks, then oriented boxes sorted by entity_id.
RgbImage render_dynamic_context(const Frame& frame, std::span<const RoadElement> road,
                                const GridSpec& spec, const DynamicLayers& layers);

/// The 7 scaled state values of an entity at its pixel, zero elsewhere.
/// Returns H x W x 7 channel-last.
std::vector<float> render_entity_channels(const EntityState& e, const GridSpec& spec,
                                          const FeatureScaling& scaling);

/// Scaled state values written into a channel-last buffer with stride
/// `channels`, accumulated (summed) at the entity's pixel.
void accumulate_entity(const EntityState& e, const GridSpec& spec, const FeatureScaling& scaling,
                       float* buffer, int channels, int channel_offset);

/// Feature groups for the ablation study. `target` is channels 0-6; `others` is
/// channels 7-13 plus the entity boxes of D; `road` is R plus the light masks of D.
struct FeatureGroups {
  bool target = true;
  bool others = true;
  bool road = true;

  friend bool operator==(const FeatureGroups&, const FeatureGroups&) = default;
};

/// Stacked input tensor: frames x rows x cols x 20, channel-last.
struct WorldTensor {
  int frames = 0;
  int size = 0;
  std::vector<float> values;

  WorldTensor() = default;
  WorldTensor(int t, int n)
      : frames(t), size(n), values(static_cast<std::size_t>(t) * n * n * kNumChannels, 0.0f) {}

  std::size_t index(int t, int row, int col, int ch) const {
    return ((static_cast<std::size_t>(t) * size + row) * size + col) * kNumChannels + ch;
  }
  float at(int t, int row, int col, int ch) const { return values[index(t, row, col, ch)]; }
};

/// Grid of the given size/extent centred on the target at the prediction instant.
GridSpec centered_on_target(const Scene& scene, int size_px, double extent_m);

/// Renders the full input. `spec.center` must equal the target position at t.
WorldTensor build_input(const Scene& scene, const GridSpec& spec, const FeatureScaling& scaling,
                        const FeatureGroups& groups = {});

/// Little-endian float32 tensor file: "TDWT", u32 version, u32 rank, u32 dims, data.
void write_tensor(const std::filesystem::path& path, std::span<const std::uint32_t> shape,
                  std::span<const float> values);
void read_tensor(const std::filesystem::path& path, std::vector<std::uint32_t>& shape,
                 std::vector<float>& values);

void write_world_tensor(const std::filesystem::path& path, const WorldTensor& t);
WorldTensor read_world_tensor(const std::filesystem::path& path);

}  // namespace topdown::raster
