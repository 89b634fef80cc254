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

#include "topdown/raster.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <string>

#include "topdown/error.hpp"

namespace topdown::raster {
namespace {

[[noreturn]] void fail(const std::string& msg) { throw Error("rasterizer", msg); }

double half(const GridSpec& s) { return 0.5 * s.extent_m; }

// Pixel-centre coordinates relative to the grid centre.
double center_x(int col, const GridSpec& s) { return (col + 0.5) * s.meters_per_pixel() - half(s); }
double center_y(int row, const GridSpec& s) { return half(s) - (row + 0.5) * s.meters_per_pixel(); }

std::int64_t col_of(double rel_x, const GridSpec& s) {
  return static_cast<std::int64_t>(std::floor((half(s) + rel_x) / s.meters_per_pixel()));
}
std::int64_t row_of(double rel_y, const GridSpec& s) {
  return static_cast<std::int64_t>(std::floor((half(s) - rel_y) / s.meters_per_pixel()));
}

// Liang-Barsky clip of segment a->b to the closed square [-h, h]^2.
bool clip_segment(Vec2& a, Vec2& b, double h) {
  double t0 = 0.0, t1 = 1.0;
  const Vec2 d = b - a;
  const double p[4] = {-d.x, d.x, -d.y, d.y};
  const double q[4] = {a.x + h, h - a.x, a.y + h, h - a.y};
  for (int i = 0; i < 4; ++i) {
    if (p[i] == 0.0) {
      if (q[i] < 0.0) return false;
      continue;
    }
    const double r = q[i] / p[i];
    if (p[i] < 0.0) {
      t0 = std::max(t0, r);
    } else {
      t1 = std::min(t1, r);
    }
    if (t0 > t1) return false;
  }
  const Vec2 a0 = a;
  if (t0 > 0.0) a = a0 + t0 * d;
  if (t1 < 1.0) b = a0 + t1 * d;
  return true;
}

double polygon_area2(std::span<const Vec2> pts) {
  double a = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) a += cross(pts[i], pts[(i + 1) % pts.size()]);
  return a;
}

void copy_rgb(const RgbImage& img, WorldTensor& out, int t, int channel) {
  for (int r = 0; r < img.size; ++r) {
    for (int c = 0; c < img.size; ++c) {
      const float* src = img.at(r, c);
      const std::size_t dst = out.index(t, r, c, channel);
      out.values[dst] = src[0];
      out.values[dst + 1] = src[1];
      out.values[dst + 2] = src[2];
    }
  }
}

}  // namespace

void validate(const GridSpec& spec) {
  if (spec.size_px <= 0) fail("grid size must be positive");
  if (!(spec.extent_m > 0.0) || !std::isfinite(spec.extent_m)) fail("grid extent must be positive");
  if (!finite(spec.center)) fail("grid centre must be finite");
}

std::optional<Pixel> world_to_pixel(Vec2 p, const GridSpec& spec) {
  const Vec2 rel = p - spec.center;
  const std::int64_t col = col_of(rel.x, spec);
  const std::int64_t row = row_of(rel.y, spec);
  if (col < 0 || row < 0 || col >= spec.size_px || row >= spec.size_px) return std::nullopt;
  return Pixel{static_cast<int>(row), static_cast<int>(col)};
}

Vec2 pixel_center(Pixel px, const GridSpec& spec) {
  return spec.center + Vec2{center_x(px.col, spec), center_y(px.row, spec)};
}

void validate(const FeatureScaling& s) {
  auto ok = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!ok(s.velocity) || !ok(s.acceleration) || !ok(s.covariance[0]) || !ok(s.covariance[1]) ||
      !ok(s.covariance[2])) {
    fail("feature scales must be positive and finite");
  }
}

double nearest_rank_percentile(std::vector<double> values, double q) {
  if (values.empty()) fail("percentile of an empty sample");
  std::sort(values.begin(), values.end());
  const auto n = static_cast<double>(values.size());
  auto rank = static_cast<std::size_t>(std::ceil(q / 100.0 * n));
  rank = std::clamp<std::size_t>(rank, 1, values.size());
  return values[rank - 1];
}

FeatureScaling fit_feature_scaling(std::span<const Scene> scenes) {
  if (scenes.empty()) fail("cannot fit feature scaling on an empty dataset");
  std::array<std::vector<double>, 5> samples;
  for (const Scene& s : scenes) {
    for (const Frame& f : s.frames) {
      for (const EntityState& e : f.entities) {
        samples[0].push_back(norm(e.velocity));
        samples[1].push_back(norm(e.acceleration));
        for (int i = 0; i < 3; ++i) samples[2 + i].push_back(std::abs(e.cov_norms[i]));
      }
    }
  }
  if (samples[0].empty()) fail("dataset holds no entity states");
  std::array<double, 5> scale{};
  for (int i = 0; i < 5; ++i) {
    const double p = nearest_rank_percentile(std::move(samples[i]), 99.0);
    scale[i] = p < 1e-6 ? 1.0 : p;
  }
  return {scale[0], scale[1], {scale[2], scale[3], scale[4]}};
}

Rgb road_color(RoadKind kind) {
  switch (kind) {
    case RoadKind::kDrivablePolygon: return {0.25f, 0.25f, 0.25f};
    case RoadKind::kJunctionConnection: return {0.25f, 0.25f, 0.55f};
    case RoadKind::kCrosswalk: return {0.8f, 0.8f, 0.0f};
    case RoadKind::kLaneLine: return {1.0f, 1.0f, 1.0f};
    case RoadKind::kStopLine: return {1.0f, 0.0f, 0.5f};
  }
  return {0.0f, 0.0f, 0.0f};
}

Rgb class_color(EntityClass cls) {
  switch (cls) {
    case EntityClass::kVehicle: return {0.0f, 0.0f, 1.0f};
    case EntityClass::kPedestrian: return {1.0f, 0.0f, 1.0f};
    case EntityClass::kCyclist: return {0.0f, 1.0f, 1.0f};
  }
  return {0.0f, 0.0f, 0.0f};
}

Rgb permissibility_color(Permissibility p) {
  switch (p) {
    case Permissibility::kPermitted: return {0.0f, 1.0f, 0.0f};
    case Permissibility::kYield: return {1.0f, 0.5f, 0.0f};
    case Permissibility::kProhibited: return {1.0f, 0.0f, 0.0f};
  }
  return {0.0f, 0.0f, 0.0f};
}

namespace {

// Scanline fill of a polygon given relative to the grid centre.
std::vector<Pixel> polygon_pixels_relative(std::span<const Vec2> rel, const GridSpec& spec) {
  std::vector<Pixel> out;
  const std::size_t n = rel.size();
  if (n < 3) return out;
  double ymin = INFINITY, ymax = -INFINITY;
  for (const Vec2& p : rel) {
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  const int row_lo = static_cast<int>(std::clamp<std::int64_t>(row_of(ymax, spec) - 1, 0, spec.size_px));
  const int row_hi = static_cast<int>(std::clamp<std::int64_t>(row_of(ymin, spec) + 1, -1, spec.size_px - 1));
  std::vector<double> xs;
  for (int row = row_lo; row <= row_hi; ++row) {
    const double yc = center_y(row, spec);
    xs.clear();
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2 a = rel[i];
      const Vec2 b = rel[(i + 1) % n];
      if ((a.y <= yc && b.y > yc) || (b.y <= yc && a.y > yc)) {
        xs.push_back(a.x + (yc - a.y) * (b.x - a.x) / (b.y - a.y));
      }
    }
    std::sort(xs.begin(), xs.end());
    for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
      const std::int64_t lo = std::max<std::int64_t>(0, col_of(xs[k], spec) - 1);
      const std::int64_t hi = std::min<std::int64_t>(spec.size_px - 1, col_of(xs[k + 1], spec) + 1);
      for (std::int64_t col = lo; col <= hi; ++col) {
        const double xc = center_x(static_cast<int>(col), spec);
        if (xs[k] <= xc && xc < xs[k + 1]) out.push_back({row, static_cast<int>(col)});
      }
    }
  }
  return out;
}

}  // namespace

std::vector<Pixel> polygon_pixels(std::span<const Vec2> polygon, const GridSpec& spec) {
  std::vector<Vec2> rel(polygon.size());
  for (std::size_t i = 0; i < polygon.size(); ++i) rel[i] = polygon[i] - spec.center;
  return polygon_pixels_relative(rel, spec);
}

std::vector<Pixel> polyline_pixels(std::span<const Vec2> polyline, const GridSpec& spec) {
  std::vector<Pixel> out;
  for (std::size_t i = 0; i + 1 < polyline.size(); ++i) {
    Vec2 a = polyline[i] - spec.center;
    Vec2 b = polyline[i + 1] - spec.center;
    if (!clip_segment(a, b, half(spec))) continue;
    std::int64_t x0 = col_of(a.x, spec), y0 = row_of(a.y, spec);
    const std::int64_t x1 = col_of(b.x, spec), y1 = row_of(b.y, spec);
    const std::int64_t dx = std::abs(x1 - x0), dy = -std::abs(y1 - y0);
    const std::int64_t sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
    std::int64_t err = dx + dy;
    while (true) {
      if (x0 >= 0 && y0 >= 0 && x0 < spec.size_px && y0 < spec.size_px) {
        out.push_back({static_cast<int>(y0), static_cast<int>(x0)});
      }
      if (x0 == x1 && y0 == y1) break;
      const std::int64_t e2 = 2 * err;
      if (e2 >= dy) {
        err += dy;
        x0 += sx;
      }
      if (e2 <= dx) {
        err += dx;
        y0 += sy;
      }
    }
  }
  return out;
}

std::array<Vec2, 4> entity_box(const EntityState& e) {
  const double hl = 0.5 * e.extent.length;
  const double hw = 0.5 * e.extent.width;
  const Vec2 local[4] = {{hl, hw}, {-hl, hw}, {-hl, -hw}, {hl, -hw}};
  std::array<Vec2, 4> out;
  for (int i = 0; i < 4; ++i) out[i] = e.position + rotate(local[i], e.heading);
  return out;
}

RgbImage render_road(std::span<const RoadElement> road, const GridSpec& spec, RoadRenderStats* stats) {
  validate(spec);
  RgbImage img(spec.size_px);
  for (RoadKind kind : {RoadKind::kDrivablePolygon, RoadKind::kJunctionConnection, RoadKind::kCrosswalk,
                        RoadKind::kLaneLine, RoadKind::kStopLine}) {
    const Rgb color = road_color(kind);
    for (const RoadElement& r : road) {
      if (r.kind != kind) continue;
      if (is_polygon_kind(kind)) {
        if (polygon_area2(r.geometry) == 0.0) {
          if (stats != nullptr) ++stats->degenerate_polygons;
          continue;
        }
        for (Pixel px : polygon_pixels(r.geometry, spec)) img.fill(px, color);
      } else {
        for (Pixel px : polyline_pixels(r.geometry, spec)) img.fill(px, color);
      }
    }
  }
  return img;
}

void render_light_masks(std::span<const RoadElement> road, std::span<const TrafficLightState> lights,
                        const GridSpec& spec, RgbImage& image) {
  std::map<std::int64_t, Permissibility> state;
  for (const auto& l : lights) state[l.connection_id] = l.permissibility;
  for (Permissibility level :
       {Permissibility::kPermitted, Permissibility::kYield, Permissibility::kProhibited}) {
    const Rgb color = permissibility_color(level);
    for (const RoadElement& r : road) {
      if (r.kind != RoadKind::kJunctionConnection || !r.connection_id) continue;
      auto it = state.find(*r.connection_id);
      if (it == state.end() || it->second != level) continue;
      if (polygon_area2(r.geometry) == 0.0) continue;
      for (Pixel px : polygon_pixels(r.geometry, spec)) image.fill(px, color);
    }
  }
}

RgbImage render_dynamic_context(const Frame& frame, std::span<const RoadElement> road,
                                const GridSpec& spec, const DynamicLayers& layers) {
  validate(spec);
  RgbImage img(spec.size_px);
  if (layers.lights) render_light_masks(road, frame.lights, spec, img);
  std::vector<const EntityState*> order;
  for (const EntityState& e : frame.entities) {
    const bool is_target = e.entity_id == layers.target_id;
    if ((is_target && layers.target) || (!is_target && layers.others)) order.push_back(&e);
  }
  std::sort(order.begin(), order.end(),
            [](const EntityState* a, const EntityState* b) { return a->entity_id < b->entity_id; });
  for (const EntityState* e : order) {
    // Corners relative to the grid centre keep the raster exactly
    // translation-equivariant.
    const Vec2 rel_center = e->position - spec.center;
    const double hl = 0.5 * e->extent.length;
    const double hw = 0.5 * e->extent.width;
    const Vec2 local[4] = {{hl, hw}, {-hl, hw}, {-hl, -hw}, {hl, -hw}};
    std::array<Vec2, 4> rel;
    for (int i = 0; i < 4; ++i) rel[i] = rel_center + rotate(local[i], e->heading);
    const Rgb color = class_color(e->cls);
    for (Pixel px : polygon_pixels_relative(rel, spec)) img.fill(px, color);
  }
  return img;
}

void accumulate_entity(const EntityState& e, const GridSpec& spec, const FeatureScaling& scaling,
                       float* buffer, int channels, int channel_offset) {
  const auto px = world_to_pixel(e.position, spec);
  if (!px) return;
  float* dst = buffer + (static_cast<std::size_t>(px->row) * spec.size_px + px->col) * channels + channel_offset;
  dst[0] += static_cast<float>(e.velocity.x / scaling.velocity);
  dst[1] += static_cast<float>(e.velocity.y / scaling.velocity);
  dst[2] += static_cast<float>(e.acceleration.x / scaling.acceleration);
  dst[3] += static_cast<float>(e.acceleration.y / scaling.acceleration);
  for (int i = 0; i < 3; ++i) dst[4 + i] += static_cast<float>(e.cov_norms[i] / scaling.covariance[i]);
}

std::vector<float> render_entity_channels(const EntityState& e, const GridSpec& spec,
                                          const FeatureScaling& scaling) {
  validate(spec);
  validate(scaling);
  std::vector<float> out(static_cast<std::size_t>(spec.size_px) * spec.size_px * kEntityChannels, 0.0f);
  accumulate_entity(e, spec, scaling, out.data(), kEntityChannels, 0);
  return out;
}

GridSpec centered_on_target(const Scene& scene, int size_px, double extent_m) {
  return GridSpec{size_px, extent_m, scene.target().position};
}

WorldTensor build_input(const Scene& scene, const GridSpec& spec, const FeatureScaling& scaling,
                        const FeatureGroups& groups) {
  validate(spec);
  validate(scaling);
  if (!(spec.center == scene.target().position)) {
    fail("input grid must be centred on the target position at the prediction instant");
  }
  const int T = static_cast<int>(scene.frames.size());
  WorldTensor out(T, spec.size_px);

  std::optional<RgbImage> road;
  if (groups.road) road = render_road(scene.road, spec);

  for (int t = 0; t < T; ++t) {
    const Frame& frame = scene.frames[t];
    float* frame_base = out.values.data() + out.index(t, 0, 0, 0);
    for (const EntityState& e : frame.entities) {
      const bool is_target = e.entity_id == scene.target_id;
      if (is_target && groups.target) {
        accumulate_entity(e, spec, scaling, frame_base, kNumChannels, kTargetChannels);
      } else if (!is_target && groups.others) {
        accumulate_entity(e, spec, scaling, frame_base, kNumChannels, kOtherChannels);
      }
    }
    // D belongs to the context groups: light masks to the road, boxes (the
    // target's included) to the other entities. Target-only keeps channels 0-6.
    const DynamicLayers layers{groups.road, groups.others, groups.others, scene.target_id};
    if (groups.road || groups.others) {
      copy_rgb(render_dynamic_context(frame, scene.road, spec, layers), out, t, kDynamicChannels);
    }
    if (road) copy_rgb(*road, out, t, kRoadChannels);
  }
  return out;
}

void write_tensor(const std::filesystem::path& path, std::span<const std::uint32_t> shape,
                  std::span<const float> values) {
  static_assert(std::endian::native == std::endian::little, "tensor files assume a little-endian host");
  std::size_t count = 1;
  for (auto d : shape) count *= d;
  if (count != values.size()) fail("tensor shape does not match value count");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail("cannot write tensor file '" + path.string() + "'");
  const std::uint32_t version = 1;
  const auto rank = static_cast<std::uint32_t>(shape.size());
  out.write("TDWT", 4);
  out.write(reinterpret_cast<const char*>(&version), 4);
  out.write(reinterpret_cast<const char*>(&rank), 4);
  out.write(reinterpret_cast<const char*>(shape.data()), static_cast<std::streamsize>(4 * shape.size()));
  out.write(reinterpret_cast<const char*>(values.data()), static_cast<std::streamsize>(4 * values.size()));
  if (!out) fail("I/O failure writing '" + path.string() + "'");
}

void read_tensor(const std::filesystem::path& path, std::vector<std::uint32_t>& shape,
                 std::vector<float>& values) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open tensor file '" + path.string() + "'");
  char magic[4];
  std::uint32_t version = 0, rank = 0;
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(&version), 4);
  in.read(reinterpret_cast<char*>(&rank), 4);
  if (!in || std::memcmp(magic, "TDWT", 4) != 0 || version != 1 || rank > 8) {
    fail("'" + path.string() + "' is not a version-1 tensor file");
  }
  shape.assign(rank, 0);
  in.read(reinterpret_cast<char*>(shape.data()), 4 * rank);
  std::size_t count = 1;
  for (auto d : shape) count *= d;
  values.assign(count, 0.0f);
  in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(4 * count));
  if (!in) fail("truncated tensor file '" + path.string() + "'");
}

void write_world_tensor(const std::filesystem::path& path, const WorldTensor& t) {
  const std::uint32_t shape[4] = {static_cast<std::uint32_t>(t.frames), static_cast<std::uint32_t>(t.size),
                                  static_cast<std::uint32_t>(t.size), kNumChannels};
  write_tensor(path, shape, t.values);
}

WorldTensor read_world_tensor(const std::filesystem::path& path) {
  std::vector<std::uint32_t> shape;
  WorldTensor t;
  read_tensor(path, shape, t.values);
  if (shape.size() != 4 || shape[1] != shape[2] || shape[3] != kNumChannels) {
    fail("'" + path.string() + "' does not hold a world tensor");
  }
  t.frames = static_cast<int>(shape[0]);
  t.size = static_cast<int>(shape[1]);
  return t;
}

}  // namespace topdown::raster
