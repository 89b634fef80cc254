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

#include "topdown/viz.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>

#include "topdown/error.hpp"

namespace topdown::viz {
namespace {

[[noreturn]] void fail(const std::string& msg) { throw Error("viz", msg); }

void draw(raster::RgbImage& img, const std::vector<Vec2>& line, const raster::GridSpec& spec, raster::Rgb color) {
  for (const auto& px : raster::polyline_pixels(line, spec)) img.fill(px, color);
}

std::vector<Vec2> path_points(Vec2 origin, const Trajectory& t) {
  std::vector<Vec2> pts{origin};
  for (const Vec2& d : t) pts.push_back(origin + d);
  return pts;
}

}  // namespace

std::vector<Vec2> ellipse_points(const dist::BivariateGaussian& p, Vec2 origin, int n) {
  const double sx = std::exp(p.log_sigma.x);
  const double sy = std::exp(p.log_sigma.y);
  const double a = sx * sx, c = sy * sy, b = p.rho * sx * sy;
  const double mid = 0.5 * (a + c);
  const double rad = std::sqrt(0.25 * (a - c) * (a - c) + b * b);
  const double l1 = std::max(0.0, mid + rad);
  const double l2 = std::max(0.0, mid - rad);
  const double theta = 0.5 * std::atan2(2.0 * b, a - c);
  std::vector<Vec2> pts;
  for (int i = 0; i <= n; ++i) {
    const double phi = 2.0 * M_PI * i / n;
    const Vec2 local{std::sqrt(l1) * std::cos(phi), std::sqrt(l2) * std::sin(phi)};
    pts.push_back(origin + p.mu + rotate(local, theta));
  }
  return pts;
}

Image8 render(const Scene& scene, const predictions::Record* pred, const VizOptions& opts) {
  validate(scene);
  const raster::GridSpec spec = raster::centered_on_target(scene, opts.size_px, opts.extent_m);
  raster::validate(spec);
  raster::RgbImage img = raster::render_road(scene.road, spec);
  raster::DynamicLayers layers;
  layers.target_id = scene.target_id;
  const raster::RgbImage dyn = raster::render_dynamic_context(scene.current(), scene.road, spec, layers);
  for (std::size_t i = 0; i < img.data.size(); i += 3) {
    if (dyn.data[i] != 0.0f || dyn.data[i + 1] != 0.0f || dyn.data[i + 2] != 0.0f) {
      std::copy(dyn.data.begin() + i, dyn.data.begin() + i + 3, img.data.begin() + i);
    }
  }

  const Vec2 origin = scene.target().position;
  std::vector<std::pair<Trajectory, const dist::GaussianTrajectory*>> shown;
  if (pred) {
    const auto* mix = std::get_if<dist::MixtureTrajectories>(&pred->payload);
    const pipeline::Ranked ranked = predictions::ranked(*pred);
    const std::vector<int> order = mix ? mix->ranked() : std::vector<int>{};
    for (std::size_t i = 0; i < ranked.trajectories.size(); ++i) {
      if (ranked.weights[i] <= opts.min_weight) continue;
      shown.emplace_back(ranked.trajectories[i], mix ? &mix->components[order[i]] : nullptr);
    }
  }
  auto draw_prediction = [&](std::size_t i, raster::Rgb color) {
    draw(img, path_points(origin, shown[i].first), spec, color);
    if (shown[i].second) {
      for (const auto& p : *shown[i].second) draw(img, ellipse_points(p, origin), spec, color);
    }
  };
  for (std::size_t i = 1; i < shown.size(); ++i) draw_prediction(i, kAlternate);
  draw(img, path_points(origin, scene.future), spec, kGroundTruth);
  if (!shown.empty()) draw_prediction(0, kTopTrajectory);

  Image8 out;
  out.size = img.size;
  out.rgb.resize(img.data.size());
  for (std::size_t i = 0; i < img.data.size(); ++i) {
    out.rgb[i] = static_cast<std::uint8_t>(std::lround(std::clamp(img.data[i], 0.0f, 1.0f) * 255.0f));
  }
  return out;
}

void write_png(const std::filesystem::path& path, const Image8& image) {
  if (image.size <= 0 || image.rgb.size() != static_cast<std::size_t>(image.size) * image.size * 3) {
    fail("image buffer does not match its size");
  }
  std::unique_ptr<FILE, int (*)(FILE*)> fp(std::fopen(path.c_str(), "wb"), &std::fclose);
  if (!fp) fail("cannot write " + path.string());
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, nullptr);
    fail("libpng initialisation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    fail("libpng failed writing " + path.string());
  }
  png_init_io(png, fp.get());
  png_set_compression_level(png, 6);
  png_set_filter(png, PNG_FILTER_TYPE_BASE, PNG_FILTER_NONE);
  png_set_IHDR(png, info, image.size, image.size, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int r = 0; r < image.size; ++r) {
    png_write_row(png, image.rgb.data() + static_cast<std::size_t>(r) * image.size * 3);
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace topdown::viz
