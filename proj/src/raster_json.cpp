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

#include "topdown/raster_json.hpp"

#include "topdown/error.hpp"

namespace topdown::raster {
namespace {

using nlohmann::json;

const json& field(const json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) throw Error("rasterizer", std::string("missing field '") + name + "'");
  return j.at(name);
}

}  // namespace

json to_json(const GridSpec& spec) {
  return {{"size_px", spec.size_px}, {"extent_m", spec.extent_m}, {"center", {spec.center.x, spec.center.y}}};
}

GridSpec grid_spec_from_json(const json& j) {
  GridSpec s;
  s.size_px = field(j, "size_px").get<int>();
  s.extent_m = field(j, "extent_m").get<double>();
  if (j.contains("center")) s.center = {j["center"].at(0).get<double>(), j["center"].at(1).get<double>()};
  validate(s);
  return s;
}

json to_json(const FeatureScaling& s) {
  return {{"velocity", s.velocity}, {"acceleration", s.acceleration}, {"covariance", s.covariance}};
}

FeatureScaling feature_scaling_from_json(const json& j) {
  FeatureScaling s;
  s.velocity = field(j, "velocity").get<double>();
  s.acceleration = field(j, "acceleration").get<double>();
  s.covariance = field(j, "covariance").get<std::array<double, 3>>();
  validate(s);
  return s;
}

json to_json(const FeatureGroups& g) { return {{"target", g.target}, {"others", g.others}, {"road", g.road}}; }

FeatureGroups feature_groups_from_json(const json& j) {
  return {field(j, "target").get<bool>(), field(j, "others").get<bool>(), field(j, "road").get<bool>()};
}

}  // namespace topdown::raster
