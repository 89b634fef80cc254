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

#include "topdown/dataset.hpp"

#include <fstream>

#include "topdown/error.hpp"

namespace topdown {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw Error("scene_model", msg); }

json vec_json(Vec2 v) { return json::array({v.x, v.y}); }

Vec2 vec_from(const json& j, const char* field) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    fail(std::string("field '") + field + "' must be a 2-element number array");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

const json& require(const json& j, const char* field) {
  if (!j.is_object()) fail(std::string("expected an object holding '") + field + "'");
  auto it = j.find(field);
  if (it == j.end()) fail(std::string("missing field '") + field + "'");
  return *it;
}

double number(const json& j, const char* field) {
  const json& v = require(j, field);
  if (!v.is_number()) fail(std::string("field '") + field + "' must be a number");
  return v.get<double>();
}

std::int64_t integer(const json& j, const char* field) {
  const json& v = require(j, field);
  if (!v.is_number_integer()) fail(std::string("field '") + field + "' must be an integer");
  return v.get<std::int64_t>();
}

json entity_json(const EntityState& e) {
  return json{{"id", e.entity_id},
              {"class", std::string(to_string(e.cls))},
              {"pos", vec_json(e.position)},
              {"vel", vec_json(e.velocity)},
              {"acc", vec_json(e.acceleration)},
              {"heading", e.heading},
              {"extent", json::array({e.extent.length, e.extent.width})},
              {"cov", json::array({e.cov_norms[0], e.cov_norms[1], e.cov_norms[2]})}};
}

EntityState entity_from(const json& j) {
  EntityState e;
  e.entity_id = integer(j, "id");
  const json& cls = require(j, "class");
  if (!cls.is_string()) fail("field 'class' must be a string");
  e.cls = entity_class_from_string(cls.get<std::string>());
  e.position = vec_from(require(j, "pos"), "pos");
  e.velocity = vec_from(require(j, "vel"), "vel");
  e.acceleration = vec_from(require(j, "acc"), "acc");
  e.heading = number(j, "heading");
  const Vec2 ext = vec_from(require(j, "extent"), "extent");
  e.extent = {ext.x, ext.y};
  const json& cov = require(j, "cov");
  if (!cov.is_array() || cov.size() != 3) fail("field 'cov' must hold 3 numbers");
  for (int i = 0; i < 3; ++i) {
    if (!cov[i].is_number()) fail("field 'cov' must hold 3 numbers");
    e.cov_norms[i] = cov[i].get<double>();
  }
  return e;
}

}  // namespace

json scene_to_json(const Scene& scene) {
  json frames = json::array();
  for (const Frame& f : scene.frames) {
    json entities = json::array();
    for (const auto& e : f.entities) entities.push_back(entity_json(e));
    json lights = json::array();
    for (const auto& l : f.lights) {
      lights.push_back(json{{"connection_id", l.connection_id},
                            {"state", std::string(to_string(l.permissibility))}});
    }
    frames.push_back(json{{"t", f.timestamp}, {"entities", entities}, {"lights", lights}});
  }
  json road = json::array();
  for (const RoadElement& r : scene.road) {
    json pts = json::array();
    for (Vec2 p : r.geometry) pts.push_back(vec_json(p));
    json el{{"kind", std::string(to_string(r.kind))}, {"points", pts}};
    if (r.connection_id) el["connection_id"] = *r.connection_id;
    road.push_back(std::move(el));
  }
  json future = json::array();
  for (Vec2 p : scene.future) future.push_back(vec_json(p));
  return json{{"v", kDatasetVersion},
              {"target_id", scene.target_id},
              {"frames", frames},
              {"road", road},
              {"future", future}};
}

Scene scene_from_json(const json& j) {
  if (integer(j, "v") != kDatasetVersion) fail("unsupported dataset version");
  Scene s;
  s.target_id = integer(j, "target_id");

  const json& frames = require(j, "frames");
  if (!frames.is_array()) fail("field 'frames' must be an array");
  if (frames.size() != static_cast<std::size_t>(kNumFrames)) {
    fail("expected " + std::to_string(kNumFrames) + " frames, got " + std::to_string(frames.size()));
  }
  for (const json& fj : frames) {
    Frame f;
    f.timestamp = number(fj, "t");
    const json& ents = require(fj, "entities");
    if (!ents.is_array()) fail("field 'entities' must be an array");
    for (const json& ej : ents) f.entities.push_back(entity_from(ej));
    const json& lights = require(fj, "lights");
    if (!lights.is_array()) fail("field 'lights' must be an array");
    for (const json& lj : lights) {
      const json& st = require(lj, "state");
      if (!st.is_string()) fail("field 'state' must be a string");
      f.lights.push_back({integer(lj, "connection_id"), permissibility_from_string(st.get<std::string>())});
    }
    s.frames.push_back(std::move(f));
  }

  const json& road = require(j, "road");
  if (!road.is_array()) fail("field 'road' must be an array");
  for (const json& rj : road) {
    RoadElement r;
    const json& kind = require(rj, "kind");
    if (!kind.is_string()) fail("field 'kind' must be a string");
    r.kind = road_kind_from_string(kind.get<std::string>());
    const json& pts = require(rj, "points");
    if (!pts.is_array()) fail("field 'points' must be an array");
    for (const json& p : pts) r.geometry.push_back(vec_from(p, "points"));
    if (rj.contains("connection_id")) r.connection_id = integer(rj, "connection_id");
    s.road.push_back(std::move(r));
  }

  const json& future = require(j, "future");
  if (!future.is_array() || future.size() != static_cast<std::size_t>(kHorizon)) {
    fail("expected " + std::to_string(kHorizon) + " future displacements");
  }
  for (int t = 0; t < kHorizon; ++t) s.future[t] = vec_from(future[t], "future");

  validate(s);
  return s;
}

std::vector<Scene> load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open dataset '" + path.string() + "'");
  std::vector<Scene> scenes;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      scenes.push_back(scene_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      fail(path.string() + ":" + std::to_string(line_no) + ": parse error: " + e.what());
    } catch (const Error& e) {
      fail(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return scenes;
}

void save_dataset(const std::vector<Scene>& scenes, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail("cannot write dataset '" + path.string() + "'");
  for (const Scene& s : scenes) out << scene_to_json(s).dump() << '\n';
  if (!out) fail("I/O failure writing '" + path.string() + "'");
}

}  // namespace topdown
