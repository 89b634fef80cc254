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

#include "topdown/predictions.hpp"

#include <fstream>

#include "topdown/error.hpp"

namespace topdown::predictions {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw Error("predictions", msg); }

json gaussian_json(const dist::GaussianTrajectory& g) {
  json steps = json::array();
  for (const auto& p : g) {
    steps.push_back({{"mu", {p.mu.x, p.mu.y}}, {"log_sigma", {p.log_sigma.x, p.log_sigma.y}}, {"rho", p.rho}});
  }
  return steps;
}

Vec2 vec(const json& j) {
  if (!j.is_array() || j.size() != 2) fail("expected a 2-element array");
  return {j[0].get<double>(), j[1].get<double>()};
}

dist::GaussianTrajectory gaussian_from(const json& j) {
  if (!j.is_array() || j.size() != static_cast<std::size_t>(kHorizon)) fail("component must have 5 steps");
  dist::GaussianTrajectory g;
  for (int t = 0; t < kHorizon; ++t) {
    g[t].mu = vec(j[t].at("mu"));
    g[t].log_sigma = vec(j[t].at("log_sigma"));
    g[t].rho = j[t].at("rho").get<double>();
  }
  return g;
}

Trajectory trajectory_from(const json& j) {
  if (!j.is_array() || j.size() != static_cast<std::size_t>(kHorizon)) fail("trajectory must have 5 points");
  Trajectory t;
  for (int i = 0; i < kHorizon; ++i) t[i] = vec(j[i]);
  return t;
}

}  // namespace

json to_json(const Record& r) {
  json j = {{"v", kFormatVersion}, {"index", r.index}};
  if (const auto* mix = std::get_if<dist::MixtureTrajectories>(&r.payload)) {
    j["kind"] = "mixture";
    j["weights"] = mix->weights;
    json comps = json::array();
    for (const auto& c : mix->components) comps.push_back(gaussian_json(c));
    j["components"] = comps;
  } else if (const auto* g = std::get_if<GridRecord>(&r.payload)) {
    j["kind"] = "grids";
    j["size"] = g->grids.size;
    j["steps"] = g->grids.steps;
    j["extent_m"] = g->extent_m;
    j["probs"] = g->grids.probs;
  } else {
    const auto& s = std::get<TrajectorySet>(r.payload);
    j["kind"] = "trajectories";
    j["truncated"] = s.truncated;
    json list = json::array();
    for (std::size_t i = 0; i < s.trajectories.size(); ++i) {
      json pts = json::array();
      for (const Vec2& p : s.trajectories[i]) pts.push_back({p.x, p.y});
      json item = {{"points", pts}, {"weight", s.weights[i]}};
      if (i < s.scores.size()) item["score"] = s.scores[i];
      if (i < s.cells.size()) {
        json cells = json::array();
        for (const auto& c : s.cells[i]) cells.push_back({c.row, c.col});
        item["cells"] = cells;
      }
      list.push_back(item);
    }
    j["trajectories"] = list;
  }
  return j;
}

Record record_from_json(const json& j) {
  Record r;
  try {
    if (j.at("v").get<int>() != kFormatVersion) fail("unsupported prediction format version");
    r.index = j.at("index").get<std::size_t>();
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "mixture") {
      dist::MixtureTrajectories mix;
      mix.weights = j.at("weights").get<std::vector<double>>();
      for (const auto& c : j.at("components")) mix.components.push_back(gaussian_from(c));
      dist::validate(mix);
      r.payload = std::move(mix);
    } else if (kind == "grids") {
      GridRecord g;
      g.grids = dist::OccupancyGrids(j.at("size").get<int>(), j.at("steps").get<int>());
      g.extent_m = j.at("extent_m").get<double>();
      g.grids.probs = j.at("probs").get<std::vector<double>>();
      dist::validate(g.grids);
      r.payload = std::move(g);
    } else if (kind == "trajectories") {
      TrajectorySet s;
      s.truncated = j.at("truncated").get<bool>();
      for (const auto& item : j.at("trajectories")) {
        s.trajectories.push_back(trajectory_from(item.at("points")));
        s.weights.push_back(item.at("weight").get<double>());
        if (item.contains("score")) s.scores.push_back(item["score"].get<double>());
        if (item.contains("cells")) {
          std::vector<decode::Cell> cells;
          for (const auto& c : item["cells"]) cells.push_back({c.at(0).get<int>(), c.at(1).get<int>()});
          s.cells.push_back(std::move(cells));
        }
      }
      r.payload = std::move(s);
    } else {
      fail("unknown prediction kind '" + kind + "'");
    }
  } catch (const json::exception& e) {
    fail(std::string("malformed prediction record: ") + e.what());
  }
  return r;
}

void save(const std::filesystem::path& path, const std::vector<Record>& records) {
  std::ofstream out(path);
  if (!out) fail("cannot write " + path.string());
  for (const auto& r : records) out << to_json(r).dump() << "\n";
  if (!out) fail("failed writing " + path.string());
}

std::vector<Record> load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open " + path.string());
  std::vector<Record> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      out.push_back(record_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      fail(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    } catch (const Error& e) {
      fail(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

Record from_prediction(std::size_t index, const nn::Prediction& pred, const raster::GridSpec& out_spec) {
  Record r;
  r.index = index;
  if (const auto* g = std::get_if<dist::GaussianTrajectory>(&pred)) {
    r.payload = dist::MixtureTrajectories{{1.0}, {*g}};
  } else if (const auto* mix = std::get_if<dist::MixtureTrajectories>(&pred)) {
    r.payload = *mix;
  } else {
    r.payload = GridRecord{std::get<dist::OccupancyGrids>(pred), out_spec.extent_m};
  }
  return r;
}

TrajectorySet from_decoded(const decode::DiverseSet& set, const raster::GridSpec& out_spec) {
  TrajectorySet s;
  const auto ranked = pipeline::from_decoded(set, out_spec);
  s.trajectories = ranked.trajectories;
  s.weights = ranked.weights;
  for (const auto& t : set.trajectories) {
    s.scores.push_back(t.score);
    s.cells.push_back(t.cells);
  }
  s.truncated = set.truncated;
  return s;
}

pipeline::Ranked ranked(const Record& r) {
  pipeline::Ranked out;
  if (const auto* mix = std::get_if<dist::MixtureTrajectories>(&r.payload)) {
    for (int i : mix->ranked()) {
      Trajectory t;
      for (int s = 0; s < kHorizon; ++s) t[s] = mix->components[i][s].mu;
      out.trajectories.push_back(t);
      out.weights.push_back(mix->weights[i]);
    }
  } else if (const auto* s = std::get_if<TrajectorySet>(&r.payload)) {
    out.trajectories = s->trajectories;
    out.weights = s->weights;
  } else {
    fail("record " + std::to_string(r.index) + " holds occupancy grids; decode it first");
  }
  return out;
}

}  // namespace topdown::predictions
