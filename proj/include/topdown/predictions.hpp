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

#include <filesystem>
#include <variant>
#include <vector>

#include "topdown/decoder.hpp"
#include "topdown/pipeline.hpp"
#include "topdown/vendor_json.hpp"

namespace topdown::predictions {

inline constexpr int kFormatVersion = 1;

/// Decoded trajectory set for one example.
struct TrajectorySet {
  std::vector<Trajectory> trajectories;  // displacements, best first
  std::vector<double> weights;
  std::vector<double> scores;
  std::vector<std::vector<decode::Cell>> cells;
  bool truncated = false;
};

/// Occupancy grids with the extent of the output grid they live on.
struct GridRecord {
  dist::OccupancyGrids grids;
  double extent_m = 50.0;
};

struct Record {
  std::size_t index = 0;  // line of the example in its dataset
  std::variant<dist::MixtureTrajectories, GridRecord, TrajectorySet> payload;
};

nlohmann::json to_json(const Record& r);
Record record_from_json(const nlohmann::json& j);

/// One JSON object per line.
void save(const std::filesystem::path& path, const std::vector<Record>& records);
std::vector<Record> load(const std::filesystem::path& path);

Record from_prediction(std::size_t index, const nn::Prediction& pred, const raster::GridSpec& out_spec);
TrajectorySet from_decoded(const decode::DiverseSet& set, const raster::GridSpec& out_spec);

/// Trajectories best first. Grid records must be decoded first.
pipeline::Ranked ranked(const Record& r);

}  // namespace topdown::predictions
