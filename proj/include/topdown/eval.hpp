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
#include <filesystem>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "topdown/pipeline.hpp"

namespace topdown::eval {

/// Constant velocity and acceleration: v*tau + a*tau^2/2 for tau = 1..5 s.
Trajectory linear_baseline(const EntityState& target_at_t);

inline constexpr std::array<int, 3> kReportHorizons{1, 2, 5};  // seconds

struct HorizonMetrics {
  int seconds = 0;
  double mean_l2 = 0.0;
  double hit_rate = 0.0;
  double oracle_l2 = 0.0;
};

struct MetricReport {
  std::string method;
  raster::FeatureGroups groups;
  int n_examples = 0;
  int k = 1;
  double rmse = 0.0;
  std::array<HorizonMetrics, 3> horizons{};
};

/// Each entry of `ranked` lists trajectories best first. RMSE is the square root
/// of the mean squared top-1 error over examples and all five horizons; the
/// oracle uses the first `k` trajectories of each set (all of them when k <= 0).
MetricReport compute_metrics(std::span<const std::vector<Trajectory>> ranked, std::span<const Trajectory> truth,
                             const std::string& method, int k = 0, double hit_threshold = 1.0);

void write_csv(std::ostream& out, std::span<const MetricReport> reports);
/// Aligned text table.
void write_table(std::ostream& out, std::span<const MetricReport> reports);

struct AblationConfig {
  pipeline::GridConfig grid;
  nn::ModelConfig model;
  nn::TrainConfig train;
  decode::DecodeConfig decode;
};

/// Trained model per flag set, evaluated on the test scenes.
struct AblationRun {
  MetricReport report;
  std::vector<std::vector<Trajectory>> ranked;
};

/// One model per feature-group set, all with the same seed.
std::vector<AblationRun> run_ablation(std::span<const Scene> train, std::span<const Scene> test,
                                      std::span<const raster::FeatureGroups> flag_sets, const AblationConfig& cfg);

/// Ablation CSV: feature columns, then metrics.
void write_ablation_csv(std::ostream& out, std::span<const MetricReport> reports);

}  // namespace topdown::eval
