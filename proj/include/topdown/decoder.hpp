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

#include <optional>
#include <vector>

#include "topdown/distributions.hpp"
#include "topdown/raster.hpp"

namespace topdown::decode {

using Cell = raster::Pixel;

/// Expected per-step motion in output cells, (rows, cols).
struct CellVelocity {
  double row = 0.0;
  double col = 0.0;
};

/// Path scores closer than this are ties; a tie goes to the lexicographically
/// smallest (row, col) sequence.
inline constexpr double kScoreTieTolerance = 1e-9;

struct DecodeConfig {
  double lambda = 0.1;
  int cutoff_cells = 5;
  CellVelocity velocity_hat;
  std::vector<double> diversity_coeffs{0.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 5.0, 1.0 / 5.0};
  double diversity_threshold = 1.0;
  int k = 1;
};

void validate(const DecodeConfig& cfg);

struct DecodedTrajectory {
  std::vector<Cell> cells;
  double score = 0.0;          // on the original grids
  double decoded_score = 0.0;  // on the (masked, renormalised) grids it was decoded from
  double weight = 1.0;
};

struct DiverseSet {
  std::vector<DecodedTrajectory> trajectories;
  bool truncated = false;
};

/// Observed velocity (m/s, world axes) as cells per 1 s step on the output grid.
CellVelocity velocity_to_cells(Vec2 velocity, const raster::GridSpec& out_spec);

/// Anchor of the first transition: the target's cell at the prediction instant.
Cell anchor_cell(int grid_size);

/// Quadratic deviation from round(prev + v_hat), or empty beyond the L-inf cutoff.
std::optional<double> transition_cost(Cell prev, Cell next, const DecodeConfig& cfg);

/// Structured score of a cell sequence, summed in time order; -inf when infeasible.
double path_score(const dist::OccupancyGrids& grids, const std::vector<Cell>& cells, const DecodeConfig& cfg);

/// Exact max-sum DP; ties resolve to the lexicographically smallest sequence.
/// Throws Error("decoder", ...) when no feasible path exists.
DecodedTrajectory viterbi_decode(const dist::OccupancyGrids& grids, const DecodeConfig& cfg);

/// Single-threaded reference of viterbi_decode.
DecodedTrajectory viterbi_decode_serial(const dist::OccupancyGrids& grids, const DecodeConfig& cfg);

/// Iterative masking; returns up to cfg.k trajectories, weights = softmax of scores.
DiverseSet extract_diverse(const dist::OccupancyGrids& grids, const DecodeConfig& cfg);

/// max_t c_t * ||a_t - b_t||_inf.
double diversity_distance(const std::vector<Cell>& a, const std::vector<Cell>& b,
                          const std::vector<double>& coeffs);

/// Cell centres as displacements from the grid centre (metres).
std::vector<Vec2> trajectory_to_world(const DecodedTrajectory& traj, const raster::GridSpec& out_spec);

}  // namespace topdown::decode
