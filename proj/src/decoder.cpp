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

#include "topdown/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "topdown/error.hpp"

namespace topdown::decode {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

[[noreturn]] void fail(const std::string& msg) { throw Error("decoder", msg); }

int linf(Cell a, Cell b) { return std::max(std::abs(a.row - b.row), std::abs(a.col - b.col)); }

Cell expected_next(Cell prev, const DecodeConfig& cfg) {
  return {static_cast<int>(std::lround(prev.row + cfg.velocity_hat.row)),
          static_cast<int>(std::lround(prev.col + cfg.velocity_hat.col))};
}

std::vector<double> log_grid(const dist::OccupancyGrids& grids, int t) {
  std::vector<double> out(grids.cells());
  const auto g = grids.grid(t);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = g[i] > 0.0 ? std::log(g[i]) : kNegInf;
  return out;
}

// Best continuation from `prev` into values `next_v`: returns the value and the
// first (row-major smallest) cell achieving it.
std::pair<double, int> best_successor(Cell prev, const std::vector<double>& next_v, int size,
                                      const DecodeConfig& cfg) {
  const Cell e = expected_next(prev, cfg);
  const int r0 = std::max(0, e.row - cfg.cutoff_cells);
  const int r1 = std::min(size - 1, e.row + cfg.cutoff_cells);
  const int c0 = std::max(0, e.col - cfg.cutoff_cells);
  const int c1 = std::min(size - 1, e.col + cfg.cutoff_cells);
  double best = kNegInf;
  int arg = -1;
  for (int r = r0; r <= r1; ++r) {
    for (int c = c0; c <= c1; ++c) {
      const double v = next_v[static_cast<std::size_t>(r) * size + c];
      if (v == kNegInf) continue;
      const double dr = r - e.row;
      const double dc = c - e.col;
      const double s = v - cfg.lambda * (dr * dr + dc * dc);
      if (s > best) {
        best = s;
        arg = r * size + c;
      }
    }
  }
  return {best, arg};
}

DecodedTrajectory decode_impl(const dist::OccupancyGrids& grids, const DecodeConfig& cfg, bool parallel) {
  validate(cfg);
  if (grids.steps < 1) fail("grids have no timesteps");
  const int n = grids.size;
  const int m = grids.steps;
  const std::size_t cells = grids.cells();

  // values[t][c]: best score of the suffix starting with cell c at step t.
  std::vector<std::vector<double>> values(m);
  values[m - 1] = log_grid(grids, m - 1);
  for (int t = m - 2; t >= 0; --t) {
    std::vector<double> lp = log_grid(grids, t);
    std::vector<double>& cur = values[t];
    cur.assign(cells, kNegInf);
    const std::vector<double>& next = values[t + 1];
    const long long total = static_cast<long long>(cells);
#pragma omp parallel for schedule(static) if (parallel)
    for (long long i = 0; i < total; ++i) {
      if (lp[i] == kNegInf) continue;
      const Cell c{static_cast<int>(i / n), static_cast<int>(i % n)};
      const double cont = best_successor(c, next, n, cfg).first;
      if (cont != kNegInf) cur[i] = lp[i] + cont;
    }
  }

  // Forward pass: the first cell (row-major) whose best completion is within
  // the tie tolerance of the optimum, which yields the lexicographically
  // smallest optimal sequence.
  const Cell anchor = anchor_cell(n);
  const double best = best_successor(anchor, values[0], n, cfg).first;
  if (best == kNegInf) fail("no feasible path through the occupancy grids");
  const double floor = best - kScoreTieTolerance;
  DecodedTrajectory out;
  Cell prev = anchor;
  double prefix = 0.0;
  for (int t = 0; t < m; ++t) {
    const Cell e = expected_next(prev, cfg);
    const auto g = grids.grid(t);
    int arg = -1;
    double step = 0.0;
    for (int r = std::max(0, e.row - cfg.cutoff_cells); arg < 0 && r <= std::min(n - 1, e.row + cfg.cutoff_cells); ++r) {
      for (int c = std::max(0, e.col - cfg.cutoff_cells); c <= std::min(n - 1, e.col + cfg.cutoff_cells); ++c) {
        const std::size_t i = static_cast<std::size_t>(r) * n + c;
        if (values[t][i] == kNegInf) continue;
        const double dr = r - e.row;
        const double dc = c - e.col;
        const double cost = cfg.lambda * (dr * dr + dc * dc);
        if (prefix + (values[t][i] - cost) >= floor) {
          arg = static_cast<int>(i);
          step = std::log(g[i]) - cost;
          break;
        }
      }
    }
    if (arg < 0) {
      // Only reachable through rounding at the tolerance edge.
      arg = best_successor(prev, values[t], n, cfg).second;
      const Cell c{arg / n, arg % n};
      step = std::log(g[arg]) - cfg.lambda * *transition_cost(prev, c, cfg);
    }
    prefix += step;
    prev = {arg / n, arg % n};
    out.cells.push_back(prev);
  }
  out.score = path_score(grids, out.cells, cfg);
  out.decoded_score = out.score;
  return out;
}

}  // namespace

void validate(const DecodeConfig& cfg) {
  if (!(cfg.lambda >= 0.0)) fail("lambda must be non-negative");
  if (cfg.cutoff_cells < 1) fail("cutoff must be at least one cell");
  if (!std::isfinite(cfg.velocity_hat.row) || !std::isfinite(cfg.velocity_hat.col)) {
    fail("velocity_hat must be finite");
  }
  bool any_positive = false;
  for (double c : cfg.diversity_coeffs) {
    if (!(c >= 0.0)) fail("diversity coefficients must be non-negative");
    any_positive = any_positive || c > 0.0;
  }
  if (!any_positive) fail("at least one diversity coefficient must be positive");
  if (!(cfg.diversity_threshold >= 0.0)) fail("diversity threshold must be non-negative");
  if (cfg.k < 1) fail("k must be at least 1");
}

CellVelocity velocity_to_cells(Vec2 velocity, const raster::GridSpec& out_spec) {
  const double mpp = out_spec.meters_per_pixel();
  return {-velocity.y / mpp, velocity.x / mpp};
}

Cell anchor_cell(int grid_size) { return {grid_size / 2, grid_size / 2}; }

std::optional<double> transition_cost(Cell prev, Cell next, const DecodeConfig& cfg) {
  const Cell e = expected_next(prev, cfg);
  if (linf(next, e) > cfg.cutoff_cells) return std::nullopt;
  const double dr = next.row - e.row;
  const double dc = next.col - e.col;
  return dr * dr + dc * dc;
}

double path_score(const dist::OccupancyGrids& grids, const std::vector<Cell>& cells, const DecodeConfig& cfg) {
  if (static_cast<int>(cells.size()) != grids.steps) fail("path length differs from the grid count");
  double score = 0.0;
  Cell prev = anchor_cell(grids.size);
  for (int t = 0; t < grids.steps; ++t) {
    const Cell c = cells[t];
    if (c.row < 0 || c.col < 0 || c.row >= grids.size || c.col >= grids.size) return kNegInf;
    const auto phi = transition_cost(prev, c, cfg);
    const double p = grids.at(t, c.row, c.col);
    if (!phi || !(p > 0.0)) return kNegInf;
    score += std::log(p) - cfg.lambda * *phi;
    prev = c;
  }
  return score;
}

DecodedTrajectory viterbi_decode(const dist::OccupancyGrids& grids, const DecodeConfig& cfg) {
  return decode_impl(grids, cfg, true);
}

DecodedTrajectory viterbi_decode_serial(const dist::OccupancyGrids& grids, const DecodeConfig& cfg) {
  return decode_impl(grids, cfg, false);
}

double diversity_distance(const std::vector<Cell>& a, const std::vector<Cell>& b,
                          const std::vector<double>& coeffs) {
  if (a.size() != b.size() || a.size() > coeffs.size()) fail("diversity distance length mismatch");
  double d = 0.0;
  for (std::size_t t = 0; t < a.size(); ++t) d = std::max(d, coeffs[t] * linf(a[t], b[t]));
  return d;
}

DiverseSet extract_diverse(const dist::OccupancyGrids& grids, const DecodeConfig& cfg) {
  validate(cfg);
  if (static_cast<int>(cfg.diversity_coeffs.size()) != grids.steps) {
    fail("expected " + std::to_string(grids.steps) + " diversity coefficients, got " +
         std::to_string(cfg.diversity_coeffs.size()));
  }
  DiverseSet out;
  dist::OccupancyGrids work = grids;
  const int n = grids.size;
  for (int i = 0; i < cfg.k; ++i) {
    if (i > 0) {
      const auto& last = out.trajectories.back().cells;
      bool exhausted = false;
      for (int t = 0; t < grids.steps; ++t) {
        const double c = cfg.diversity_coeffs[t];
        if (c <= 0.0) continue;
        auto g = work.grid(t);
        for (int r = 0; r < n; ++r) {
          for (int col = 0; col < n; ++col) {
            if (c * linf({r, col}, last[t]) <= cfg.diversity_threshold) {
              g[static_cast<std::size_t>(r) * n + col] = 0.0;
            }
          }
        }
        double sum = 0.0;
        for (double p : g) sum += p;
        if (!(sum > 0.0)) {
          exhausted = true;
          break;
        }
        for (double& p : g) p /= sum;
      }
      if (exhausted) {
        out.truncated = true;
        break;
      }
    }
    DecodedTrajectory traj;
    try {
      traj = viterbi_decode(work, cfg);
    } catch (const Error&) {
      if (i == 0) throw;
      out.truncated = true;
      break;
    }
    traj.decoded_score = traj.score;
    traj.score = path_score(grids, traj.cells, cfg);
    out.trajectories.push_back(std::move(traj));
  }

  double top = kNegInf;
  for (const auto& t : out.trajectories) top = std::max(top, t.score);
  double sum = 0.0;
  for (auto& t : out.trajectories) {
    t.weight = std::exp(t.score - top);
    sum += t.weight;
  }
  for (auto& t : out.trajectories) t.weight /= sum;
  return out;
}

std::vector<Vec2> trajectory_to_world(const DecodedTrajectory& traj, const raster::GridSpec& out_spec) {
  std::vector<Vec2> out;
  out.reserve(traj.cells.size());
  for (Cell c : traj.cells) {
    if (c.row < 0 || c.col < 0 || c.row >= out_spec.size_px || c.col >= out_spec.size_px) {
      fail("decoded cell lies outside the output grid");
    }
    out.push_back(raster::pixel_center(c, out_spec) - out_spec.center);
  }
  return out;
}

}  // namespace topdown::decode
