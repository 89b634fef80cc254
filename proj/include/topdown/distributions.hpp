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
#include <span>
#include <vector>

#include "topdown/raster.hpp"
#include "topdown/scene.hpp"

namespace topdown::dist {

/// Largest admissible |rho|; keeps the covariance positive definite.
inline constexpr double kRhoLimit = 1.0 - 1e-6;

struct BivariateGaussian {
  Vec2 mu;         // m
  Vec2 log_sigma;  // log m
  double rho = 0.0;

  friend bool operator==(const BivariateGaussian&, const BivariateGaussian&) = default;
};

using GaussianTrajectory = std::array<BivariateGaussian, kHorizon>;

struct MixtureTrajectories {
  std::vector<double> weights;
  std::vector<GaussianTrajectory> components;

  int k() const { return static_cast<int>(weights.size()); }
  /// Component indices ordered by descending weight (ties by index).
  std::vector<int> ranked() const;
};

/// m probability grids of size x size, row-major per timestep.
struct OccupancyGrids {
  int size = 64;
  int steps = kHorizon;
  std::vector<double> probs;

  OccupancyGrids() = default;
  OccupancyGrids(int n, int m) : size(n), steps(m), probs(static_cast<std::size_t>(n) * n * m, 0.0) {}

  std::size_t cells() const { return static_cast<std::size_t>(size) * size; }
  double& at(int t, int row, int col) { return probs[t * cells() + static_cast<std::size_t>(row) * size + col]; }
  double at(int t, int row, int col) const {
    return probs[t * cells() + static_cast<std::size_t>(row) * size + col];
  }
  std::span<const double> grid(int t) const { return {probs.data() + t * cells(), cells()}; }
  std::span<double> grid(int t) { return {probs.data() + t * cells(), cells()}; }
};

void validate(const BivariateGaussian& p);
void validate(const MixtureTrajectories& m);
void validate(const OccupancyGrids& g);

/// tanh squashing with the |rho| clamp.
double rho_from_raw(double raw);

/// -log N(y; mu, diag(exp(s))^2, rho).
double gaussian_nll(const BivariateGaussian& p, Vec2 y);

/// Sum of per-timestep gaussian_nll; throws on length mismatch.
double trajectory_nll(std::span<const BivariateGaussian> traj, std::span<const Vec2> y);

/// -log sum_i w_i exp(-trajectory_nll_i), via log-sum-exp.
double mixture_nll(const MixtureTrajectories& mix, std::span<const Vec2> y);

/// Two equal-variance 1-D Gaussians have a single mode iff |y1 - y2| <= 2 sigma.
bool is_unimodal_pair(double y1, double y2, double sigma);

/// Number of component pairs whose final-timestep means are unimodal on both
/// axes (sigma taken as the mean of the pair's standard deviations).
int collapsed_pairs(const MixtureTrajectories& mix);

/// softmax((logits + g) / tau) with g = -log(-log(noise)).
std::vector<double> gumbel_softmax_sample(std::span<const double> logits, double tau,
                                          std::span<const double> noise);

/// Gradient of a loss w.r.t. the logits given the sample `y` and dL/dy.
std::vector<double> gumbel_softmax_backward(std::span<const double> y, double tau,
                                            std::span<const double> grad_y);

/// Output-grid cell of a displacement. Output grids live in the target-relative
/// frame, so `spec.center` is normally the origin.
std::optional<raster::Pixel> displacement_cell(Vec2 displacement, const raster::GridSpec& spec);

/// Sum over timesteps of -log g_t[cell(y_t)]; throws naming the timestep for
/// an out-of-bounds target.
double grid_cross_entropy(const OccupancyGrids& grids, std::span<const Vec2> y,
                          const raster::GridSpec& out_spec);

}  // namespace topdown::dist
