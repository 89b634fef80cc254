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
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "topdown/distributions.hpp"
#include "topdown/nn/autodiff.hpp"
#include "topdown/raster.hpp"
#include "topdown/vendor_json.hpp"

namespace topdown::nn {

enum class HeadKind { Gaussian, Mixture, Grid };

std::string_view to_string(HeadKind h);
HeadKind head_kind_from_string(std::string_view s);

struct ModelConfig {
  int input_frames = kNumFrames;
  int input_size = 128;
  std::array<int, 3> widths{32, 64, 64};
  int latent = 128;
  HeadKind head = HeadKind::Gaussian;
  int mixture_k = 3;
  int grid_size = 64;
  int grid_width = 16;
  std::array<int, 2> prior_widths{16, 16};
  bool coord_channels = true;
  /// Metres per unit of the regressed means.
  double mu_scale = 10.0;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

void validate(const ModelConfig& cfg);
nlohmann::json to_json(const ModelConfig& cfg);
ModelConfig model_config_from_json(const nlohmann::json& j);

/// Head output of one forward pass.
using Prediction = std::variant<dist::GaussianTrajectory, dist::MixtureTrajectories, dist::OccupancyGrids>;

enum class LossKind { Likelihood, Mse };

/// Number of raw head outputs for a config.
int raw_output_size(const ModelConfig& cfg);

/// Raw head layout: per timestep (mu_x, mu_y, s_x, s_y, rho_raw), means in units of mu_scale.
dist::GaussianTrajectory gaussian_from_raw(std::span<const double> raw, double mu_scale);
/// k weight logits followed by k Gaussian blocks.
dist::MixtureTrajectories mixture_from_raw(std::span<const double> raw, int k, double mu_scale);
/// Per-timestep spatial softmax of logits [m, G, G].
dist::OccupancyGrids grids_from_logits(std::span<const double> logits, int steps, int size);

/// Fused losses with analytic gradients.
Var gaussian_nll_loss(const Var& raw, std::span<const Vec2> y, double mu_scale);
Var mixture_nll_loss(const Var& raw, std::span<const Vec2> y, int k, double mu_scale);
/// Mean over control points of squared L2; for mixtures only the best component
/// (winner takes all) receives gradient.
Var mse_loss(const Var& raw, std::span<const Vec2> y, int k, double mu_scale, bool mixture);
/// Sum over timesteps of -log softmax(logits_t)[cell_t]; cells are flat row-major indices.
Var grid_ce_loss(const Var& logits, std::span<const int> cells);

/// Input of one example, channel-first [20, T, H, W].
struct ModelInput {
  std::vector<int> shape;
  std::vector<float> values;
};

ModelInput to_model_input(const raster::WorldTensor& t);

/// Ground truth in the form each head's loss needs.
struct Target {
  std::array<Vec2, kHorizon> displacements;
  std::vector<int> cells;  // flattened output-grid cells; grid head only
};

class Model {
 public:
  Model(const ModelConfig& cfg, std::uint64_t seed);
  /// Copies are deep: the copy owns fresh parameter nodes.
  Model(const Model& other);
  Model& operator=(const Model& other);
  Model(Model&&) = default;
  Model& operator=(Model&&) = default;

  const ModelConfig& config() const { return cfg_; }
  const std::vector<Var>& parameters() const { return params_; }
  std::size_t parameter_count() const;

  /// Raw head output: the Gaussian/mixture vector, or grid logits (prior added) [m,1,G,G].
  Var forward_raw(const ModelInput& input) const;
  Prediction predict(const ModelInput& input) const;
  Var loss(const Var& raw, const Target& target, LossKind kind) const;

  void zero_grad();
  /// Copies parameter values from another model of the same config.
  void copy_values_from(const Model& other);

 private:
  Var param(std::vector<int> shape, std::string name, double bound, std::uint64_t seed);

  ModelConfig cfg_;
  std::vector<Var> params_;
  // Indices into params_ (weight, bias) per layer.
  std::vector<std::pair<std::size_t, std::size_t>> encoder_, prior_, upsample_;
  std::pair<std::size_t, std::size_t> latent_{}, head_{};
};

/// Checkpoint metadata echoed next to the weights.
struct CheckpointMeta {
  raster::GridSpec input_spec;   // center unused
  raster::GridSpec output_spec;  // center unused
  raster::FeatureScaling scaling;
  raster::FeatureGroups groups;
};

/// "TDPM", u32 version, u32 JSON length, JSON, u64 count, float32 LE values.
void save_checkpoint(const std::filesystem::path& path, const Model& model, const CheckpointMeta& meta);
Model load_checkpoint(const std::filesystem::path& path, CheckpointMeta* meta = nullptr);

}  // namespace topdown::nn
