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

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "topdown/nn/model.hpp"

namespace topdown::nn {

struct TrainConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  int batch_size = 16;
  int epochs = 10;
  int mse_pretrain_epochs = 0;
  int sgd_epochs = 0;
  double sgd_lr = 1e-5;
  std::uint64_t seed = 0;
  /// Data-parallel shards per batch; gradients are reduced in shard order.
  int shards = 1;
};

void validate(const TrainConfig& cfg);

struct Example {
  ModelInput input;
  Target target;
};

enum class Phase { MsePretrain, Adam, Sgd };
std::string_view to_string(Phase p);

struct EpochRecord {
  int epoch = 0;
  Phase phase = Phase::Adam;
  double mean_loss = 0.0;
};

struct TrainReport {
  std::vector<EpochRecord> curve;
  long long steps = 0;
};

/// Called after every epoch; may be empty.
using EpochCallback = std::function<void(const EpochRecord&)>;

/// Mini-batch training: MSE pretraining (Gaussian/mixture heads), then Adam on
/// the likelihood, then optional plain SGD. Example order per epoch comes from a
/// seeded Fisher-Yates shuffle; per-example losses are summed in index order.
TrainReport train(Model& model, std::span<const Example> data, const TrainConfig& cfg,
                  const EpochCallback& on_epoch = {});

/// Mean loss over the data without updating parameters.
double evaluate_loss(const Model& model, std::span<const Example> data, LossKind kind);

/// Seeded Fisher-Yates permutation of 0..n-1.
std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed, std::uint64_t epoch);

}  // namespace topdown::nn
