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

#include <gtest/gtest.h>

#include <cmath>

#include "topdown/error.hpp"
#include "topdown/nn/train.hpp"
#include "topdown/rng.hpp"

namespace topdown::nn {
namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

ModelConfig small(HeadKind head) {
  ModelConfig c;
  c.input_frames = 3;
  c.input_size = 16;
  c.widths = {4, 4, 4};
  c.latent = 16;
  c.head = head;
  c.mixture_k = 2;
  c.grid_size = 8;
  c.grid_width = 2;
  c.prior_widths = {2, 2};
  return c;
}

std::vector<Example> examples(const ModelConfig& cfg, int n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Example> out(n);
  for (auto& ex : out) {
    ex.input.shape = {raster::kNumChannels, cfg.input_frames, cfg.input_size, cfg.input_size};
    ex.input.values.resize(shape_size(ex.input.shape));
    for (auto& v : ex.input.values) v = static_cast<float>(rng.uniform(0.0, 1.0));
    const Vec2 vel{rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0)};
    for (int t = 0; t < kHorizon; ++t) {
      ex.target.displacements[t] = {vel.x * (t + 1), vel.y * (t + 1)};
      ex.target.cells.push_back(static_cast<int>(rng.uniform(0.0, 1.0) * 64) % 64);
    }
  }
  return out;
}

TEST(Train, ZeroLearningRateGivesConstantCurve) {
  const auto cfg = small(HeadKind::Gaussian);
  Model model(cfg, 1);
  const auto data = examples(cfg, 6, 2);
  TrainConfig tc;
  tc.lr = 0.0;
  tc.batch_size = 4;
  tc.epochs = 3;
  const auto report = train(model, data, tc);
  ASSERT_EQ(report.curve.size(), 3u);
  for (const auto& r : report.curve) EXPECT_EQ(r.mean_loss, report.curve[0].mean_loss);
  EXPECT_EQ(report.steps, 6);
}

TEST(Train, SameSeedGivesIdenticalCurves) {
  const auto cfg = small(HeadKind::Mixture);
  const auto data = examples(cfg, 6, 3);
  TrainConfig tc;
  tc.lr = 1e-3;
  tc.batch_size = 2;
  tc.epochs = 2;
  tc.mse_pretrain_epochs = 1;
  tc.seed = 9;
  Model a(cfg, 4), b(cfg, 4);
  const auto ra = train(a, data, tc);
  const auto rb = train(b, data, tc);
  ASSERT_EQ(ra.curve.size(), 3u);
  EXPECT_EQ(ra.curve[0].phase, Phase::MsePretrain);
  for (std::size_t i = 0; i < ra.curve.size(); ++i) EXPECT_EQ(ra.curve[i].mean_loss, rb.curve[i].mean_loss);
  for (std::size_t p = 0; p < a.parameters().size(); ++p) {
    EXPECT_TRUE(a.parameters()[p]->value == b.parameters()[p]->value);
  }
}

TEST(Train, ShardedGradientsAreReproducibleAndAgree) {
  const auto cfg = small(HeadKind::Gaussian);
  const auto data = examples(cfg, 8, 5);
  TrainConfig tc;
  tc.lr = 1e-3;
  tc.batch_size = 4;
  tc.epochs = 2;
  Model serial(cfg, 6), s1(cfg, 6), s2(cfg, 6);
  const auto r0 = train(serial, data, tc);
  tc.shards = 3;
  const auto r1 = train(s1, data, tc);
  const auto r2 = train(s2, data, tc);
  for (std::size_t i = 0; i < r1.curve.size(); ++i) {
    EXPECT_EQ(r1.curve[i].mean_loss, r2.curve[i].mean_loss);
    EXPECT_NEAR(r1.curve[i].mean_loss, r0.curve[i].mean_loss, 1e-9 * std::abs(r0.curve[i].mean_loss));
  }
}

TEST(Train, LossDecreases) {
  for (HeadKind head : {HeadKind::Gaussian, HeadKind::Mixture, HeadKind::Grid}) {
    const auto cfg = small(head);
    const auto data = examples(cfg, 8, 7);
    Model model(cfg, 8);
    const double before = evaluate_loss(model, data, LossKind::Likelihood);
    TrainConfig tc;
    tc.lr = 3e-3;
    tc.batch_size = 4;
    tc.epochs = 8;
    train(model, data, tc);
    EXPECT_LT(evaluate_loss(model, data, LossKind::Likelihood), before) << to_string(head);
  }
}

TEST(Train, SingleExampleOverfitsLikelihood) {
  const auto cfg = small(HeadKind::Gaussian);
  const auto data = examples(cfg, 1, 11);
  Model model(cfg, 12);
  TrainConfig tc;
  tc.lr = 1e-2;
  tc.batch_size = 1;
  tc.epochs = 200;
  const auto report = train(model, data, tc);
  EXPECT_EQ(report.steps, 200);
  EXPECT_LE(evaluate_loss(model, data, LossKind::Likelihood), 5 * kLog2Pi + 0.5);
}

TEST(Train, SingleExampleOverfitsMse) {
  const auto cfg = small(HeadKind::Gaussian);
  const auto data = examples(cfg, 1, 13);
  Model model(cfg, 14);
  TrainConfig tc;
  tc.lr = 1e-2;
  tc.batch_size = 1;
  tc.epochs = 0;
  tc.mse_pretrain_epochs = 500;
  train(model, data, tc);
  EXPECT_LT(evaluate_loss(model, data, LossKind::Mse), 1e-2);
}

TEST(Train, EpochCallbackSeesEveryEpoch) {
  const auto cfg = small(HeadKind::Gaussian);
  const auto data = examples(cfg, 2, 1);
  Model model(cfg, 1);
  TrainConfig tc;
  tc.epochs = 2;
  tc.sgd_epochs = 1;
  std::vector<Phase> seen;
  train(model, data, tc, [&](const EpochRecord& r) { seen.push_back(r.phase); });
  EXPECT_EQ(seen, (std::vector<Phase>{Phase::Adam, Phase::Adam, Phase::Sgd}));
}

TEST(Train, DivergenceNamesEpoch) {
  const auto cfg = small(HeadKind::Gaussian);
  auto data = examples(cfg, 2, 1);
  data[1].target.displacements[2].x = std::numeric_limits<double>::infinity();
  Model model(cfg, 1);
  TrainConfig tc;
  tc.epochs = 1;
  try {
    train(model, data, tc);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.module(), "nnet");
    EXPECT_NE(std::string(e.what()).find("epoch"), std::string::npos) << e.what();
  }
}

TEST(Train, RejectsEmptyDataAndBadConfig) {
  const auto cfg = small(HeadKind::Gaussian);
  Model model(cfg, 1);
  EXPECT_THROW(train(model, {}, TrainConfig{}), Error);
  TrainConfig tc;
  tc.lr = -1.0;
  EXPECT_THROW(validate(tc), Error);
  tc = {};
  tc.batch_size = 0;
  EXPECT_THROW(validate(tc), Error);
}

TEST(Shuffle, IsSeededPermutation) {
  const auto a = shuffled_indices(50, 3, 0);
  EXPECT_EQ(a, shuffled_indices(50, 3, 0));
  EXPECT_NE(a, shuffled_indices(50, 3, 1));
  auto sorted = a;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) EXPECT_EQ(sorted[i], i);
}

}  // namespace
}  // namespace topdown::nn
