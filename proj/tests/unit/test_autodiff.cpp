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
#include <functional>

#include "topdown/distributions.hpp"
#include "topdown/error.hpp"
#include "topdown/nn/autodiff.hpp"
#include "topdown/rng.hpp"

namespace topdown::nn {
namespace {

Var random_param(Rng& rng, std::vector<int> shape, const std::string& name, double lo = -1.0, double hi = 1.0) {
  std::vector<double> v(shape_size(shape));
  for (auto& x : v) x = rng.uniform(lo, hi);
  return parameter(std::move(shape), std::move(v), name);
}

// Weighted sum so every output element carries a distinct upstream gradient.
Var weighted_sum(const Var& y, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> w(y->size());
  for (auto& x : w) x = rng.uniform(-1.0, 1.0);
  return sum(mul(y, constant(y->shape, std::move(w))));
}

/// Central differences (h = 1e-4) against reverse mode for every parameter
/// entry. Relative error uses max(|fd|, |analytic|, 1e-3) as the scale.
double max_fd_error(const std::vector<Var>& params, const std::function<Var()>& build) {
  for (const auto& p : params) std::fill(p->ensure_grad().begin(), p->ensure_grad().end(), 0.0);
  backward(build());
  double worst = 0.0;
  const double h = 1e-4;
  for (const auto& p : params) {
    for (std::size_t i = 0; i < p->size(); ++i) {
      const double orig = p->value[i];
      p->value[i] = orig + h;
      const double up = build()->value[0];
      p->value[i] = orig - h;
      const double down = build()->value[0];
      p->value[i] = orig;
      const double fd = (up - down) / (2 * h);
      const double an = p->grad[i];
      worst = std::max(worst, std::abs(fd - an) / std::max({std::abs(fd), std::abs(an), 1e-3}));
    }
  }
  return worst;
}

TEST(Backward, SquareAtThree) {
  auto x = parameter({1}, {3.0}, "x");
  backward(mul(x, x));
  EXPECT_EQ(x->grad[0], 6.0);
}

TEST(Backward, SharedSubexpressionAccumulates) {
  auto x = parameter({1}, {2.0}, "x");
  auto y = add(x, x);
  backward(sum(mul(y, y)));  // (2x)^2 -> 8x
  EXPECT_EQ(x->grad[0], 16.0);
}

TEST(Backward, NonFiniteGradientNamesOp) {
  auto x = parameter({2}, {1.0, 2.0}, "x");
  try {
    backward(sum(scale(scale(x, 1e300), 1e300)));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.module(), "nnet");
    EXPECT_NE(std::string(e.what()).find("scale"), std::string::npos) << e.what();
  }
}

TEST(Backward, RequiresScalarLoss) {
  auto x = parameter({2}, {1.0, 2.0}, "x");
  EXPECT_THROW(backward(x), Error);
}

TEST(Ops, ShapeMismatchThrows) {
  auto a = constant({2}, {1, 2});
  auto b = constant({3}, {1, 2, 3});
  EXPECT_THROW(add(a, b), Error);
  EXPECT_THROW(mul(a, b), Error);
  EXPECT_THROW(reshape(a, {3}), Error);
}

TEST(GradCheck, Elementwise) {
  Rng rng(1);
  auto a = random_param(rng, {3, 4}, "a");
  auto b = random_param(rng, {3, 4}, "b");
  EXPECT_LT(max_fd_error({a, b}, [&] { return weighted_sum(add(mul(a, b), scale(a, -0.7)), 1); }), 1e-4);
}

TEST(GradCheck, Relu) {
  Rng rng(2);
  auto a = random_param(rng, {20}, "a");
  for (auto& v : a->value) {
    if (std::abs(v) < 0.05) v += 0.1;
  }
  EXPECT_LT(max_fd_error({a}, [&] { return weighted_sum(relu(a), 2); }), 1e-4);
}

TEST(GradCheck, DenseAndReshape) {
  Rng rng(3);
  auto x = random_param(rng, {2, 3}, "x");
  auto w = random_param(rng, {4, 6}, "w");
  auto b = random_param(rng, {4}, "b");
  EXPECT_LT(max_fd_error({x, w, b}, [&] { return weighted_sum(reshape(dense(x, w, b), {2, 2}), 3); }), 1e-4);
}

TEST(GradCheck, Conv3dStridedPadded) {
  Rng rng(4);
  auto x = random_param(rng, {2, 4, 6, 5}, "x");
  auto w = random_param(rng, {3, 2, 3, 3, 3}, "w");
  auto b = random_param(rng, {3}, "b");
  Conv3dOptions opt;
  opt.sh = opt.sw = 2;
  opt.ph = opt.pw = 1;
  EXPECT_LT(max_fd_error({x, w, b}, [&] { return weighted_sum(conv3d(x, w, b, opt), 4); }), 1e-4);
}

TEST(GradCheck, Conv3dTemporalCollapse) {
  Rng rng(5);
  auto x = random_param(rng, {2, 3, 4, 4}, "x");
  auto w = random_param(rng, {2, 2, 3, 3, 3}, "w");
  auto b = random_param(rng, {2}, "b");
  Conv3dOptions opt;
  opt.ph = opt.pw = 1;
  EXPECT_LT(max_fd_error({x, w, b}, [&] { return weighted_sum(conv3d(x, w, b, opt), 5); }), 1e-4);
}

TEST(GradCheck, ConvTranspose2d) {
  Rng rng(6);
  auto x = random_param(rng, {2, 1, 3, 3}, "x");
  auto w = random_param(rng, {2, 3, 4, 4}, "w");
  auto b = random_param(rng, {3}, "b");
  const auto y = conv_transpose2d(x, w, b, 2, 1);
  EXPECT_EQ(y->shape, (std::vector<int>{3, 1, 6, 6}));
  EXPECT_LT(max_fd_error({x, w, b}, [&] { return weighted_sum(conv_transpose2d(x, w, b, 2, 1), 6); }), 1e-4);
}

TEST(ConvTranspose2d, AdjointOfConvolution) {
  // <conv_transpose(x), y> == <x, conv(y)> with shared weights and zero bias.
  Rng rng(7);
  auto x = random_param(rng, {2, 1, 3, 3}, "x");
  auto w = random_param(rng, {2, 3, 4, 4}, "w");
  auto y = random_param(rng, {3, 1, 6, 6}, "y");
  const auto up = conv_transpose2d(x, w, constant({3}, {0, 0, 0}), 2, 1);
  // conv weights [Co=2, Ci=3, 1, 4, 4] from the transpose weights [2, 3, 4, 4].
  auto wc = constant({2, 3, 1, 4, 4}, w->value);
  Conv3dOptions opt;
  opt.sh = opt.sw = 2;
  opt.ph = opt.pw = 1;
  const auto down = conv3d(y, wc, constant({2}, {0, 0}), opt);
  double lhs = 0.0, rhs = 0.0;
  for (std::size_t i = 0; i < up->size(); ++i) lhs += up->value[i] * y->value[i];
  for (std::size_t i = 0; i < down->size(); ++i) rhs += down->value[i] * x->value[i];
  EXPECT_NEAR(lhs, rhs, 1e-10);
}

TEST(GradCheck, AddCoordsResizeAndPrior) {
  Rng rng(8);
  auto x = random_param(rng, {2, 1, 3, 3}, "x");
  auto logits = random_param(rng, {3, 1, 6, 6}, "logits");
  EXPECT_LT(max_fd_error({x, logits},
                         [&] {
                           auto c = add_coords(x);
                           auto pr = reshape(sum(c), {1});
                           (void)pr;
                           auto prior = resize_nearest(reshape(mul(x, x), {2, 1, 3, 3}), 6);
                           auto one = dense(reshape(prior, {72}), constant({36, 72}, std::vector<double>(36 * 72, 0.01)),
                                            constant({36}, std::vector<double>(36, 0.0)));
                           return weighted_sum(add(add_prior(logits, reshape(one, {1, 1, 6, 6})),
                                                   constant({3, 1, 6, 6}, std::vector<double>(108, 0.5))),
                                               8);
                         }),
            1e-4);
  EXPECT_LT(max_fd_error({x}, [&] { return weighted_sum(add_coords(x), 9); }), 1e-4);
}

TEST(AddCoords, AppendsNormalisedCoordinates) {
  auto x = constant({1, 1, 3, 3}, std::vector<double>(9, 0.0));
  const auto y = add_coords(x);
  ASSERT_EQ(y->shape, (std::vector<int>{3, 1, 3, 3}));
  EXPECT_EQ(y->value[9 + 0], -1.0);  // row coordinate, row 0
  EXPECT_EQ(y->value[9 + 8], 1.0);   // row coordinate, row 2
  EXPECT_EQ(y->value[18 + 1], 0.0);  // column coordinate, col 1
}

TEST(ResizeNearest, Upsamples) {
  auto x = constant({1, 1, 2, 2}, {1, 2, 3, 4});
  const auto y = resize_nearest(x, 4);
  EXPECT_EQ(y->value, (std::vector<double>{1, 1, 2, 2, 1, 1, 2, 2, 3, 3, 4, 4, 3, 3, 4, 4}));
}

TEST(GradCheck, GumbelSoftmaxAtUnitTemperature) {
  Rng rng(10);
  auto logits = random_param(rng, {5}, "logits");
  std::vector<double> noise(5);
  for (auto& u : noise) u = rng.uniform(0.05, 0.95);
  EXPECT_LT(max_fd_error({logits}, [&] { return weighted_sum(gumbel_softmax(logits, 1.0, noise), 11); }), 1e-4);
  const auto y = gumbel_softmax(logits, 1.0, noise);
  const auto want = dist::gumbel_softmax_sample(logits->value, 1.0, noise);
  for (int i = 0; i < 5; ++i) EXPECT_DOUBLE_EQ(y->value[i], want[i]);
}

}  // namespace
}  // namespace topdown::nn
