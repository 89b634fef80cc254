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

// OpenMP kernels against their serial references.

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "topdown/decoder.hpp"
#include "topdown/nn/kernels.hpp"
#include "topdown/rng.hpp"

namespace {

using namespace topdown;

std::vector<double> random_vec(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(-1.0, 1.0);
  return v;
}

// Square GEMM of side state.range(0).
template <void (*Gemm)(int, int, int, const double*, const double*, double*)>
void BM_Gemm(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto a = random_vec(static_cast<std::size_t>(n) * n, 1);
  const auto b = random_vec(static_cast<std::size_t>(n) * n, 2);
  std::vector<double> c(static_cast<std::size_t>(n) * n);
  for (auto _ : state) {
    std::fill(c.begin(), c.end(), 0.0);
    Gemm(n, n, n, a.data(), b.data(), c.data());
    benchmark::DoNotOptimize(c.data());
  }
  state.SetItemsProcessed(state.iterations() * 2LL * n * n * n);
}

BENCHMARK(BM_Gemm<nn::gemm_nn>)->Name("gemm_nn/parallel")->Arg(64)->Arg(256);
BENCHMARK(BM_Gemm<nn::reference::gemm_nn>)->Name("gemm_nn/serial")->Arg(64)->Arg(256);
BENCHMARK(BM_Gemm<nn::gemm_tn>)->Name("gemm_tn/parallel")->Arg(64)->Arg(256);
BENCHMARK(BM_Gemm<nn::reference::gemm_tn>)->Name("gemm_tn/serial")->Arg(64)->Arg(256);
BENCHMARK(BM_Gemm<nn::gemm_nt>)->Name("gemm_nt/parallel")->Arg(64)->Arg(256);
BENCHMARK(BM_Gemm<nn::reference::gemm_nt>)->Name("gemm_nt/serial")->Arg(64)->Arg(256);

// First encoder stage at the acceptance resolution: 22 channels (with
// coordinates), 6 frames, 32x32, 3x3 stride 2, 8 outputs.
nn::ConvGeom encoder_geom() {
  nn::ConvGeom g;
  g.channels = 22;
  g.frames = 6;
  g.height = g.width = 32;
  g.kt = 1;
  g.kh = g.kw = 3;
  g.sh = g.sw = 2;
  g.ph = g.pw = 1;
  return g;
}

constexpr int kConvOut = 8;

void BM_ConvParallel(benchmark::State& state) {
  const auto g = encoder_geom();
  const auto x = random_vec(g.input_size(), 3);
  const auto w = random_vec(kConvOut * g.patch(), 4);
  const auto b = random_vec(kConvOut, 5);
  std::vector<double> col(g.patch() * g.positions()), out(kConvOut * g.positions());
  for (auto _ : state) {
    nn::conv3d_forward(x.data(), w.data(), b.data(), kConvOut, g, col.data(), out.data());
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_ConvSerial(benchmark::State& state) {
  const auto g = encoder_geom();
  const auto x = random_vec(g.input_size(), 3);
  const auto w = random_vec(kConvOut * g.patch(), 4);
  const auto b = random_vec(kConvOut, 5);
  std::vector<double> out(kConvOut * g.positions());
  for (auto _ : state) {
    nn::reference::conv3d_forward(x.data(), w.data(), b.data(), kConvOut, g, out.data());
    benchmark::DoNotOptimize(out.data());
  }
}

BENCHMARK(BM_ConvParallel)->Name("conv3d/parallel");
BENCHMARK(BM_ConvSerial)->Name("conv3d/serial");

dist::OccupancyGrids smooth_grids(int n) {
  Rng rng(6);
  dist::OccupancyGrids g(n, kHorizon);
  for (int t = 0; t < kHorizon; ++t) {
    double sum = 0.0;
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) {
        const double d2 = (r - n / 2.0) * (r - n / 2.0) + (c - n / 2.0 - 2.0 * t) * (c - n / 2.0 - 2.0 * t);
        g.at(t, r, c) = std::exp(-d2 / 30.0 + rng.uniform(-1.0, 1.0));
        sum += g.at(t, r, c);
      }
    }
    for (double& p : g.grid(t)) p /= sum;
  }
  return g;
}

template <decode::DecodedTrajectory (*Decode)(const dist::OccupancyGrids&, const decode::DecodeConfig&)>
void BM_Viterbi(benchmark::State& state) {
  const auto g = smooth_grids(64);
  decode::DecodeConfig cfg;
  cfg.velocity_hat = {0.0, 2.0};
  for (auto _ : state) benchmark::DoNotOptimize(Decode(g, cfg).score);
}

BENCHMARK(BM_Viterbi<decode::viterbi_decode>)->Name("viterbi/parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Viterbi<decode::viterbi_decode_serial>)->Name("viterbi/serial")->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
