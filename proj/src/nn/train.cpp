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

#include "topdown/nn/train.hpp"

#include <cmath>
#include <exception>
#include <numeric>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

#include "topdown/error.hpp"
#include "topdown/rng.hpp"

namespace topdown::nn {
namespace {

[[noreturn]] void fail(const std::string& msg) { throw Error("nnet", msg); }

// Every example allocates a fresh graph with multi-megabyte buffers. Keeping
// them on the heap instead of one mmap per buffer halves the step time.
void keep_buffers_on_heap() {
#if defined(__GLIBC__)
  static const bool once = [] {
    mallopt(M_MMAP_THRESHOLD, 256 << 20);
    mallopt(M_TRIM_THRESHOLD, 512 << 20);
    return true;
  }();
  (void)once;
#endif
}

struct Adam {
  std::vector<std::vector<double>> m, v;
  long long t = 0;

  explicit Adam(const Model& model) {
    for (const auto& p : model.parameters()) {
      m.emplace_back(p->size(), 0.0);
      v.emplace_back(p->size(), 0.0);
    }
  }

  void step(Model& model, const TrainConfig& cfg) {
    ++t;
    const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
    const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
    const auto& params = model.parameters();
    for (std::size_t i = 0; i < params.size(); ++i) {
      Node& p = *params[i];
      for (std::size_t j = 0; j < p.size(); ++j) {
        const double g = p.grad[j];
        m[i][j] = cfg.beta1 * m[i][j] + (1.0 - cfg.beta1) * g;
        v[i][j] = cfg.beta2 * v[i][j] + (1.0 - cfg.beta2) * g * g;
        p.value[j] -= cfg.lr * (m[i][j] / c1) / (std::sqrt(v[i][j] / c2) + cfg.eps);
      }
    }
  }
};

void sgd_step(Model& model, double lr) {
  for (const auto& p : model.parameters()) {
    for (std::size_t j = 0; j < p->size(); ++j) p->value[j] -= lr * p->grad[j];
  }
}

// Forward + backward of one example; returns its loss.
double accumulate(const Model& model, const Example& ex, LossKind kind) {
  const Var loss = model.loss(model.forward_raw(ex.input), ex.target, kind);
  backward(loss);
  return loss->value[0];
}

void check_outputs(const Model& model, const Example& ex) {
  const Prediction pred = model.predict(ex.input);
  if (const auto* mix = std::get_if<dist::MixtureTrajectories>(&pred)) dist::validate(*mix);
  if (const auto* grids = std::get_if<dist::OccupancyGrids>(&pred)) dist::validate(*grids);
  if (const auto* g = std::get_if<dist::GaussianTrajectory>(&pred)) {
    for (const auto& p : *g) dist::validate(p);
  }
}

}  // namespace

void validate(const TrainConfig& cfg) {
  if (!(cfg.lr >= 0.0) || !(cfg.sgd_lr >= 0.0)) fail("learning rates must be non-negative");
  if (cfg.batch_size < 1) fail("batch size must be at least 1");
  if (cfg.epochs < 0 || cfg.mse_pretrain_epochs < 0 || cfg.sgd_epochs < 0) fail("epoch counts must be non-negative");
  if (cfg.shards < 1) fail("shards must be at least 1");
  if (!(cfg.beta1 >= 0.0 && cfg.beta1 < 1.0 && cfg.beta2 >= 0.0 && cfg.beta2 < 1.0)) fail("Adam betas must lie in [0, 1)");
}

std::string_view to_string(Phase p) {
  switch (p) {
    case Phase::MsePretrain: return "mse_pretrain";
    case Phase::Adam: return "adam";
    case Phase::Sgd: return "sgd";
  }
  return "unknown";
}

std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed, std::uint64_t epoch) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng = Rng::substream(seed, "shuffle", epoch);
  for (std::size_t i = n; i > 1; --i) std::swap(idx[i - 1], idx[rng.uniform_int(i)]);
  return idx;
}

double evaluate_loss(const Model& model, std::span<const Example> data, LossKind kind) {
  if (data.empty()) fail("cannot evaluate on an empty dataset");
  double total = 0.0;
  for (const auto& ex : data) total += model.loss(model.forward_raw(ex.input), ex.target, kind)->value[0];
  return total / static_cast<double>(data.size());
}

TrainReport train(Model& model, std::span<const Example> data, const TrainConfig& cfg, const EpochCallback& on_epoch) {
  validate(cfg);
  if (data.empty()) fail("training set is empty");
  keep_buffers_on_heap();
  const bool grid = model.config().head == HeadKind::Grid;
  const int pretrain = grid ? 0 : cfg.mse_pretrain_epochs;

  std::vector<Model> replicas;
  for (int s = 1; s < cfg.shards; ++s) replicas.push_back(model);

  Adam adam(model);
  TrainReport report;
  std::vector<double> losses(data.size());
  const int total_epochs = pretrain + cfg.epochs + cfg.sgd_epochs;
  for (int epoch = 0; epoch < total_epochs; ++epoch) {
    const Phase phase = epoch < pretrain ? Phase::MsePretrain
                        : epoch < pretrain + cfg.epochs ? Phase::Adam
                                                        : Phase::Sgd;
    const LossKind kind = phase == Phase::MsePretrain ? LossKind::Mse : LossKind::Likelihood;
    const auto order = shuffled_indices(data.size(), cfg.seed, static_cast<std::uint64_t>(epoch));

    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      try {
        model.zero_grad();
        if (cfg.shards == 1) {
          for (std::size_t j = start; j < end; ++j) losses[order[j]] = accumulate(model, data[order[j]], kind);
        } else {
          std::vector<std::exception_ptr> errors(cfg.shards);
          for (auto& r : replicas) {
            r.copy_values_from(model);
            r.zero_grad();
          }
#pragma omp parallel for schedule(static, 1)
          for (int s = 0; s < cfg.shards; ++s) {
            try {
              Model& m = s == 0 ? model : replicas[s - 1];
              for (std::size_t j = start + s; j < end; j += cfg.shards) {
                losses[order[j]] = accumulate(m, data[order[j]], kind);
              }
            } catch (...) {
              errors[s] = std::current_exception();
            }
          }
          for (auto& e : errors) {
            if (e) std::rethrow_exception(e);
          }
          const auto& params = model.parameters();
          for (const auto& r : replicas) {
            for (std::size_t i = 0; i < params.size(); ++i) {
              auto& g = params[i]->grad;
              const auto& rg = r.parameters()[i]->grad;
              for (std::size_t j = 0; j < g.size(); ++j) g[j] += rg[j];
            }
          }
        }
        const double inv = 1.0 / static_cast<double>(end - start);
        for (const auto& p : model.parameters()) {
          for (double& g : p->grad) g *= inv;
        }
        if (phase == Phase::Sgd) {
          sgd_step(model, cfg.sgd_lr);
        } else {
          adam.step(model, cfg);
        }
      } catch (const Error& e) {
        fail("training diverged at epoch " + std::to_string(epoch) + ": " + e.what());
      }
      ++report.steps;
    }

    double total = 0.0;
    for (double l : losses) total += l;
    const EpochRecord rec{epoch, phase, total / static_cast<double>(losses.size())};
    if (!std::isfinite(rec.mean_loss)) fail("training diverged at epoch " + std::to_string(epoch) + " (loss is not finite)");
    for (const auto& p : model.parameters()) {
      for (double v : p->value) {
        if (!std::isfinite(v)) fail("parameter '" + p->op + "' became non-finite at epoch " + std::to_string(epoch));
      }
    }
    check_outputs(model, data.front());
    report.curve.push_back(rec);
    if (on_epoch) on_epoch(rec);
  }
  return report;
}

}  // namespace topdown::nn
