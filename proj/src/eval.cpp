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

#include "topdown/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "topdown/error.hpp"

namespace topdown::eval {
namespace {

[[noreturn]] void fail(const std::string& msg) { throw Error("eval", msg); }

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string groups_label(const raster::FeatureGroups& g) {
  std::string s;
  auto add = [&](bool on, const char* name) {
    if (!on) return;
    if (!s.empty()) s += "+";
    s += name;
  };
  add(g.target, "target");
  add(g.others, "others");
  add(g.road, "road");
  return s.empty() ? "none" : s;
}

}  // namespace

Trajectory linear_baseline(const EntityState& s) {
  if (!finite(s.velocity) || !finite(s.acceleration)) fail("linear baseline needs a finite state");
  Trajectory out;
  for (int i = 0; i < kHorizon; ++i) {
    const double tau = (i + 1) * kFutureStep;
    out[i] = tau * s.velocity + (0.5 * tau * tau) * s.acceleration;
  }
  return out;
}

MetricReport compute_metrics(std::span<const std::vector<Trajectory>> ranked, std::span<const Trajectory> truth,
                             const std::string& method, int k, double hit_threshold) {
  if (ranked.size() != truth.size()) {
    fail("have " + std::to_string(ranked.size()) + " predictions for " + std::to_string(truth.size()) + " examples");
  }
  if (truth.empty()) fail("no examples to evaluate");
  MetricReport rep;
  rep.method = method;
  rep.n_examples = static_cast<int>(truth.size());
  rep.k = k;
  double sq = 0.0;
  for (std::size_t h = 0; h < kReportHorizons.size(); ++h) rep.horizons[h].seconds = kReportHorizons[h];
  for (std::size_t e = 0; e < truth.size(); ++e) {
    const auto& set = ranked[e];
    if (set.empty()) fail("example " + std::to_string(e) + " has no predicted trajectory");
    const std::size_t kk = k > 0 ? std::min<std::size_t>(k, set.size()) : set.size();
    for (int t = 0; t < kHorizon; ++t) {
      const Vec2 d = set[0][t] - truth[e][t];
      sq += dot(d, d);
    }
    for (std::size_t h = 0; h < kReportHorizons.size(); ++h) {
      const int t = kReportHorizons[h] - 1;
      const double l2 = norm(set[0][t] - truth[e][t]);
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < kk; ++i) best = std::min(best, norm(set[i][t] - truth[e][t]));
      rep.horizons[h].mean_l2 += l2;
      rep.horizons[h].hit_rate += l2 <= hit_threshold ? 1.0 : 0.0;
      rep.horizons[h].oracle_l2 += best;
    }
  }
  const double n = static_cast<double>(truth.size());
  rep.rmse = std::sqrt(sq / (n * kHorizon));
  for (auto& h : rep.horizons) {
    h.mean_l2 /= n;
    h.hit_rate /= n;
    h.oracle_l2 /= n;
  }
  return rep;
}

void write_csv(std::ostream& out, std::span<const MetricReport> reports) {
  out << "method,features,n,k,rmse";
  for (int s : kReportHorizons) out << ",l2_" << s << "s,hit_" << s << "s,oracle_" << s << "s";
  out << "\n";
  for (const auto& r : reports) {
    out << r.method << "," << groups_label(r.groups) << "," << r.n_examples << "," << r.k << "," << fixed(r.rmse, 6);
    for (const auto& h : r.horizons) {
      out << "," << fixed(h.mean_l2, 6) << "," << fixed(h.hit_rate, 6) << "," << fixed(h.oracle_l2, 6);
    }
    out << "\n";
  }
}

void write_table(std::ostream& out, std::span<const MetricReport> reports) {
  char line[256];
  std::snprintf(line, sizeof line, "%-12s %-20s %6s %3s %7s", "method", "features", "n", "k", "RMSE");
  out << line;
  for (int s : kReportHorizons) {
    std::snprintf(line, sizeof line, " %7s %7s %7s", ("L2@" + std::to_string(s) + "s").c_str(),
                  ("hit@" + std::to_string(s) + "s").c_str(), ("orc@" + std::to_string(s) + "s").c_str());
    out << line;
  }
  out << "\n";
  for (const auto& r : reports) {
    std::snprintf(line, sizeof line, "%-12s %-20s %6d %3d %7.2f", r.method.c_str(), groups_label(r.groups).c_str(),
                  r.n_examples, r.k, r.rmse);
    out << line;
    for (const auto& h : r.horizons) {
      std::snprintf(line, sizeof line, " %7.2f %7.2f %7.2f", h.mean_l2, h.hit_rate, h.oracle_l2);
      out << line;
    }
    out << "\n";
  }
}

std::vector<AblationRun> run_ablation(std::span<const Scene> train, std::span<const Scene> test,
                                      std::span<const raster::FeatureGroups> flag_sets, const AblationConfig& cfg) {
  if (flag_sets.empty()) fail("ablation needs at least one feature set");
  const raster::FeatureScaling scaling = raster::fit_feature_scaling(train);
  const raster::GridSpec out_spec = pipeline::output_spec(cfg.grid);
  std::vector<Trajectory> truth;
  for (const auto& s : test) truth.push_back(s.future);

  std::vector<AblationRun> runs;
  for (const auto& groups : flag_sets) {
    nn::Model model(cfg.model, cfg.train.seed);
    {
      const auto examples = pipeline::make_examples(train, cfg.grid, scaling, groups);
      nn::train(model, examples, cfg.train);
    }
    AblationRun run;
    for (const auto& s : test) {
      const auto input = nn::to_model_input(raster::build_input(s, pipeline::input_spec(s, cfg.grid), scaling, groups));
      run.ranked.push_back(pipeline::rank_prediction(model.predict(input), s, out_spec, cfg.decode).trajectories);
    }
    run.report = compute_metrics(run.ranked, truth, std::string(nn::to_string(cfg.model.head)), cfg.decode.k);
    run.report.groups = groups;
    runs.push_back(std::move(run));
  }
  return runs;
}

void write_ablation_csv(std::ostream& out, std::span<const MetricReport> reports) {
  out << "target,others,road,method,n,rmse";
  for (int s : kReportHorizons) out << ",l2_" << s << "s";
  for (int s : kReportHorizons) out << ",hit_" << s << "s";
  out << "\n";
  for (const auto& r : reports) {
    out << (r.groups.target ? "x" : "") << "," << (r.groups.others ? "x" : "") << "," << (r.groups.road ? "x" : "")
        << "," << r.method << "," << r.n_examples << "," << fixed(r.rmse, 6);
    for (const auto& h : r.horizons) out << "," << fixed(h.mean_l2, 6);
    for (const auto& h : r.horizons) out << "," << fixed(h.hit_rate, 6);
    out << "\n";
  }
}

}  // namespace topdown::eval
