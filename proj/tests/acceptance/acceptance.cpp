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

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "decoder_oracle.hpp"
#include "golden_cases.hpp"
#include "model_check.hpp"
#include "topdown/dataset.hpp"
#include "topdown/decoder.hpp"
#include "topdown/distributions.hpp"
#include "topdown/error.hpp"
#include "topdown/eval.hpp"
#include "topdown/nn/model.hpp"
#include "topdown/nn/train.hpp"
#include "topdown/pipeline.hpp"
#include "topdown/predictions.hpp"
#include "topdown/synthgen.hpp"

namespace {

using namespace topdown;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---------------------------------------------------------------------------
// Decoder criteria.

struct Instance {
  dist::OccupancyGrids grids;
  decode::DecodeConfig cfg;
};

std::vector<Instance> decoder_instances(int count) {
  Rng rng(2024);
  std::vector<Instance> out;
  for (int i = 0; i < count; ++i) {
    const int n = 2 + static_cast<int>(rng.uniform_int(7));  // 2..8
    const int m = 1 + static_cast<int>(rng.uniform_int(3));  // 1..3
    Instance inst{testing::random_grids(rng, n, m), {}};
    inst.cfg.cutoff_cells = 2;
    inst.cfg.lambda = i % 5 == 0 ? 0.0 : rng.uniform(0.0, 1.0);
    inst.cfg.velocity_hat = {rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)};
    inst.cfg.diversity_coeffs.assign(static_cast<std::size_t>(m), 1.0);
    if (m > 1) inst.cfg.diversity_coeffs[0] = 0.0;
    out.push_back(std::move(inst));
  }
  return out;
}

constexpr int kDecoderInstances = 240;

Outcome criterion_decoder_exact() {
  const auto t0 = Clock::now();
  int checked = 0, infeasible = 0, mismatches = 0;
  for (const auto& inst : decoder_instances(kDecoderInstances)) {
    const auto want = testing::brute_force(inst.grids, inst.cfg);
    if (!want.found) {
      ++infeasible;
      try {
        decode::viterbi_decode(inst.grids, inst.cfg);
        ++mismatches;
      } catch (const Error&) {
      }
      continue;
    }
    const auto got = decode::viterbi_decode(inst.grids, inst.cfg);
    ++checked;
    if (got.cells != want.cells || got.score != want.score) ++mismatches;
  }
  const double secs = seconds_since(t0);
  return {mismatches == 0 && secs < 10.0 && checked + infeasible >= 200,
          fmt("%d instances (%d without a feasible path), %d mismatches, %.2f s", checked + infeasible, infeasible,
              mismatches, secs)};
}

Outcome criterion_diverse_pairs() {
  const auto t0 = Clock::now();
  int pairs = 0, truncated = 0, mismatches = 0, violations = 0, total = 0;
  for (auto inst : decoder_instances(kDecoderInstances)) {
    inst.cfg.k = 2;
    const auto first = testing::brute_force(inst.grids, inst.cfg);
    if (!first.found) continue;
    ++total;
    auto masked = inst.grids;
    const bool ok = testing::mask_and_renormalise(masked, first.cells, inst.cfg);
    const auto second = ok ? testing::brute_force(masked, inst.cfg) : testing::OracleResult{};
    const auto set = decode::extract_diverse(inst.grids, inst.cfg);
    if (set.trajectories.empty() || set.trajectories[0].cells != first.cells) {
      ++mismatches;
      continue;
    }
    if (!second.found) {
      ++truncated;
      if (!set.truncated || set.trajectories.size() != 1) ++mismatches;
      continue;
    }
    ++pairs;
    if (set.trajectories.size() != 2 || set.trajectories[1].cells != second.cells) {
      ++mismatches;
      continue;
    }
    const double d = decode::diversity_distance(set.trajectories[0].cells, set.trajectories[1].cells,
                                                inst.cfg.diversity_coeffs);
    if (!(d > inst.cfg.diversity_threshold)) ++violations;
  }
  return {mismatches == 0 && violations == 0 && total >= 200,
          fmt("%d instances: %d pairs, %d exhausted after one; %d mismatches, %d separation violations, %.2f s", total,
              pairs, truncated, mismatches, violations, seconds_since(t0))};
}

Outcome criterion_decode_speed() {
  Rng rng(10);
  const int n = 64, examples = 20;
  double worst = 0.0, total = 0.0;
  decode::DecodeConfig cfg;
  cfg.cutoff_cells = 5;
  for (int e = 0; e < examples; ++e) {
    // Softmax of smooth random logits, like a trained grid head's output.
    dist::OccupancyGrids g(n, kHorizon);
    const double cr = rng.uniform(10, 54), cc = rng.uniform(10, 54);
    for (int t = 0; t < kHorizon; ++t) {
      double sum = 0.0;
      for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
          const double d2 = (r - cr) * (r - cr) + (c - cc - 2.0 * t) * (c - cc - 2.0 * t);
          const double p = std::exp(-d2 / 30.0 + rng.uniform(-1.0, 1.0));
          g.at(t, r, c) = p;
          sum += p;
        }
      }
      for (double& p : g.grid(t)) p /= sum;
    }
    cfg.velocity_hat = {rng.uniform(-3, 3), rng.uniform(-3, 3)};
    const auto t0 = Clock::now();
    const auto d = decode::viterbi_decode(g, cfg);
    const double ms = 1000.0 * seconds_since(t0);
    if (d.cells.size() != static_cast<std::size_t>(kHorizon)) return {false, "decode returned a short path"};
    worst = std::max(worst, ms);
    total += ms;
  }
  return {worst < 100.0, fmt("G=64, m=5, cutoff 5: mean %.1f ms, worst %.1f ms over %d examples", total / examples,
                             worst, examples)};
}

// ---------------------------------------------------------------------------
// Loss analytics.

Outcome criterion_loss_values() {
  constexpr double kLog2Pi = 1.8378770664093454836;
  struct Check {
    std::string name;
    double got, want;
  };
  std::vector<Check> checks;
  dist::BivariateGaussian unit;
  unit.mu = {3.0, -2.0};
  checks.push_back({"gaussian at mean", dist::gaussian_nll(unit, {3.0, -2.0}), kLog2Pi});
  checks.push_back({"gaussian offset (1,0)", dist::gaussian_nll(unit, {4.0, -2.0}), kLog2Pi + 0.5});
  dist::BivariateGaussian wide = unit;
  wide.log_sigma = {std::log(2.0), std::log(2.0)};
  checks.push_back({"gaussian sigma 2", dist::gaussian_nll(wide, {3.0, -2.0}), kLog2Pi + 2.0 * std::log(2.0)});

  dist::GaussianTrajectory traj{};
  std::array<Vec2, kHorizon> y{};
  for (int t = 0; t < kHorizon; ++t) {
    traj[t].mu = {1.5 * t, -0.5 * t};
    y[t] = traj[t].mu;
  }
  checks.push_back({"trajectory at means", dist::trajectory_nll(traj, y), 5 * kLog2Pi});
  auto y_off = y;
  y_off[2].x += 1.0;
  checks.push_back({"trajectory one offset", dist::trajectory_nll(traj, y_off), 5 * kLog2Pi + 0.5});

  dist::MixtureTrajectories same{{0.5, 0.5}, {traj, traj}};
  checks.push_back({"mixture identical", dist::mixture_nll(same, y_off), dist::trajectory_nll(traj, y_off)});
  dist::GaussianTrajectory other = traj;
  for (auto& g : other) g.mu = g.mu + Vec2{4.0, 1.0};
  dist::MixtureTrajectories onehot{{1.0, 0.0}, {traj, other}};
  checks.push_back({"mixture weights (1,0)", dist::mixture_nll(onehot, y_off), dist::trajectory_nll(traj, y_off)});

  const raster::GridSpec spec{64, 50.0, {}};
  dist::OccupancyGrids uniform(64, kHorizon);
  std::fill(uniform.probs.begin(), uniform.probs.end(), 1.0 / 4096.0);
  const std::array<Vec2, kHorizon> truth{{{1, 0.5}, {2.2, 1}, {3.4, 1.7}, {4.6, 2.1}, {6, 2.4}}};
  checks.push_back({"grid uniform", dist::grid_cross_entropy(uniform, truth, spec), 5 * std::log(4096.0)});
  dist::OccupancyGrids sure(64, kHorizon), half(64, kHorizon);
  for (int t = 0; t < kHorizon; ++t) {
    const auto cell = dist::displacement_cell(truth[t], spec);
    if (!cell) return {false, "truth outside the grid"};
    sure.at(t, cell->row, cell->col) = 1.0;
    half.at(t, cell->row, cell->col) = 0.5;
    half.at(t, 0, 0) = 0.5;
  }
  checks.push_back({"grid certain", dist::grid_cross_entropy(sure, truth, spec), 0.0});
  checks.push_back({"grid half", dist::grid_cross_entropy(half, truth, spec), 5 * std::log(2.0)});

  // The training losses on raw head outputs.
  std::vector<double> raw(5 * kHorizon, 0.0);
  for (int t = 0; t < kHorizon; ++t) {
    raw[5 * t] = y[t].x / 10.0;
    raw[5 * t + 1] = y[t].y / 10.0;
  }
  checks.push_back({"head gaussian", nn::gaussian_nll_loss(nn::constant({25}, raw), y, 10.0)->value[0], 5 * kLog2Pi});
  checks.push_back({"head mse", nn::mse_loss(nn::constant({25}, raw), y, 1, 10.0, false)->value[0], 0.0});
  const std::vector<int> cells{0, 1000, 2080, 4000, 4095};
  checks.push_back({"head grid uniform",
                    nn::grid_ce_loss(nn::constant({5, 1, 64, 64}, std::vector<double>(5 * 4096, 0.0)), cells)->value[0],
                    5 * std::log(4096.0)});

  std::string failed;
  for (const auto& c : checks) {
    const bool ok = c.want == 0.0 ? std::abs(c.got) <= 1e-12 : std::abs(c.got - c.want) <= 1e-9 * std::abs(c.want);
    if (!ok) failed += " " + c.name + fmt("(%.12g vs %.12g)", c.got, c.want);
  }
  return {failed.empty(), fmt("%zu closed-form values at 1e-9 relative", checks.size()) +
                              (failed.empty() ? "" : "; failed:" + failed)};
}

Outcome criterion_gradients() {
  std::string detail;
  bool pass = true;
  for (auto head : {nn::HeadKind::Gaussian, nn::HeadKind::Mixture, nn::HeadKind::Grid}) {
    const auto c = testing::model_grad_check(head);
    const bool ok = c.params <= 2000 && c.max_rel_error < 1e-4 && c.live > c.params / 2;
    pass = pass && ok;
    detail += fmt("%s%s: %zu params, max rel err %.2e", detail.empty() ? "" : "; ",
                  std::string(nn::to_string(head)).c_str(), c.params, c.max_rel_error);
  }
  return {pass, detail};
}

// ---------------------------------------------------------------------------
// Trained-model criteria. One configuration shared by all of them.

constexpr int kTrainScenes = 1600;
constexpr int kTestScenes = 400;
constexpr std::uint64_t kSeeds[] = {1, 2, 3};

pipeline::GridConfig grid_config() { return {32, 50.0, 64, 50.0}; }

nn::ModelConfig model_config(nn::HeadKind head) {
  nn::ModelConfig m;
  m.input_size = 32;
  m.widths = {8, 16, 16};
  m.latent = 64;
  m.head = head;
  m.grid_size = 64;
  return m;
}

nn::TrainConfig train_config(std::uint64_t seed, bool pretrain) {
  nn::TrainConfig t;
  t.lr = 1e-3;
  t.batch_size = 16;
  t.epochs = 4;
  t.mse_pretrain_epochs = pretrain ? 2 : 0;
  t.seed = seed;
  return t;
}

struct SeedRun {
  std::vector<eval::MetricReport> ablation;  // target, target+others, all
  eval::MetricReport linear;
};

std::map<std::uint64_t, synth::Split> g_splits;
std::map<std::uint64_t, SeedRun> g_runs;

const synth::Split& split_for(std::uint64_t seed) {
  auto it = g_splits.find(seed);
  if (it == g_splits.end()) it = g_splits.emplace(seed, synth::generate_split(kTrainScenes, kTestScenes, seed)).first;
  return it->second;
}

const SeedRun& run_for(std::uint64_t seed) {
  if (auto it = g_runs.find(seed); it != g_runs.end()) return it->second;
  const auto& split = split_for(seed);
  eval::AblationConfig cfg;
  cfg.grid = grid_config();
  cfg.model = model_config(nn::HeadKind::Gaussian);
  cfg.train = train_config(seed, true);
  const std::vector<raster::FeatureGroups> sets{{true, false, false}, {true, true, false}, {true, true, true}};
  SeedRun run;
  for (auto& r : eval::run_ablation(split.train, split.test, sets, cfg)) run.ablation.push_back(r.report);
  std::vector<std::vector<Trajectory>> lin;
  std::vector<Trajectory> truth;
  for (const auto& s : split.test) {
    lin.push_back({eval::linear_baseline(s.target())});
    truth.push_back(s.future);
  }
  run.linear = eval::compute_metrics(lin, truth, "linear");
  std::printf("  seed %llu: 5 s L2 target %.3f, +others %.3f, +road %.3f, linear %.3f\n",
              static_cast<unsigned long long>(seed), run.ablation[0].horizons[2].mean_l2,
              run.ablation[1].horizons[2].mean_l2, run.ablation[2].horizons[2].mean_l2,
              run.linear.horizons[2].mean_l2);
  std::fflush(stdout);
  return g_runs.emplace(seed, std::move(run)).first->second;
}

Outcome criterion_overfit() {
  const auto& split = split_for(kSeeds[0]);
  const std::vector<Scene> one{split.train.front()};
  const auto scaling = raster::fit_feature_scaling(split.train);
  const auto examples = pipeline::make_examples(one, grid_config(), scaling, {});
  nn::Model model(model_config(nn::HeadKind::Gaussian), 1);
  nn::TrainConfig tc;
  tc.lr = 1e-3;
  tc.batch_size = 1;
  tc.epochs = 0;
  tc.mse_pretrain_epochs = 500;
  int first_below = -1;
  nn::train(model, examples, tc, [&](const nn::EpochRecord& r) {
    if (first_below < 0 && r.mean_loss < 1e-2) first_below = r.epoch;
  });
  const double mse = nn::evaluate_loss(model, examples, nn::LossKind::Mse);
  return {mse < 1e-2, fmt("MSE after 500 steps %.2e m^2 (first below 1e-2 at step %d)", mse, first_below + 1)};
}

Outcome criterion_ablation() {
  const auto t0 = Clock::now();
  std::array<double, 3> mean{};
  for (auto seed : kSeeds) {
    const auto& run = run_for(seed);
    for (int i = 0; i < 3; ++i) mean[i] += run.ablation[i].horizons[2].mean_l2 / std::size(kSeeds);
  }
  const double secs = seconds_since(t0);
  return {mean[0] > mean[1] && mean[1] > mean[2] && secs <= 900.0,
          fmt("3-seed mean 5 s L2: target %.3f > target+others %.3f > all %.3f m (%d scenes per seed, %.0f s)",
              mean[0], mean[1], mean[2], kTrainScenes + kTestScenes, secs)};
}

Outcome criterion_baseline() {
  double model1 = 0, model5 = 0, lin1 = 0, lin5 = 0;
  for (auto seed : kSeeds) {
    const auto& run = run_for(seed);
    const double w = 1.0 / std::size(kSeeds);
    model1 += w * run.ablation[2].horizons[0].mean_l2;
    model5 += w * run.ablation[2].horizons[2].mean_l2;
    lin1 += w * run.linear.horizons[0].mean_l2;
    lin5 += w * run.linear.horizons[2].mean_l2;
  }
  const bool beats = model5 <= 0.75 * lin5;
  const bool close = lin1 <= 2.0 * model1;
  return {beats && close, fmt("5 s: model %.3f vs linear %.3f (%.0f%% better); 1 s: linear %.3f vs model %.3f", model5,
                              lin5, 100.0 * (1.0 - model5 / lin5), lin1, model1)};
}

Outcome criterion_top_k() {
  const auto t0 = Clock::now();
  const auto& split = split_for(kSeeds[0]);
  const auto gc = grid_config();
  const auto out_spec = pipeline::output_spec(gc);
  const auto train = pipeline::filter_in_bounds(split.train, out_spec);
  const auto test = pipeline::filter_in_bounds(split.test, out_spec);
  const auto scaling = raster::fit_feature_scaling(train);
  nn::Model model(model_config(nn::HeadKind::Grid), kSeeds[0]);
  {
    const auto examples = pipeline::make_examples(train, gc, scaling, {});
    nn::train(model, examples, train_config(kSeeds[0], false));
  }
  decode::DecodeConfig base;
  base.k = 5;
  std::vector<std::vector<Trajectory>> ranked;
  std::vector<Trajectory> truth;
  for (const auto& s : test) {
    const auto input = nn::to_model_input(raster::build_input(s, pipeline::input_spec(s, gc), scaling, {}));
    ranked.push_back(pipeline::rank_prediction(model.predict(input), s, out_spec, base).trajectories);
    truth.push_back(s.future);
  }
  // Oracle over the first k+1 trajectories never exceeds the first k, per example.
  int violations = 0;
  for (std::size_t e = 0; e < ranked.size(); ++e) {
    for (int t = 0; t < kHorizon; ++t) {
      double prev = std::numeric_limits<double>::infinity();
      for (std::size_t k = 1; k <= ranked[e].size(); ++k) {
        double o = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < k; ++i) o = std::min(o, norm(ranked[e][i][t] - truth[e][t]));
        if (o > prev) ++violations;
        prev = o;
      }
    }
  }
  const auto top1 = eval::compute_metrics(ranked, truth, "grid", 1);
  const auto top5 = eval::compute_metrics(ranked, truth, "grid", 5);
  double mean_set = 0.0;
  for (const auto& r : ranked) mean_set += static_cast<double>(r.size()) / ranked.size();
  const double l1 = top1.horizons[2].oracle_l2, l5 = top5.horizons[2].oracle_l2;
  return {l5 < l1 && violations == 0,
          fmt("grid head, %zu test examples, mean set size %.2f: 5 s oracle top-5 %.3f < top-1 %.3f m; %d monotonicity "
              "violations (%.0f s)",
              ranked.size(), mean_set, l5, l1, violations, seconds_since(t0))};
}

// ---------------------------------------------------------------------------
// Determinism and golden files.

std::string file_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string pipeline_artifacts(const fs::path& dir) {
  fs::create_directories(dir);
  const auto split = synth::generate_split(24, 6, 77);
  save_dataset(split.train, dir / "train.jsonl");
  save_dataset(split.test, dir / "test.jsonl");
  pipeline::GridConfig gc{32, 50.0, 16, 40.0};
  const auto out_spec = pipeline::output_spec(gc);
  const auto train = pipeline::filter_in_bounds(load_dataset(dir / "train.jsonl"), out_spec);
  const auto test = pipeline::filter_in_bounds(load_dataset(dir / "test.jsonl"), out_spec);
  const auto scaling = raster::fit_feature_scaling(train);
  raster::write_world_tensor(dir / "tensor.bin",
                             raster::build_input(test.front(), pipeline::input_spec(test.front(), gc), scaling, {}));
  nn::ModelConfig mc = model_config(nn::HeadKind::Grid);
  mc.widths = {4, 4, 4};
  mc.latent = 16;
  mc.grid_size = 16;
  mc.grid_width = 4;
  mc.prior_widths = {4, 4};
  nn::Model model(mc, 7);
  nn::TrainConfig tc = train_config(7, false);
  tc.epochs = 2;
  tc.shards = 2;
  nn::train(model, pipeline::make_examples(train, gc, scaling, {}), tc);
  nn::save_checkpoint(dir / "model.tdpm", model, {pipeline::input_spec(test.front(), gc), out_spec, scaling, {}});
  const nn::Model loaded = nn::load_checkpoint(dir / "model.tdpm");
  std::vector<predictions::Record> grids, decoded;
  decode::DecodeConfig base;
  base.k = 3;
  std::vector<std::vector<Trajectory>> ranked;
  std::vector<Trajectory> truth;
  for (std::size_t i = 0; i < test.size(); ++i) {
    const auto input = nn::to_model_input(raster::build_input(test[i], pipeline::input_spec(test[i], gc), scaling, {}));
    const auto pred = loaded.predict(input);
    grids.push_back(predictions::from_prediction(i, pred, out_spec));
    const auto set = decode::extract_diverse(std::get<dist::OccupancyGrids>(pred),
                                             pipeline::decode_config_for(test[i], out_spec, base));
    decoded.push_back({i, predictions::from_decoded(set, out_spec)});
    ranked.push_back(predictions::ranked(decoded.back()).trajectories);
    truth.push_back(test[i].future);
  }
  predictions::save(dir / "grids.jsonl", grids);
  predictions::save(dir / "decoded.jsonl", decoded);
  {
    std::ofstream csv(dir / "report.csv");
    const std::vector<eval::MetricReport> reps{eval::compute_metrics(ranked, truth, "grid", 3)};
    eval::write_csv(csv, reps);
  }
  std::string all;
  for (const char* f : {"train.jsonl", "test.jsonl", "tensor.bin", "model.tdpm", "grids.jsonl", "decoded.jsonl",
                        "report.csv"}) {
    all += file_bytes(dir / f);
  }
  return all;
}

Outcome criterion_determinism(const fs::path& work) {
  const auto a = pipeline_artifacts(work / "run_a");
  const auto b = pipeline_artifacts(work / "run_b");
  const bool repro = a == b && !a.empty();
  const fs::path golden = TOPDOWN_GOLDEN_DIR;
  testing::write_golden_dataset(work / "scene.jsonl");
  testing::write_golden_tensor(work / "tensor_32.bin");
  testing::write_golden_png(golden / "scene.jsonl", work / "viz_160.png");
  std::string mismatched;
  for (const char* f : {"scene.jsonl", "tensor_32.bin", "viz_160.png"}) {
    if (file_bytes(work / f) != file_bytes(golden / f) || file_bytes(golden / f).empty()) mismatched += std::string(" ") + f;
  }
  return {repro && mismatched.empty(),
          fmt("pipeline rerun %s (%zu bytes of artifacts); golden files %s", repro ? "bit-identical" : "DIFFERS",
              a.size(), mismatched.empty() ? "byte-exact" : ("differ:" + mismatched).c_str())};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::vector<int> only;
  std::string work = (fs::temp_directory_path() / "topdown_acceptance").string();
  app.add_option("--only", only, "Run only these criteria (1-10)")->delimiter(',');
  app.add_option("--work", work, "Scratch directory")->capture_default_str();
  CLI11_PARSE(app, argc, argv);
  fs::remove_all(work);
  fs::create_directories(work);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"decoder exactness vs exhaustive enumeration", criterion_decoder_exact},
      {"diverse pairs vs brute-force masking oracle", criterion_diverse_pairs},
      {"closed-form loss values", criterion_loss_values},
      {"end-to-end finite-difference gradients", criterion_gradients},
      {"single-example overfit", criterion_overfit},
      {"feature ablation ordering", criterion_ablation},
      {"linear baseline crossover", criterion_baseline},
      {"grid top-5 oracle beats top-1", criterion_top_k},
      {"determinism and golden files", [&] { return criterion_determinism(work); }},
      {"full-size decode under 100 ms", criterion_decode_speed},
  };
  const std::set<int> selected(only.begin(), only.end());
  const auto t0 = Clock::now();
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    const auto start = Clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s criterion %d: %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first.c_str(),
                o.detail.c_str(), seconds_since(start));
    std::fflush(stdout);
  }
  std::printf("acceptance: %d failed, total %.1f s\n", failures, seconds_since(t0));
  return failures == 0 ? 0 : 1;
}
