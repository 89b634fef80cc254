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

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "topdown/dataset.hpp"
#include "topdown/decoder.hpp"
#include "topdown/error.hpp"
#include "topdown/eval.hpp"
#include "topdown/manifest.hpp"
#include "topdown/nn/model.hpp"
#include "topdown/nn/train.hpp"
#include "topdown/pipeline.hpp"
#include "topdown/predictions.hpp"
#include "topdown/raster.hpp"
#include "topdown/synthgen.hpp"
#include "topdown/viz.hpp"

namespace fs = std::filesystem;
using namespace topdown;

namespace {

[[noreturn]] void fail(const std::string& msg) { throw Error("cli", msg); }

fs::path manifest_path_for(const fs::path& output) {
  fs::path p = output;
  p += ".manifest.json";
  return p;
}

// Options shared by several subcommands.
struct GroupFlags {
  bool no_target = false;
  bool no_others = false;
  bool no_road = false;

  raster::FeatureGroups groups() const { return {!no_target, !no_others, !no_road}; }
};

void add_group_flags(CLI::App* app, GroupFlags& f) {
  app->add_flag("--no-target", f.no_target, "Drop the target entity channels");
  app->add_flag("--no-others", f.no_others, "Drop other entities (boxes and entity channels)");
  app->add_flag("--no-road", f.no_road, "Drop the road map and traffic-light masks");
}

void add_grid_flags(CLI::App* app, pipeline::GridConfig& g) {
  app->add_option("--input-size", g.input_size, "Input raster side in pixels")->capture_default_str();
  app->add_option("--input-extent", g.input_extent, "Input raster side in metres")->capture_default_str();
  app->add_option("--output-size", g.output_size, "Occupancy grid side in cells")->capture_default_str();
  app->add_option("--output-extent", g.output_extent, "Occupancy grid side in metres")->capture_default_str();
}

struct ModelFlags {
  nn::ModelConfig cfg;
  std::string head = "gaussian";
  std::vector<int> widths{32, 64, 64};
  std::vector<int> prior_widths{16, 16};
  bool no_coords = false;

  nn::ModelConfig resolve(const pipeline::GridConfig& g) const {
    nn::ModelConfig c = cfg;
    c.head = nn::head_kind_from_string(head);
    if (widths.size() != 3) fail("--widths takes exactly 3 values");
    if (prior_widths.size() != 2) fail("--prior-widths takes exactly 2 values");
    std::copy(widths.begin(), widths.end(), c.widths.begin());
    std::copy(prior_widths.begin(), prior_widths.end(), c.prior_widths.begin());
    c.coord_channels = !no_coords;
    c.input_size = g.input_size;
    c.grid_size = g.output_size;
    nn::validate(c);
    return c;
  }
};

void add_model_flags(CLI::App* app, ModelFlags& m) {
  app->add_option("--head", m.head, "Output head: gaussian, mixture or grid")->capture_default_str();
  app->add_option("--widths", m.widths, "Encoder stage widths")->delimiter(',')->capture_default_str();
  app->add_option("--latent", m.cfg.latent, "Latent vector size")->capture_default_str();
  app->add_option("--mixture-k", m.cfg.mixture_k, "Mixture components")->capture_default_str();
  app->add_option("--grid-width", m.cfg.grid_width, "Channels of the grid upsampling path")->capture_default_str();
  app->add_option("--prior-widths", m.prior_widths, "Road prior tower widths")->delimiter(',')->capture_default_str();
  app->add_flag("--no-coords", m.no_coords, "Disable coordinate channels");
  app->add_option("--mu-scale", m.cfg.mu_scale, "Metres per unit of regressed means")->capture_default_str();
}

void add_train_flags(CLI::App* app, nn::TrainConfig& t) {
  app->add_option("--lr", t.lr, "Adam learning rate")->capture_default_str();
  app->add_option("--beta1", t.beta1, "Adam beta1")->capture_default_str();
  app->add_option("--beta2", t.beta2, "Adam beta2")->capture_default_str();
  app->add_option("--eps", t.eps, "Adam epsilon")->capture_default_str();
  app->add_option("--batch-size", t.batch_size, "Examples per step")->capture_default_str();
  app->add_option("--epochs", t.epochs, "Adam epochs")->capture_default_str();
  app->add_option("--mse-pretrain-epochs", t.mse_pretrain_epochs, "MSE epochs before Adam")->capture_default_str();
  app->add_option("--sgd-epochs", t.sgd_epochs, "Plain SGD epochs after Adam")->capture_default_str();
  app->add_option("--sgd-lr", t.sgd_lr, "SGD learning rate")->capture_default_str();
  app->add_option("--seed", t.seed, "Initialisation and shuffle seed")->capture_default_str();
  app->add_option("--shards", t.shards, "Data-parallel shards per batch")->capture_default_str();
}

void add_decode_flags(CLI::App* app, decode::DecodeConfig& d, std::vector<double>& velocity) {
  app->add_option("--lambda", d.lambda, "Weight of the constant-velocity penalty")->capture_default_str();
  app->add_option("--cutoff", d.cutoff_cells, "L-infinity cutoff in cells")->capture_default_str();
  app->add_option("--k", d.k, "Trajectories to extract")->capture_default_str();
  app->add_option("--coeffs", d.diversity_coeffs, "Per-step diversity coefficients")
      ->delimiter(',')
      ->capture_default_str();
  app->add_option("--threshold", d.diversity_threshold, "Diversity distance threshold")->capture_default_str();
  app->add_option("--velocity", velocity,
                  "Per-step displacement estimate (row,col) in cells; default: the target's observed velocity")
      ->delimiter(',')
      ->expected(2);
}

std::map<std::string, std::vector<std::string>> collect_flags(const CLI::App* app) {
  std::map<std::string, std::vector<std::string>> flags;
  for (const CLI::Option* opt : app->get_options()) {
    const std::string name = opt->get_name();
    if (name == "--help") continue;
    if (opt->count() > 0) {
      flags[name] = opt->results();
    } else {
      flags[name] = {opt->get_default_str()};
    }
  }
  return flags;
}

std::vector<Trajectory> truths(const std::vector<Scene>& scenes) {
  std::vector<Trajectory> out;
  for (const auto& s : scenes) out.push_back(s.future);
  return out;
}

const Scene& scene_at(const std::vector<Scene>& scenes, std::size_t index) {
  if (index >= scenes.size()) {
    fail("index " + std::to_string(index) + " out of range for a dataset of " + std::to_string(scenes.size()));
  }
  return scenes[index];
}

raster::GridSpec grid_output_spec(const predictions::GridRecord& g) {
  pipeline::GridConfig cfg;
  cfg.output_size = g.grids.size;
  cfg.output_extent = g.extent_m;
  return pipeline::output_spec(cfg);
}

pipeline::GridConfig grid_config_from(const nn::CheckpointMeta& meta) {
  pipeline::GridConfig g;
  g.input_size = meta.input_spec.size_px;
  g.input_extent = meta.input_spec.extent_m;
  g.output_size = meta.output_spec.size_px;
  g.output_extent = meta.output_spec.extent_m;
  return g;
}

// Appends `--key=value` for every config entry whose flag is not already on the
// command line, so explicit flags take precedence.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  std::vector<std::string> out = args;
  for (const auto& [key, value] : read_key_value_file(path)) {
    const std::string flag = "--" + key;
    const bool given = std::any_of(args.begin(), args.end(), [&](const std::string& a) {
      return a == flag || a.rfind(flag + "=", 0) == 0;
    });
    if (!given) out.push_back(flag + "=" + value);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Top-down trajectory prediction: data, training, decoding, evaluation"};
  app.require_subcommand(1);
  std::string config_path;

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a synthetic train/test dataset");
  std::vector<std::string> templates;
  for (auto k : synth::kAllTemplates) templates.emplace_back(synth::to_string(k));
  int n_train = 100, n_test = 20;
  std::uint64_t gen_seed = 0;
  fs::path gen_out;
  gen->add_option("--templates", templates, "Template kinds, cycled in order")->delimiter(',')->capture_default_str();
  gen->add_option("--n-train", n_train, "Training scenes")->capture_default_str();
  gen->add_option("--n-test", n_test, "Test scenes")->capture_default_str();
  gen->add_option("--seed", gen_seed, "Generator seed")->capture_default_str();
  gen->add_option("--out", gen_out, "Output directory")->required();

  // rasterize
  auto* rasterize = app.add_subcommand("rasterize", "Render the input tensor of one scene");
  fs::path ras_dataset, ras_scaling_from, ras_out;
  std::size_t ras_index = 0;
  pipeline::GridConfig ras_grid;
  GroupFlags ras_groups;
  rasterize->add_option("--dataset", ras_dataset, "Dataset file")->required()->check(CLI::ExistingFile);
  rasterize->add_option("--index", ras_index, "Scene line (0-based)")->capture_default_str();
  rasterize->add_option("--scaling-from", ras_scaling_from, "Dataset to fit feature scaling on (default: --dataset)")
      ->check(CLI::ExistingFile);
  rasterize->add_option("--out", ras_out, "Tensor file")->required();
  add_grid_flags(rasterize, ras_grid);
  add_group_flags(rasterize, ras_groups);

  // train
  auto* trainc = app.add_subcommand("train", "Train a model and write a checkpoint");
  fs::path tr_dataset, tr_out, tr_curve;
  pipeline::GridConfig tr_grid;
  ModelFlags tr_model;
  nn::TrainConfig tr_cfg;
  GroupFlags tr_groups;
  trainc->add_option("--train", tr_dataset, "Training dataset")->required()->check(CLI::ExistingFile);
  trainc->add_option("--out", tr_out, "Checkpoint file")->required();
  trainc->add_option("--curve", tr_curve, "Loss curve CSV (default: <out>.curve.csv)");
  add_grid_flags(trainc, tr_grid);
  add_model_flags(trainc, tr_model);
  add_train_flags(trainc, tr_cfg);
  add_group_flags(trainc, tr_groups);

  // predict
  auto* predict = app.add_subcommand("predict", "Run a checkpoint on a dataset");
  fs::path pr_model, pr_dataset, pr_out;
  predict->add_option("--model", pr_model, "Checkpoint file")->required()->check(CLI::ExistingFile);
  predict->add_option("--dataset", pr_dataset, "Dataset file")->required()->check(CLI::ExistingFile);
  predict->add_option("--out", pr_out, "Predictions file")->required();

  // decode
  auto* decodec = app.add_subcommand("decode", "Decode occupancy grids into diverse trajectories");
  fs::path de_grids, de_dataset, de_out;
  decode::DecodeConfig de_cfg;
  de_cfg.k = 5;
  std::vector<double> de_velocity;
  decodec->add_option("--grids", de_grids, "Predictions file holding grids")->required()->check(CLI::ExistingFile);
  decodec->add_option("--dataset", de_dataset, "Dataset the grids were predicted for")->check(CLI::ExistingFile);
  decodec->add_option("--out", de_out, "Trajectory set file")->required();
  add_decode_flags(decodec, de_cfg, de_velocity);

  // eval
  auto* evalc = app.add_subcommand("eval", "Score predictions against ground truth");
  fs::path ev_dataset, ev_preds, ev_out, ev_table, ev_train;
  std::string ev_method;
  int ev_k = 0;
  double ev_threshold = 1.0;
  bool ev_ablation = false;
  pipeline::GridConfig ev_grid;
  ModelFlags ev_model;
  nn::TrainConfig ev_train_cfg;
  decode::DecodeConfig ev_decode;
  std::vector<double> ev_velocity;
  evalc->add_option("--dataset", ev_dataset, "Test dataset")->required()->check(CLI::ExistingFile);
  evalc->add_option("--predictions", ev_preds, "Predictions file")->check(CLI::ExistingFile);
  evalc->add_option("--method", ev_method, "Built-in baseline instead of a predictions file: linear");
  evalc->add_option("--out", ev_out, "CSV report")->required();
  evalc->add_option("--table", ev_table, "Also write the aligned table here (always printed to stdout)");
  evalc->add_option("--top-k", ev_k, "Trajectories used by the oracle metric (0: all)")->capture_default_str();
  evalc->add_option("--hit-threshold", ev_threshold, "Hit radius in metres")->capture_default_str();
  evalc->add_flag("--ablation", ev_ablation, "Train one model per feature set and write the ablation CSV");
  evalc->add_option("--train", ev_train, "Training dataset for --ablation")->check(CLI::ExistingFile);
  add_grid_flags(evalc, ev_grid);
  add_model_flags(evalc, ev_model);
  add_train_flags(evalc, ev_train_cfg);
  evalc->add_option("--decode-k", ev_decode.k, "Trajectories decoded per grid prediction")->capture_default_str();

  // viz
  auto* vizc = app.add_subcommand("viz", "Render a scene and optional predictions to PNG");
  fs::path vz_dataset, vz_preds, vz_out;
  std::size_t vz_index = 0;
  viz::VizOptions vz_opts;
  vizc->add_option("--dataset", vz_dataset, "Dataset file")->required()->check(CLI::ExistingFile);
  vizc->add_option("--index", vz_index, "Scene line (0-based)")->capture_default_str();
  vizc->add_option("--predictions", vz_preds, "Predictions file (mixture or trajectory records)")
      ->check(CLI::ExistingFile);
  vizc->add_option("--out", vz_out, "PNG file")->required();
  vizc->add_option("--size", vz_opts.size_px, "Image side in pixels")->capture_default_str();
  vizc->add_option("--extent", vz_opts.extent_m, "Image side in metres")->capture_default_str();
  vizc->add_option("--min-weight", vz_opts.min_weight, "Hide trajectories at or below this weight")
      ->capture_default_str();

  for (CLI::App* sub : {gen, rasterize, trainc, predict, decodec, evalc, vizc}) {
    sub->add_option("--config", config_path, "key = value file with flag defaults (command line wins)");
  }

  std::vector<std::string> args(argv, argv + argc);
  try {
    args = expand_config(args);
  } catch (const Error& e) {
    std::cerr << "error: " << e.module() << ": " << e.what() << "\n";
    return 2;
  }
  std::vector<char*> cargs;
  for (auto& a : args) cargs.push_back(a.data());

  try {
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const auto start = std::chrono::steady_clock::now();
  CLI::App* sub = app.get_subcommands().front();
  RunManifest manifest;
  manifest.subcommand = sub->get_name();
  manifest.flags = collect_flags(sub);
  if (!config_path.empty()) manifest.config = read_key_value_file(config_path);
  fs::path manifest_path;

  try {
    if (sub == gen) {
      std::vector<synth::TemplateKind> kinds;
      for (const auto& t : templates) kinds.push_back(synth::template_kind_from_string(t));
      if (kinds.empty()) fail("--templates is empty");
      const synth::Split split = synth::generate_split(n_train, n_test, gen_seed, kinds);
      fs::create_directories(gen_out);
      save_dataset(split.train, gen_out / "train.jsonl");
      save_dataset(split.test, gen_out / "test.jsonl");
      manifest.seeds = {gen_seed};
      manifest.outputs = {gen_out / "train.jsonl", gen_out / "test.jsonl"};
      auto mixture = [](const std::vector<synth::ScenarioTemplate>& ts) {
        std::map<std::string, int> counts;
        for (const auto& t : ts) ++counts[std::string(synth::to_string(t.kind))];
        return counts;
      };
      manifest.details["templates"] = templates;
      manifest.details["mixture"] = {{"train", mixture(split.train_templates)},
                                     {"test", mixture(split.test_templates)}};
      manifest_path = gen_out / "manifest.json";
      std::cout << "wrote " << split.train.size() << " train and " << split.test.size() << " test scenes to "
                << gen_out.string() << "\n";
    } else if (sub == rasterize) {
      const auto scenes = load_dataset(ras_dataset);
      const auto fit_on = ras_scaling_from.empty() ? scenes : load_dataset(ras_scaling_from);
      const auto scaling = raster::fit_feature_scaling(fit_on);
      const Scene& scene = scene_at(scenes, ras_index);
      const auto tensor = raster::build_input(scene, pipeline::input_spec(scene, ras_grid), scaling,
                                              ras_groups.groups());
      raster::write_world_tensor(ras_out, tensor);
      manifest.inputs = {ras_dataset};
      if (!ras_scaling_from.empty()) manifest.inputs.push_back(ras_scaling_from);
      manifest.outputs = {ras_out};
      manifest_path = manifest_path_for(ras_out);
    } else if (sub == trainc) {
      const nn::ModelConfig mcfg = tr_model.resolve(tr_grid);
      nn::validate(tr_cfg);
      const auto all = load_dataset(tr_dataset);
      const auto out_spec = pipeline::output_spec(tr_grid);
      const auto scenes = pipeline::filter_in_bounds(all, out_spec);
      if (scenes.empty()) fail("no training scene has its future inside the output grid");
      if (scenes.size() < all.size()) {
        std::cerr << "skipped " << all.size() - scenes.size() << " scenes whose future leaves the output grid\n";
      }
      const auto scaling = raster::fit_feature_scaling(scenes);
      const auto groups = tr_groups.groups();
      const auto examples = pipeline::make_examples(scenes, tr_grid, scaling, groups);
      nn::Model model(mcfg, tr_cfg.seed);
      if (tr_curve.empty()) {
        tr_curve = tr_out;
        tr_curve += ".curve.csv";
      }
      std::ofstream curve(tr_curve);
      if (!curve) fail("cannot write " + tr_curve.string());
      curve << "epoch,phase,mean_loss\n";
      nn::train(model, examples, tr_cfg, [&](const nn::EpochRecord& r) {
        curve << r.epoch << "," << nn::to_string(r.phase) << "," << std::setprecision(17) << r.mean_loss << "\n";
        std::cerr << "epoch " << r.epoch << " " << nn::to_string(r.phase) << " loss " << r.mean_loss << "\n";
      });
      curve.close();
      nn::CheckpointMeta meta;
      meta.input_spec = raster::GridSpec{tr_grid.input_size, tr_grid.input_extent, {0, 0}};
      meta.output_spec = out_spec;
      meta.scaling = scaling;
      meta.groups = groups;
      nn::save_checkpoint(tr_out, model, meta);
      manifest.seeds = {tr_cfg.seed};
      manifest.inputs = {tr_dataset};
      manifest.outputs = {tr_out, tr_curve};
      manifest_path = manifest_path_for(tr_out);
    } else if (sub == predict) {
      nn::CheckpointMeta meta;
      const nn::Model model = nn::load_checkpoint(pr_model, &meta);
      const auto grid = grid_config_from(meta);
      const auto scenes = load_dataset(pr_dataset);
      std::vector<predictions::Record> records;
      for (std::size_t i = 0; i < scenes.size(); ++i) {
        const auto input = nn::to_model_input(
            raster::build_input(scenes[i], pipeline::input_spec(scenes[i], grid), meta.scaling, meta.groups));
        records.push_back(predictions::from_prediction(i, model.predict(input), meta.output_spec));
      }
      predictions::save(pr_out, records);
      manifest.inputs = {pr_model, pr_dataset};
      manifest.outputs = {pr_out};
      manifest_path = manifest_path_for(pr_out);
    } else if (sub == decodec) {
      const auto records = predictions::load(de_grids);
      std::vector<Scene> scenes;
      if (!de_dataset.empty()) scenes = load_dataset(de_dataset);
      if (de_velocity.empty() && de_dataset.empty()) fail("decode needs --dataset or --velocity");
      std::vector<predictions::Record> out;
      for (const auto& r : records) {
        const auto* g = std::get_if<predictions::GridRecord>(&r.payload);
        if (!g) fail("record " + std::to_string(r.index) + " holds no occupancy grids");
        const raster::GridSpec spec = grid_output_spec(*g);
        decode::DecodeConfig cfg = de_cfg;
        if (!de_velocity.empty()) {
          cfg.velocity_hat = {de_velocity[0], de_velocity[1]};
        } else {
          cfg = pipeline::decode_config_for(scene_at(scenes, r.index), spec, de_cfg);
        }
        out.push_back({r.index, predictions::from_decoded(decode::extract_diverse(g->grids, cfg), spec)});
      }
      predictions::save(de_out, out);
      manifest.inputs = {de_grids};
      if (!de_dataset.empty()) manifest.inputs.push_back(de_dataset);
      manifest.outputs = {de_out};
      manifest_path = manifest_path_for(de_out);
    } else if (sub == evalc) {
      const auto test = load_dataset(ev_dataset);
      manifest.inputs = {ev_dataset};
      std::vector<eval::MetricReport> reports;
      if (ev_ablation) {
        if (ev_train.empty()) fail("--ablation needs --train");
        eval::AblationConfig acfg;
        acfg.grid = ev_grid;
        acfg.model = ev_model.resolve(ev_grid);
        acfg.train = ev_train_cfg;
        acfg.decode = ev_decode;
        const auto out_spec = pipeline::output_spec(ev_grid);
        const auto train_scenes = pipeline::filter_in_bounds(load_dataset(ev_train), out_spec);
        const std::vector<raster::FeatureGroups> sets{{true, false, false}, {true, true, false}, {true, true, true}};
        for (auto& run : eval::run_ablation(train_scenes, test, sets, acfg)) reports.push_back(run.report);
        std::ofstream csv(ev_out);
        if (!csv) fail("cannot write " + ev_out.string());
        eval::write_ablation_csv(csv, reports);
        manifest.seeds = {ev_train_cfg.seed};
        manifest.inputs.push_back(ev_train);
      } else {
        std::vector<std::vector<Trajectory>> ranked;
        std::vector<Trajectory> truth;
        std::string method;
        if (!ev_method.empty()) {
          if (!ev_preds.empty()) fail("use either --predictions or --method");
          if (ev_method != "linear") fail("unknown method '" + ev_method + "'");
          method = "linear";
          for (const auto& s : test) ranked.push_back({eval::linear_baseline(s.target())});
          truth = truths(test);
        } else {
          if (ev_preds.empty()) fail("eval needs --predictions or --method");
          method = ev_preds.stem().string();
          for (const auto& r : predictions::load(ev_preds)) {
            ranked.push_back(predictions::ranked(r).trajectories);
            truth.push_back(scene_at(test, r.index).future);
          }
          manifest.inputs.push_back(ev_preds);
        }
        reports.push_back(eval::compute_metrics(ranked, truth, method, ev_k, ev_threshold));
        std::ofstream csv(ev_out);
        if (!csv) fail("cannot write " + ev_out.string());
        eval::write_csv(csv, reports);
      }
      eval::write_table(std::cout, reports);
      manifest.outputs = {ev_out};
      if (!ev_table.empty()) {
        std::ofstream table(ev_table);
        if (!table) fail("cannot write " + ev_table.string());
        eval::write_table(table, reports);
        table.close();
        manifest.outputs.push_back(ev_table);
      }
      manifest_path = manifest_path_for(ev_out);
    } else if (sub == vizc) {
      const auto scenes = load_dataset(vz_dataset);
      const Scene& scene = scene_at(scenes, vz_index);
      std::optional<predictions::Record> record;
      if (!vz_preds.empty()) {
        for (auto& r : predictions::load(vz_preds)) {
          if (r.index == vz_index) record = std::move(r);
        }
        if (!record) fail("no prediction for index " + std::to_string(vz_index));
        manifest.inputs.push_back(vz_preds);
      }
      viz::write_png(vz_out, viz::render(scene, record ? &*record : nullptr, vz_opts));
      manifest.inputs.insert(manifest.inputs.begin(), vz_dataset);
      manifest.outputs = {vz_out};
      manifest_path = manifest_path_for(vz_out);
    }
    manifest.duration_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_manifest(manifest_path, manifest);
  } catch (const Error& e) {
    std::cerr << "error: " << e.module() << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: cli: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
