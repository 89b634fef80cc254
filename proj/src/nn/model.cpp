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

#include "topdown/nn/model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "topdown/error.hpp"
#include "topdown/raster_json.hpp"
#include "topdown/rng.hpp"

namespace topdown::nn {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw Error("nnet", msg); }

constexpr int kGaussianBlock = 5 * kHorizon;
constexpr double kLog2Pi = 1.8378770664093454836;
constexpr int kGridSeed = 4;  // spatial size of the first decoder feature map

int stride2(int n) { return (n - 1) / 2 + 1; }

// NLL of one Gaussian trajectory block; writes dNLL/draw when `grad` is set.
double gaussian_block(const double* r, std::span<const Vec2> y, double mu_scale, double* grad) {
  double total = 0.0;
  for (int t = 0; t < kHorizon; ++t) {
    const double* p = r + 5 * t;
    const double th = std::tanh(p[4]);
    const bool clamped = std::abs(th) > dist::kRhoLimit;
    const double rho = std::clamp(th, -dist::kRhoLimit, dist::kRhoLimit);
    const double inv_sx = std::exp(-p[2]);
    const double inv_sy = std::exp(-p[3]);
    const double zx = (y[t].x - mu_scale * p[0]) * inv_sx;
    const double zy = (y[t].y - mu_scale * p[1]) * inv_sy;
    const double om = 1.0 - rho * rho;
    const double q = zx * zx + zy * zy - 2.0 * rho * zx * zy;
    total += kLog2Pi + p[2] + p[3] + 0.5 * std::log(om) + 0.5 * q / om;
    if (grad) {
      double* g = grad + 5 * t;
      const double dzx = (zx - rho * zy) / om;
      const double dzy = (zy - rho * zx) / om;
      g[0] = -dzx * inv_sx * mu_scale;
      g[1] = -dzy * inv_sy * mu_scale;
      g[2] = 1.0 - dzx * zx;
      g[3] = 1.0 - dzy * zy;
      const double drho = -rho / om - zx * zy / om + rho * q / (om * om);
      g[4] = clamped ? 0.0 : drho * (1.0 - th * th);
    }
  }
  return total;
}

double block_mse(const double* r, std::span<const Vec2> y, double mu_scale) {
  double acc = 0.0;
  for (int t = 0; t < kHorizon; ++t) {
    const double dx = mu_scale * r[5 * t] - y[t].x;
    const double dy = mu_scale * r[5 * t + 1] - y[t].y;
    acc += dx * dx + dy * dy;
  }
  return acc / kHorizon;
}

Var scalar_loss(const Var& raw, double value, std::vector<double> grad, const char* op) {
  auto out = std::make_shared<Node>();
  out->shape = {1};
  out->value = {value};
  out->op = op;
  out->inputs = {raw};
  out->requires_grad = raw->requires_grad;
  out->backward_fn = [grad = std::move(grad)](Node& self) {
    auto& g = self.inputs[0]->ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[0] * grad[i];
  };
  return out;
}

void check_target(std::span<const Vec2> y) {
  if (y.size() != static_cast<std::size_t>(kHorizon)) {
    fail("expected " + std::to_string(kHorizon) + " target displacements, got " + std::to_string(y.size()));
  }
}

void put_u32(std::ostream& out, std::uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                              static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) fail("checkpoint truncated");
  return b[0] | (b[1] << 8) | (b[2] << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

}  // namespace

std::string_view to_string(HeadKind h) {
  switch (h) {
    case HeadKind::Gaussian: return "gaussian";
    case HeadKind::Mixture: return "mixture";
    case HeadKind::Grid: return "grid";
  }
  return "unknown";
}

HeadKind head_kind_from_string(std::string_view s) {
  if (s == "gaussian") return HeadKind::Gaussian;
  if (s == "mixture") return HeadKind::Mixture;
  if (s == "grid") return HeadKind::Grid;
  fail("unknown head '" + std::string(s) + "'");
}

void validate(const ModelConfig& cfg) {
  if (cfg.input_frames < 3) fail("input_frames must be at least 3");
  if (cfg.input_size < 8) fail("input_size must be at least 8");
  for (int w : cfg.widths) {
    if (w <= 0) fail("encoder widths must be positive");
  }
  for (int w : cfg.prior_widths) {
    if (w <= 0) fail("prior widths must be positive");
  }
  if (cfg.latent <= 0 || cfg.grid_width <= 0) fail("latent and grid widths must be positive");
  if (cfg.mixture_k < 1) fail("mixture k must be at least 1");
  int g = cfg.grid_size;
  while (g > kGridSeed && g % 2 == 0) g /= 2;
  if (g != kGridSeed || cfg.grid_size < 2 * kGridSeed) fail("grid_size must be 4 * 2^n with n >= 1");
  if (!(cfg.mu_scale > 0.0)) fail("mu_scale must be positive");
}

json to_json(const ModelConfig& cfg) {
  return {{"input_frames", cfg.input_frames}, {"input_size", cfg.input_size},   {"widths", cfg.widths},
          {"latent", cfg.latent},             {"head", to_string(cfg.head)},     {"mixture_k", cfg.mixture_k},
          {"grid_size", cfg.grid_size},       {"grid_width", cfg.grid_width},   {"prior_widths", cfg.prior_widths},
          {"coord_channels", cfg.coord_channels}, {"mu_scale", cfg.mu_scale}};
}

ModelConfig model_config_from_json(const json& j) {
  ModelConfig c;
  try {
    c.input_frames = j.at("input_frames").get<int>();
    c.input_size = j.at("input_size").get<int>();
    c.widths = j.at("widths").get<std::array<int, 3>>();
    c.latent = j.at("latent").get<int>();
    c.head = head_kind_from_string(j.at("head").get<std::string>());
    c.mixture_k = j.at("mixture_k").get<int>();
    c.grid_size = j.at("grid_size").get<int>();
    c.grid_width = j.at("grid_width").get<int>();
    c.prior_widths = j.at("prior_widths").get<std::array<int, 2>>();
    c.coord_channels = j.at("coord_channels").get<bool>();
    c.mu_scale = j.at("mu_scale").get<double>();
  } catch (const json::exception& e) {
    fail(std::string("bad model config: ") + e.what());
  }
  validate(c);
  return c;
}

int raw_output_size(const ModelConfig& cfg) {
  switch (cfg.head) {
    case HeadKind::Gaussian: return kGaussianBlock;
    case HeadKind::Mixture: return cfg.mixture_k * (1 + kGaussianBlock);
    case HeadKind::Grid: return kHorizon * cfg.grid_size * cfg.grid_size;
  }
  return 0;
}

dist::GaussianTrajectory gaussian_from_raw(std::span<const double> raw, double mu_scale) {
  if (raw.size() < static_cast<std::size_t>(kGaussianBlock)) fail("raw Gaussian block too short");
  dist::GaussianTrajectory out;
  for (int t = 0; t < kHorizon; ++t) {
    const double* p = raw.data() + 5 * t;
    out[t].mu = {mu_scale * p[0], mu_scale * p[1]};
    out[t].log_sigma = {p[2], p[3]};
    out[t].rho = dist::rho_from_raw(p[4]);
  }
  return out;
}

dist::MixtureTrajectories mixture_from_raw(std::span<const double> raw, int k, double mu_scale) {
  if (raw.size() != static_cast<std::size_t>(k * (1 + kGaussianBlock))) fail("raw mixture size mismatch");
  dist::MixtureTrajectories mix;
  const double top = *std::max_element(raw.begin(), raw.begin() + k);
  double sum = 0.0;
  for (int i = 0; i < k; ++i) {
    mix.weights.push_back(std::exp(raw[i] - top));
    sum += mix.weights.back();
  }
  for (double& w : mix.weights) w /= sum;
  for (int i = 0; i < k; ++i) mix.components.push_back(gaussian_from_raw(raw.subspan(k + kGaussianBlock * i), mu_scale));
  return mix;
}

dist::OccupancyGrids grids_from_logits(std::span<const double> logits, int steps, int size) {
  dist::OccupancyGrids g(size, steps);
  if (logits.size() != g.probs.size()) fail("grid logits size mismatch");
  const std::size_t plane = g.cells();
  for (int t = 0; t < steps; ++t) {
    const auto in = logits.subspan(t * plane, plane);
    const double top = *std::max_element(in.begin(), in.end());
    double sum = 0.0;
    auto out = g.grid(t);
    for (std::size_t i = 0; i < plane; ++i) {
      out[i] = std::exp(in[i] - top);
      sum += out[i];
    }
    for (double& p : out) p /= sum;
  }
  return g;
}

Var gaussian_nll_loss(const Var& raw, std::span<const Vec2> y, double mu_scale) {
  check_target(y);
  if (raw->size() != static_cast<std::size_t>(kGaussianBlock)) fail("gaussian_nll: raw size mismatch");
  std::vector<double> grad(raw->size());
  const double v = gaussian_block(raw->value.data(), y, mu_scale, grad.data());
  return scalar_loss(raw, v, std::move(grad), "gaussian_nll");
}

Var mixture_nll_loss(const Var& raw, std::span<const Vec2> y, int k, double mu_scale) {
  check_target(y);
  if (raw->size() != static_cast<std::size_t>(k * (1 + kGaussianBlock))) fail("mixture_nll: raw size mismatch");
  const double* r = raw->value.data();
  const double ltop = *std::max_element(r, r + k);
  double lsum = 0.0;
  for (int i = 0; i < k; ++i) lsum += std::exp(r[i] - ltop);
  const double log_norm = ltop + std::log(lsum);

  std::vector<double> grad(raw->size(), 0.0);
  std::vector<double> a(k);
  for (int i = 0; i < k; ++i) {
    a[i] = (r[i] - log_norm) - gaussian_block(r + k + kGaussianBlock * i, y, mu_scale, grad.data() + k + kGaussianBlock * i);
  }
  const double atop = *std::max_element(a.begin(), a.end());
  double asum = 0.0;
  for (double v : a) asum += std::exp(v - atop);
  const double lse = atop + std::log(asum);
  for (int i = 0; i < k; ++i) {
    const double gamma = std::exp(a[i] - lse);
    const double w = std::exp(r[i] - log_norm);
    grad[i] = w - gamma;
    double* g = grad.data() + k + kGaussianBlock * i;
    for (int j = 0; j < kGaussianBlock; ++j) g[j] *= gamma;
  }
  return scalar_loss(raw, -lse, std::move(grad), "mixture_nll");
}

Var mse_loss(const Var& raw, std::span<const Vec2> y, int k, double mu_scale, bool mixture) {
  check_target(y);
  const int offset = mixture ? k : 0;
  const int comps = mixture ? k : 1;
  if (raw->size() != static_cast<std::size_t>(offset + comps * kGaussianBlock)) fail("mse: raw size mismatch");
  int best = 0;
  double best_v = std::numeric_limits<double>::infinity();
  for (int i = 0; i < comps; ++i) {
    const double v = block_mse(raw->value.data() + offset + kGaussianBlock * i, y, mu_scale);
    if (v < best_v) {
      best_v = v;
      best = i;
    }
  }
  std::vector<double> grad(raw->size(), 0.0);
  const double* r = raw->value.data() + offset + kGaussianBlock * best;
  double* g = grad.data() + offset + kGaussianBlock * best;
  for (int t = 0; t < kHorizon; ++t) {
    g[5 * t] = 2.0 * (mu_scale * r[5 * t] - y[t].x) * mu_scale / kHorizon;
    g[5 * t + 1] = 2.0 * (mu_scale * r[5 * t + 1] - y[t].y) * mu_scale / kHorizon;
  }
  return scalar_loss(raw, best_v, std::move(grad), "mse");
}

Var grid_ce_loss(const Var& logits, std::span<const int> cells) {
  if (logits->shape.size() != 4 || logits->shape[1] != 1) fail("grid_ce: logits must be [m,1,G,G]");
  const int m = logits->shape[0];
  if (static_cast<int>(cells.size()) != m) fail("grid_ce: expected one target cell per timestep");
  const std::size_t plane = static_cast<std::size_t>(logits->shape[2]) * logits->shape[3];
  std::vector<double> grad(logits->size());
  double loss = 0.0;
  for (int t = 0; t < m; ++t) {
    if (cells[t] < 0 || static_cast<std::size_t>(cells[t]) >= plane) {
      fail("grid_ce: target cell at timestep " + std::to_string(t) + " is outside the output grid");
    }
    const double* l = logits->value.data() + t * plane;
    const double top = *std::max_element(l, l + plane);
    double sum = 0.0;
    for (std::size_t i = 0; i < plane; ++i) sum += std::exp(l[i] - top);
    const double lse = top + std::log(sum);
    loss += lse - l[cells[t]];
    double* g = grad.data() + t * plane;
    for (std::size_t i = 0; i < plane; ++i) g[i] = std::exp(l[i] - lse);
    g[cells[t]] -= 1.0;
  }
  return scalar_loss(logits, loss, std::move(grad), "grid_cross_entropy");
}

ModelInput to_model_input(const raster::WorldTensor& t) {
  ModelInput in;
  in.shape = {raster::kNumChannels, t.frames, t.size, t.size};
  in.values.resize(t.values.size());
  const std::size_t plane = static_cast<std::size_t>(t.size) * t.size;
  const std::size_t volume = plane * t.frames;
  std::size_t src = 0;
  for (int f = 0; f < t.frames; ++f) {
    for (std::size_t p = 0; p < plane; ++p) {
      for (int c = 0; c < raster::kNumChannels; ++c, ++src) in.values[c * volume + f * plane + p] = t.values[src];
    }
  }
  return in;
}

Var Model::param(std::vector<int> shape, std::string name, double bound, std::uint64_t seed) {
  std::vector<double> v(shape_size(shape), 0.0);
  if (bound > 0.0) {
    Rng rng = Rng::substream(seed, "init:" + name);
    for (double& x : v) x = rng.uniform(-bound, bound);
  }
  params_.push_back(parameter(std::move(shape), std::move(v), std::move(name)));
  return params_.back();
}

Model::Model(const ModelConfig& cfg, std::uint64_t seed) : cfg_(cfg) {
  validate(cfg_);
  const int extra = cfg_.coord_channels ? 2 : 0;
  auto layer = [&](const std::string& name, std::vector<int> wshape, int fan_in, int bias, bool output) {
    const double bound = output ? 1.0 / std::sqrt(fan_in) : std::sqrt(6.0 / fan_in);
    const std::size_t w = params_.size();
    param(std::move(wshape), name + ".w", bound, seed);
    param({bias}, name + ".b", 0.0, seed);
    return std::make_pair(w, w + 1);
  };
  auto conv_layer = [&](const std::string& name, int ci, int co, int kt, int k, bool output) {
    const int cin = ci + extra;
    return layer(name, {co, cin, kt, k, k}, cin * kt * k * k, co, output);
  };

  const auto& w = cfg_.widths;
  const int t_rest = cfg_.input_frames - 2;
  encoder_.push_back(conv_layer("stage1", raster::kNumChannels, w[0], 1, 3, false));
  encoder_.push_back(conv_layer("temporal1", w[0], w[0], 3, 3, false));
  encoder_.push_back(conv_layer("stage2", w[0], w[1], 1, 3, false));
  encoder_.push_back(conv_layer("stage3", w[1], w[2], 1, 3, false));
  encoder_.push_back(conv_layer("temporal2", w[2], w[2], t_rest, 3, false));
  const int s = stride2(stride2(stride2(cfg_.input_size)));
  const int flat = w[2] * s * s;
  latent_ = layer("latent", {cfg_.latent, flat}, flat, cfg_.latent, false);

  if (cfg_.head == HeadKind::Grid) {
    const int g0 = cfg_.grid_width * kGridSeed * kGridSeed;
    head_ = layer("grid_seed", {g0, cfg_.latent}, cfg_.latent, g0, false);
    int size = kGridSeed;
    int idx = 0;
    while (size < cfg_.grid_size) {
      size *= 2;
      const bool last = size == cfg_.grid_size;
      const int ci = cfg_.grid_width + extra;
      const int co = last ? kHorizon : cfg_.grid_width;
      upsample_.push_back(layer("upsample" + std::to_string(idx++), {ci, co, 4, 4}, ci * 4, co, last));
    }
    prior_.push_back(conv_layer("prior0", 3, cfg_.prior_widths[0], 1, 3, false));
    prior_.push_back(conv_layer("prior1", cfg_.prior_widths[0], cfg_.prior_widths[1], 1, 3, false));
    prior_.push_back(conv_layer("prior2", cfg_.prior_widths[1], 1, 1, 3, true));
  } else {
    const int n = raw_output_size(cfg_);
    head_ = layer("head", {n, cfg_.latent}, cfg_.latent, n, true);
  }
}

Model::Model(const Model& other) { *this = other; }

Model& Model::operator=(const Model& other) {
  if (this == &other) return *this;
  cfg_ = other.cfg_;
  encoder_ = other.encoder_;
  prior_ = other.prior_;
  upsample_ = other.upsample_;
  latent_ = other.latent_;
  head_ = other.head_;
  params_.clear();
  for (const auto& p : other.params_) params_.push_back(parameter(p->shape, p->value, p->op));
  return *this;
}

std::size_t Model::parameter_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p->size();
  return n;
}

void Model::zero_grad() {
  for (auto& p : params_) p->grad.assign(p->size(), 0.0);
}

void Model::copy_values_from(const Model& other) {
  if (other.params_.size() != params_.size()) fail("copy_values_from: parameter layout differs");
  for (std::size_t i = 0; i < params_.size(); ++i) params_[i]->value = other.params_[i]->value;
}

Var Model::forward_raw(const ModelInput& input) const {
  const std::vector<int> expected{raster::kNumChannels, cfg_.input_frames, cfg_.input_size, cfg_.input_size};
  if (input.shape != expected) {
    fail("input shape " + shape_string(input.shape) + " does not match model " + shape_string(expected));
  }
  auto coords = [&](const Var& v) { return cfg_.coord_channels ? add_coords(v) : v; };
  auto apply = [&](const Var& v, std::pair<std::size_t, std::size_t> l, const Conv3dOptions& opt) {
    return conv3d(coords(v), params_[l.first], params_[l.second], opt);
  };
  const Conv3dOptions spatial_s2{1, 2, 2, 0, 1, 1};
  const Conv3dOptions same{1, 1, 1, 0, 1, 1};

  Var x = constant(input.shape, std::vector<double>(input.values.begin(), input.values.end()));
  Var h = relu(apply(x, encoder_[0], spatial_s2));
  h = relu(apply(h, encoder_[1], same));
  h = relu(apply(h, encoder_[2], spatial_s2));
  h = relu(apply(h, encoder_[3], spatial_s2));
  h = relu(apply(h, encoder_[4], same));
  h = relu(dense(h, params_[latent_.first], params_[latent_.second]));

  if (cfg_.head != HeadKind::Grid) return dense(h, params_[head_.first], params_[head_.second]);

  Var g = dense(h, params_[head_.first], params_[head_.second]);
  g = reshape(g, {cfg_.grid_width, 1, kGridSeed, kGridSeed});
  for (std::size_t i = 0; i < upsample_.size(); ++i) {
    g = conv_transpose2d(coords(relu(g)), params_[upsample_[i].first], params_[upsample_[i].second], 2, 1);
  }

  // Road raster of the last frame drives the static prior.
  const int n = cfg_.input_size;
  const std::size_t plane = static_cast<std::size_t>(n) * n;
  const std::size_t volume = plane * cfg_.input_frames;
  std::vector<double> road(3 * plane);
  for (int c = 0; c < 3; ++c) {
    const float* src = input.values.data() + (raster::kRoadChannels + c) * volume + (cfg_.input_frames - 1) * plane;
    std::copy(src, src + plane, road.begin() + c * plane);
  }
  Var p = constant({3, 1, n, n}, std::move(road));
  p = relu(apply(p, prior_[0], same));
  p = relu(apply(p, prior_[1], same));
  p = apply(p, prior_[2], same);
  p = resize_nearest(p, cfg_.grid_size);
  return add_prior(g, p);
}

Prediction Model::predict(const ModelInput& input) const {
  const Var raw = forward_raw(input);
  switch (cfg_.head) {
    case HeadKind::Gaussian: return gaussian_from_raw(raw->value, cfg_.mu_scale);
    case HeadKind::Mixture: return mixture_from_raw(raw->value, cfg_.mixture_k, cfg_.mu_scale);
    case HeadKind::Grid: return grids_from_logits(raw->value, kHorizon, cfg_.grid_size);
  }
  fail("unknown head");
}

Var Model::loss(const Var& raw, const Target& target, LossKind kind) const {
  const bool mixture = cfg_.head == HeadKind::Mixture;
  if (cfg_.head == HeadKind::Grid) {
    if (kind == LossKind::Mse) fail("MSE pretraining is not defined for the grid head");
    return grid_ce_loss(raw, target.cells);
  }
  if (kind == LossKind::Mse) return mse_loss(raw, target.displacements, cfg_.mixture_k, cfg_.mu_scale, mixture);
  if (mixture) return mixture_nll_loss(raw, target.displacements, cfg_.mixture_k, cfg_.mu_scale);
  return gaussian_nll_loss(raw, target.displacements, cfg_.mu_scale);
}

void save_checkpoint(const std::filesystem::path& path, const Model& model, const CheckpointMeta& meta) {
  const json header = {{"model", to_json(model.config())},
                       {"input_spec", raster::to_json(meta.input_spec)},
                       {"output_spec", raster::to_json(meta.output_spec)},
                       {"scaling", raster::to_json(meta.scaling)},
                       {"groups", raster::to_json(meta.groups)}};
  const std::string text = header.dump();
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("cannot write checkpoint " + path.string());
  out.write("TDPM", 4);
  put_u32(out, 1);
  put_u32(out, static_cast<std::uint32_t>(text.size()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  const std::uint64_t count = model.parameter_count();
  put_u32(out, static_cast<std::uint32_t>(count));
  put_u32(out, static_cast<std::uint32_t>(count >> 32));
  for (const auto& p : model.parameters()) {
    for (double v : p->value) put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  }
  if (!out) fail("failed writing checkpoint " + path.string());
}

Model load_checkpoint(const std::filesystem::path& path, CheckpointMeta* meta) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open checkpoint " + path.string());
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, "TDPM", 4) != 0) fail(path.string() + ": not a checkpoint");
  const std::uint32_t version = get_u32(in);
  if (version != 1) fail(path.string() + ": unsupported checkpoint version " + std::to_string(version));
  std::string text(get_u32(in), '\0');
  if (!in.read(text.data(), static_cast<std::streamsize>(text.size()))) fail("checkpoint truncated");
  json header;
  try {
    header = json::parse(text);
  } catch (const json::exception& e) {
    fail(path.string() + ": bad checkpoint header: " + e.what());
  }
  Model model(model_config_from_json(header.at("model")), 0);
  if (meta) {
    meta->input_spec = raster::grid_spec_from_json(header.at("input_spec"));
    meta->output_spec = raster::grid_spec_from_json(header.at("output_spec"));
    meta->scaling = raster::feature_scaling_from_json(header.at("scaling"));
    meta->groups = raster::feature_groups_from_json(header.at("groups"));
  }
  const std::uint64_t lo = get_u32(in);
  const std::uint64_t count = lo | (static_cast<std::uint64_t>(get_u32(in)) << 32);
  if (count != model.parameter_count()) fail(path.string() + ": parameter count does not match its config");
  for (const auto& p : model.parameters()) {
    for (double& v : p->value) v = std::bit_cast<float>(get_u32(in));
  }
  return model;
}

}  // namespace topdown::nn
