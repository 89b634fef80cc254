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

#include "topdown/nn/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "topdown/distributions.hpp"
#include "topdown/error.hpp"
#include "topdown/nn/kernels.hpp"

namespace topdown::nn {
namespace {

[[noreturn]] void fail(const std::string& msg) { throw Error("nnet", msg); }

Var make_node(std::vector<int> shape, std::string op, std::vector<Var> inputs) {
  auto n = std::make_shared<Node>();
  n->value.assign(shape_size(shape), 0.0);
  n->shape = std::move(shape);
  n->op = std::move(op);
  for (const auto& in : inputs) n->requires_grad = n->requires_grad || in->requires_grad;
  n->inputs = std::move(inputs);
  return n;
}

void expect_rank(const Var& v, std::size_t rank, const char* op) {
  if (v->shape.size() != rank) {
    fail(std::string(op) + ": expected rank " + std::to_string(rank) + ", got shape " + shape_string(v->shape));
  }
}

}  // namespace

std::vector<double>& Node::ensure_grad() {
  if (grad.size() != value.size()) grad.assign(value.size(), 0.0);
  return grad;
}

std::size_t shape_size(const std::vector<int>& shape) {
  std::size_t n = 1;
  for (int d : shape) {
    if (d <= 0) fail("non-positive dimension in shape " + shape_string(shape));
    n *= static_cast<std::size_t>(d);
  }
  return n;
}

std::string shape_string(const std::vector<int>& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) s += (i ? "," : "") + std::to_string(shape[i]);
  return s + "]";
}

Var constant(std::vector<int> shape, std::vector<double> values) {
  auto n = make_node(std::move(shape), "constant", {});
  if (values.size() != n->value.size()) fail("constant: value count does not match shape");
  n->value = std::move(values);
  return n;
}

Var parameter(std::vector<int> shape, std::vector<double> values, std::string name) {
  auto n = constant(std::move(shape), std::move(values));
  n->op = std::move(name);
  n->requires_grad = true;
  return n;
}

Var add(const Var& a, const Var& b) {
  if (a->shape != b->shape) fail("add: shape mismatch " + shape_string(a->shape) + " vs " + shape_string(b->shape));
  auto out = make_node(a->shape, "add", {a, b});
  for (std::size_t i = 0; i < out->size(); ++i) out->value[i] = a->value[i] + b->value[i];
  out->backward_fn = [](Node& self) {
    for (const auto& in : self.inputs) {
      if (!in->requires_grad) continue;
      auto& g = in->ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    }
  };
  return out;
}

Var mul(const Var& a, const Var& b) {
  if (a->shape != b->shape) fail("mul: shape mismatch " + shape_string(a->shape) + " vs " + shape_string(b->shape));
  auto out = make_node(a->shape, "mul", {a, b});
  for (std::size_t i = 0; i < out->size(); ++i) out->value[i] = a->value[i] * b->value[i];
  out->backward_fn = [](Node& self) {
    Node& x = *self.inputs[0];
    Node& y = *self.inputs[1];
    if (x.requires_grad) {
      auto& g = x.ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * y.value[i];
    }
    if (y.requires_grad) {
      auto& g = y.ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * x.value[i];
    }
  };
  return out;
}

Var scale(const Var& a, double s) {
  auto out = make_node(a->shape, "scale", {a});
  for (std::size_t i = 0; i < out->size(); ++i) out->value[i] = s * a->value[i];
  out->backward_fn = [s](Node& self) {
    auto& g = self.inputs[0]->ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += s * self.grad[i];
  };
  return out;
}

Var sum(const Var& a) {
  auto out = make_node({1}, "sum", {a});
  double acc = 0.0;
  for (double v : a->value) acc += v;
  out->value[0] = acc;
  out->backward_fn = [](Node& self) {
    auto& g = self.inputs[0]->ensure_grad();
    for (double& v : g) v += self.grad[0];
  };
  return out;
}

Var relu(const Var& a) {
  auto out = make_node(a->shape, "relu", {a});
  for (std::size_t i = 0; i < out->size(); ++i) out->value[i] = a->value[i] > 0.0 ? a->value[i] : 0.0;
  out->backward_fn = [](Node& self) {
    Node& x = *self.inputs[0];
    auto& g = x.ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (x.value[i] > 0.0) g[i] += self.grad[i];
    }
  };
  return out;
}

Var reshape(const Var& a, std::vector<int> shape) {
  if (shape_size(shape) != a->size()) {
    fail("reshape: cannot view " + shape_string(a->shape) + " as " + shape_string(shape));
  }
  auto out = make_node(std::move(shape), "reshape", {a});
  out->value = a->value;
  out->backward_fn = [](Node& self) {
    auto& g = self.inputs[0]->ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
  };
  return out;
}

Var dense(const Var& x, const Var& w, const Var& b) {
  expect_rank(w, 2, "dense");
  const int n_out = w->shape[0];
  const int n_in = w->shape[1];
  if (static_cast<int>(x->size()) != n_in || static_cast<int>(b->size()) != n_out) {
    fail("dense: input " + shape_string(x->shape) + " incompatible with weight " + shape_string(w->shape));
  }
  auto out = make_node({n_out}, "dense", {x, w, b});
  for (int o = 0; o < n_out; ++o) {
    double acc = b->value[o];
    const double* row = w->value.data() + static_cast<std::size_t>(o) * n_in;
    for (int i = 0; i < n_in; ++i) acc += row[i] * x->value[i];
    out->value[o] = acc;
  }
  out->backward_fn = [n_in, n_out](Node& self) {
    Node& xin = *self.inputs[0];
    Node& wn = *self.inputs[1];
    Node& bn = *self.inputs[2];
    if (wn.requires_grad) {
      auto& g = wn.ensure_grad();
      for (int o = 0; o < n_out; ++o) {
        const double go = self.grad[o];
        double* row = g.data() + static_cast<std::size_t>(o) * n_in;
        for (int i = 0; i < n_in; ++i) row[i] += go * xin.value[i];
      }
    }
    if (bn.requires_grad) {
      auto& g = bn.ensure_grad();
      for (int o = 0; o < n_out; ++o) g[o] += self.grad[o];
    }
    if (xin.requires_grad) {
      auto& g = xin.ensure_grad();
      for (int o = 0; o < n_out; ++o) {
        const double go = self.grad[o];
        const double* row = wn.value.data() + static_cast<std::size_t>(o) * n_in;
        for (int i = 0; i < n_in; ++i) g[i] += go * row[i];
      }
    }
  };
  return out;
}

Var conv3d(const Var& x, const Var& w, const Var& b, const Conv3dOptions& opt) {
  expect_rank(x, 4, "conv3d");
  expect_rank(w, 5, "conv3d");
  if (w->shape[1] != x->shape[0]) {
    fail("conv3d: weight " + shape_string(w->shape) + " expects " + std::to_string(w->shape[1]) +
         " input channels, got " + shape_string(x->shape));
  }
  const int co = w->shape[0];
  if (static_cast<int>(b->size()) != co) fail("conv3d: bias size mismatch");
  ConvGeom g{x->shape[0], x->shape[1], x->shape[2], x->shape[3], w->shape[2], w->shape[3], w->shape[4],
             opt.st, opt.sh, opt.sw, opt.pt, opt.ph, opt.pw};
  if (g.out_frames() <= 0 || g.out_height() <= 0 || g.out_width() <= 0) {
    fail("conv3d: kernel " + shape_string(w->shape) + " does not fit input " + shape_string(x->shape));
  }
  auto out = make_node({co, g.out_frames(), g.out_height(), g.out_width()}, "conv3d", {x, w, b});
  // The patch matrix is kept for the weight gradient.
  std::shared_ptr<double[]> col(new double[g.patch() * g.positions()]);
  conv3d_forward(x->value.data(), w->value.data(), b->value.data(), co, g, col.get(), out->value.data());
  out->backward_fn = [g, co, col](Node& self) {
    Node& xin = *self.inputs[0];
    Node& wn = *self.inputs[1];
    Node& bn = *self.inputs[2];
    const int n = static_cast<int>(g.positions());
    const int k = static_cast<int>(g.patch());
    if (bn.requires_grad) {
      auto& gb = bn.ensure_grad();
      for (int o = 0; o < co; ++o) {
        double acc = 0.0;
        for (int j = 0; j < n; ++j) acc += self.grad[static_cast<std::size_t>(o) * n + j];
        gb[o] += acc;
      }
    }
    if (wn.requires_grad) {
      gemm_nt(co, k, n, self.grad.data(), col.get(), wn.ensure_grad().data());
    }
    if (xin.requires_grad) {
      std::vector<double> dcol(static_cast<std::size_t>(k) * n, 0.0);
      gemm_tn(k, n, co, wn.value.data(), self.grad.data(), dcol.data());
      col2im(dcol.data(), g, xin.ensure_grad().data());
    }
  };
  return out;
}

Var conv_transpose2d(const Var& x, const Var& w, const Var& b, int stride, int pad) {
  expect_rank(x, 4, "conv_transpose2d");
  expect_rank(w, 4, "conv_transpose2d");
  if (x->shape[1] != 1) fail("conv_transpose2d: expected a single frame");
  if (w->shape[0] != x->shape[0] || w->shape[2] != w->shape[3]) {
    fail("conv_transpose2d: weight " + shape_string(w->shape) + " incompatible with input " + shape_string(x->shape));
  }
  const int ci = w->shape[0];
  const int co = w->shape[1];
  const int kk = w->shape[2];
  const int h = x->shape[2];
  const int wd = x->shape[3];
  const int ho = (h - 1) * stride - 2 * pad + kk;
  const int wo = (wd - 1) * stride - 2 * pad + kk;
  if (ho <= 0 || wo <= 0 || static_cast<int>(b->size()) != co) fail("conv_transpose2d: invalid geometry");
  // The output grid is the input of the adjoint convolution.
  ConvGeom g{co, 1, ho, wo, 1, kk, kk, 1, stride, stride, 0, pad, pad};
  if (g.out_height() != h || g.out_width() != wd) fail("conv_transpose2d: stride/pad do not invert");
  auto out = make_node({co, 1, ho, wo}, "conv_transpose2d", {x, w, b});
  const int n = h * wd;
  const int k = static_cast<int>(g.patch());
  std::vector<double> col(static_cast<std::size_t>(k) * n, 0.0);
  // col[Co*k*k, HW] = W^T[Co*k*k, Ci] x[Ci, HW]
  gemm_tn(k, n, ci, w->value.data(), x->value.data(), col.data());
  col2im(col.data(), g, out->value.data());
  const std::size_t plane = static_cast<std::size_t>(ho) * wo;
  for (int o = 0; o < co; ++o) {
    for (std::size_t i = 0; i < plane; ++i) out->value[o * plane + i] += b->value[o];
  }
  out->backward_fn = [g, ci, co, n, k, plane](Node& self) {
    Node& xin = *self.inputs[0];
    Node& wn = *self.inputs[1];
    Node& bn = *self.inputs[2];
    if (bn.requires_grad) {
      auto& gb = bn.ensure_grad();
      for (int o = 0; o < co; ++o) {
        double acc = 0.0;
        for (std::size_t i = 0; i < plane; ++i) acc += self.grad[o * plane + i];
        gb[o] += acc;
      }
    }
    if (xin.requires_grad) {
      std::unique_ptr<double[]> dcol(new double[static_cast<std::size_t>(k) * n]);
      im2col(self.grad.data(), g, dcol.get());
      gemm_nn(ci, n, k, wn.value.data(), dcol.get(), xin.ensure_grad().data());
    }
    if (wn.requires_grad) {
      std::unique_ptr<double[]> dcol(new double[static_cast<std::size_t>(k) * n]);
      im2col(self.grad.data(), g, dcol.get());
      gemm_nt(ci, k, n, xin.value.data(), dcol.get(), wn.ensure_grad().data());
    }
  };
  return out;
}

Var add_coords(const Var& x) {
  expect_rank(x, 4, "add_coords");
  const int c = x->shape[0], t = x->shape[1], h = x->shape[2], w = x->shape[3];
  auto out = make_node({c + 2, t, h, w}, "add_coords", {x});
  std::copy(x->value.begin(), x->value.end(), out->value.begin());
  const std::size_t frame = static_cast<std::size_t>(h) * w;
  double* rows = out->value.data() + x->size();
  double* cols = rows + frame * t;
  for (int f = 0; f < t; ++f) {
    for (int r = 0; r < h; ++r) {
      for (int q = 0; q < w; ++q) {
        const std::size_t i = f * frame + static_cast<std::size_t>(r) * w + q;
        rows[i] = h > 1 ? 2.0 * r / (h - 1) - 1.0 : 0.0;
        cols[i] = w > 1 ? 2.0 * q / (w - 1) - 1.0 : 0.0;
      }
    }
  }
  out->backward_fn = [](Node& self) {
    auto& g = self.inputs[0]->ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
  };
  return out;
}

Var resize_nearest(const Var& x, int n) {
  expect_rank(x, 4, "resize_nearest");
  if (x->shape[1] != 1) fail("resize_nearest: expected a single frame");
  const int c = x->shape[0], h = x->shape[2], w = x->shape[3];
  auto out = make_node({c, 1, n, n}, "resize_nearest", {x});
  std::vector<std::size_t> src(static_cast<std::size_t>(n) * n);
  for (int r = 0; r < n; ++r) {
    for (int q = 0; q < n; ++q) {
      const int sr = static_cast<int>(static_cast<long long>(r) * h / n);
      const int sq = static_cast<int>(static_cast<long long>(q) * w / n);
      src[static_cast<std::size_t>(r) * n + q] = static_cast<std::size_t>(sr) * w + sq;
    }
  }
  const std::size_t in_plane = static_cast<std::size_t>(h) * w;
  const std::size_t out_plane = src.size();
  for (int ch = 0; ch < c; ++ch) {
    for (std::size_t i = 0; i < out_plane; ++i) out->value[ch * out_plane + i] = x->value[ch * in_plane + src[i]];
  }
  out->backward_fn = [src = std::move(src), c, in_plane, out_plane](Node& self) {
    auto& g = self.inputs[0]->ensure_grad();
    for (int ch = 0; ch < c; ++ch) {
      for (std::size_t i = 0; i < out_plane; ++i) g[ch * in_plane + src[i]] += self.grad[ch * out_plane + i];
    }
  };
  return out;
}

Var add_prior(const Var& logits, const Var& prior) {
  expect_rank(logits, 4, "add_prior");
  expect_rank(prior, 4, "add_prior");
  if (prior->shape[0] != 1 || prior->shape[1] != logits->shape[1] || prior->shape[2] != logits->shape[2] ||
      prior->shape[3] != logits->shape[3]) {
    fail("add_prior: prior " + shape_string(prior->shape) + " does not match logits " + shape_string(logits->shape));
  }
  auto out = make_node(logits->shape, "add_prior", {logits, prior});
  const std::size_t plane = prior->size();
  for (std::size_t i = 0; i < out->size(); ++i) out->value[i] = logits->value[i] + prior->value[i % plane];
  out->backward_fn = [plane](Node& self) {
    Node& l = *self.inputs[0];
    Node& p = *self.inputs[1];
    if (l.requires_grad) {
      auto& g = l.ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    }
    if (p.requires_grad) {
      auto& g = p.ensure_grad();
      for (std::size_t i = 0; i < self.grad.size(); ++i) g[i % plane] += self.grad[i];
    }
  };
  return out;
}

Var gumbel_softmax(const Var& logits, double tau, std::span<const double> noise) {
  auto out = make_node({static_cast<int>(logits->size())}, "gumbel_softmax", {logits});
  out->value = dist::gumbel_softmax_sample(logits->value, tau, noise);
  out->backward_fn = [tau](Node& self) {
    const auto g = dist::gumbel_softmax_backward(self.value, tau, self.grad);
    auto& dst = self.inputs[0]->ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) dst[i] += g[i];
  };
  return out;
}

void backward(const Var& loss) {
  if (loss->size() != 1) fail("backward: loss must be a scalar, got shape " + shape_string(loss->shape));
  // Iterative post-order DFS gives a topological order.
  std::vector<Node*> order;
  std::unordered_set<Node*> seen;
  std::vector<std::pair<Node*, std::size_t>> stack{{loss.get(), 0}};
  seen.insert(loss.get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->inputs.size()) {
      Node* child = node->inputs[next++].get();
      if (child->requires_grad && seen.insert(child).second) stack.emplace_back(child, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  loss->ensure_grad()[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* node = *it;
    if (!node->backward_fn) continue;
    node->ensure_grad();
    node->backward_fn(*node);
    for (const auto& in : node->inputs) {
      if (!in->requires_grad) continue;
      for (double v : in->grad) {
        if (!std::isfinite(v)) fail("non-finite gradient produced by op '" + node->op + "'");
      }
    }
  }
}

}  // namespace topdown::nn
