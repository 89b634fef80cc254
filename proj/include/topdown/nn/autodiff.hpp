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

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "topdown/geometry.hpp"

namespace topdown::nn {

struct Node;
using Var = std::shared_ptr<Node>;

/// A dense array with its gradient. Graph nodes keep their inputs alive; the
/// backward closure reads this node's gradient and accumulates into inputs.
struct Node {
  std::vector<int> shape;
  std::vector<double> value;
  std::vector<double> grad;
  std::string op;
  std::vector<Var> inputs;
  std::function<void(Node&)> backward_fn;
  bool requires_grad = false;

  std::size_t size() const { return value.size(); }
  /// Allocates a zero gradient on first use.
  std::vector<double>& ensure_grad();
};

std::size_t shape_size(const std::vector<int>& shape);
std::string shape_string(const std::vector<int>& shape);

Var constant(std::vector<int> shape, std::vector<double> values);
Var parameter(std::vector<int> shape, std::vector<double> values, std::string name);

Var add(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);
Var scale(const Var& a, double s);
Var sum(const Var& a);
Var relu(const Var& a);
Var reshape(const Var& a, std::vector<int> shape);

/// y[out] = W[out, in] x + b; x is flattened.
Var dense(const Var& x, const Var& w, const Var& b);

struct Conv3dOptions {
  int st = 1, sh = 1, sw = 1;
  int pt = 0, ph = 0, pw = 0;
};

/// x [Ci,T,H,W], w [Co,Ci,kt,kh,kw], b [Co] -> [Co,T',H',W'].
Var conv3d(const Var& x, const Var& w, const Var& b, const Conv3dOptions& opt);

/// x [Ci,1,H,W], w [Ci,Co,k,k], b [Co] -> [Co,1,H',W'] with H' = (H-1)s - 2p + k.
Var conv_transpose2d(const Var& x, const Var& w, const Var& b, int stride, int pad);

/// Appends two constant channels holding row and column coordinates in [-1, 1].
Var add_coords(const Var& x);

/// Nearest-neighbour resize of [C,1,H,W] to [C,1,n,n].
Var resize_nearest(const Var& x, int n);

/// logits [m,1,G,G] + prior [1,1,G,G] broadcast over the first axis.
Var add_prior(const Var& logits, const Var& prior);

/// Gumbel-softmax sample of a logits vector (see dist::gumbel_softmax_sample).
Var gumbel_softmax(const Var& logits, double tau, std::span<const double> noise);

/// Runs reverse-mode differentiation from a scalar. Throws Error("nnet", ...)
/// naming the op whose backward produced a non-finite gradient.
void backward(const Var& loss);

}  // namespace topdown::nn
