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

#include <cstddef>

namespace topdown::nn {

/// Geometry of a 3-D convolution over an input laid out [C, T, H, W].
struct ConvGeom {
  int channels = 1, frames = 1, height = 1, width = 1;
  int kt = 1, kh = 1, kw = 1;
  int st = 1, sh = 1, sw = 1;
  int pt = 0, ph = 0, pw = 0;

  int out_frames() const { return (frames + 2 * pt - kt) / st + 1; }
  int out_height() const { return (height + 2 * ph - kh) / sh + 1; }
  int out_width() const { return (width + 2 * pw - kw) / sw + 1; }
  /// Rows of the patch matrix.
  std::size_t patch() const { return static_cast<std::size_t>(channels) * kt * kh * kw; }
  /// Output positions (columns of the patch matrix).
  std::size_t positions() const {
    return static_cast<std::size_t>(out_frames()) * out_height() * out_width();
  }
  std::size_t input_size() const { return static_cast<std::size_t>(channels) * frames * height * width; }
};

/// Patch matrix col[patch][positions]; zero padding.
void im2col(const double* x, const ConvGeom& g, double* col);
/// Same patches stored transposed, colT[positions][patch].
void im2col_transposed(const double* x, const ConvGeom& g, double* col_t);
/// dst[cols][rows] = src[rows][cols]^T.
void transpose(const double* src, std::size_t rows, std::size_t cols, double* dst);
/// Adjoint of im2col: accumulates col[patch][positions] into x.
void col2im(const double* col, const ConvGeom& g, double* x);

/// C[M,N] += A[M,K] * B[K,N]. OpenMP over column blocks; every output element
/// is reduced by one thread in ascending k, so results match the reference bit for bit.
void gemm_nn(int m, int n, int k, const double* a, const double* b, double* c);
/// C[M,N] += A[K,M]^T * B[K,N].
void gemm_tn(int m, int n, int k, const double* a, const double* b, double* c);

/// C[M,N] += A[M,K] * B[N,K]^T. Each element is a dot product reduced in eight
/// interleaved lanes, so it agrees with the reference to rounding, not bitwise.
void gemm_nt(int m, int n, int k, const double* a, const double* b, double* c);

/// out[Co, positions] = bias + W[Co, patch] * im2col(x). `col` is scratch of patch*positions.
void conv3d_forward(const double* x, const double* w, const double* bias, int out_channels, const ConvGeom& g,
                    double* col, double* out);

namespace reference {

void gemm_nn(int m, int n, int k, const double* a, const double* b, double* c);
void gemm_tn(int m, int n, int k, const double* a, const double* b, double* c);
void gemm_nt(int m, int n, int k, const double* a, const double* b, double* c);
/// Direct seven-loop convolution.
void conv3d_forward(const double* x, const double* w, const double* bias, int out_channels, const ConvGeom& g,
                    double* out);

}  // namespace reference
}  // namespace topdown::nn
