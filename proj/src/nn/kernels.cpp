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

#include "topdown/nn/kernels.hpp"

#include <algorithm>
#include <cstring>
#include <vector>

namespace topdown::nn {
namespace {

constexpr int kBlock = 256;
constexpr int kMr = 4;
constexpr int kNr = 16;

using V8 = double __attribute__((vector_size(64)));

inline V8 load8(const double* p) {
  V8 v;
  std::memcpy(&v, p, sizeof v);
  return v;
}

inline void store8(double* p, V8 v) { std::memcpy(p, &v, sizeof v); }

// C rows i..i+kMr, columns j..j+kNr, accumulated in ascending p so each element
// sees the same operation sequence as the reference.
template <typename LoadA>
inline void micro_kernel(int n, int k, LoadA load_a, int i, int j, const double* b, double* c) {
  double* c0 = c + static_cast<std::size_t>(i) * n + j;
  const std::size_t ldc = static_cast<std::size_t>(n);
  V8 a00 = load8(c0), a01 = load8(c0 + 8);
  V8 a10 = load8(c0 + ldc), a11 = load8(c0 + ldc + 8);
  V8 a20 = load8(c0 + 2 * ldc), a21 = load8(c0 + 2 * ldc + 8);
  V8 a30 = load8(c0 + 3 * ldc), a31 = load8(c0 + 3 * ldc + 8);
  for (int p = 0; p < k; ++p) {
    const double* bp = b + static_cast<std::size_t>(p) * n + j;
    const V8 b0 = load8(bp), b1 = load8(bp + 8);
    const double x0 = load_a(i, p), x1 = load_a(i + 1, p), x2 = load_a(i + 2, p), x3 = load_a(i + 3, p);
    a00 += x0 * b0;
    a01 += x0 * b1;
    a10 += x1 * b0;
    a11 += x1 * b1;
    a20 += x2 * b0;
    a21 += x2 * b1;
    a30 += x3 * b0;
    a31 += x3 * b1;
  }
  store8(c0, a00);
  store8(c0 + 8, a01);
  store8(c0 + ldc, a10);
  store8(c0 + ldc + 8, a11);
  store8(c0 + 2 * ldc, a20);
  store8(c0 + 2 * ldc + 8, a21);
  store8(c0 + 3 * ldc, a30);
  store8(c0 + 3 * ldc + 8, a31);
}

template <typename LoadA>
void gemm_blocked(int m, int n, int k, LoadA load_a, const double* b, double* c) {
  const int blocks = (n + kBlock - 1) / kBlock;
#pragma omp parallel for schedule(static)
  for (int blk = 0; blk < blocks; ++blk) {
    const int j0 = blk * kBlock;
    const int j1 = std::min(n, j0 + kBlock);
    const int jv = j0 + (j1 - j0) / kNr * kNr;
    int i = 0;
    for (; i + kMr <= m; i += kMr) {
      for (int j = j0; j < jv; j += kNr) micro_kernel(n, k, load_a, i, j, b, c);
    }
    // Row and column remainders, still ascending in p.
    for (int r = 0; r < m; ++r) {
      const int lo = r < i ? jv : j0;
      if (lo >= j1) continue;
      double* cr = c + static_cast<std::size_t>(r) * n;
      for (int p = 0; p < k; ++p) {
        const double av = load_a(r, p);
        const double* bp = b + static_cast<std::size_t>(p) * n;
        for (int j = lo; j < j1; ++j) cr[j] += av * bp[j];
      }
    }
  }
}

// Calls f(row, t, y, dst_offset_base) style copy per patch row; shared by the
// forward and adjoint transforms.
template <typename Row>
void for_each_patch_row(const ConvGeom& g, Row&& row_fn) {
  std::size_t row = 0;
  for (int c = 0; c < g.channels; ++c) {
    for (int a = 0; a < g.kt; ++a) {
      for (int b = 0; b < g.kh; ++b) {
        for (int d = 0; d < g.kw; ++d, ++row) row_fn(row, c, a, b, d);
      }
    }
  }
}

}  // namespace

namespace {

// Output columns whose input column xo*sw - pw + d lies inside [0, width).
std::pair<int, int> valid_columns(const ConvGeom& g, int d) {
  const int wo = g.out_width();
  int lo = 0;
  while (lo < wo && lo * g.sw - g.pw + d < 0) ++lo;
  int hi = wo;
  while (hi > lo && (hi - 1) * g.sw - g.pw + d >= g.width) --hi;
  return {lo, hi};
}

}  // namespace

void im2col(const double* x, const ConvGeom& g, double* col) {
  const int to = g.out_frames(), ho = g.out_height(), wo = g.out_width();
  const std::size_t n = g.positions();
  for_each_patch_row(g, [&](std::size_t row, int c, int a, int b, int d) {
    const auto [lo, hi] = valid_columns(g, d);
    double* dst = col + row * n;
    for (int t = 0; t < to; ++t) {
      const int ti = t * g.st - g.pt + a;
      for (int y = 0; y < ho; ++y, dst += wo) {
        const int yi = y * g.sh - g.ph + b;
        if (ti < 0 || ti >= g.frames || yi < 0 || yi >= g.height) {
          std::fill(dst, dst + wo, 0.0);
          continue;
        }
        const double* src = x + ((static_cast<std::size_t>(c) * g.frames + ti) * g.height + yi) * g.width - g.pw + d;
        std::fill(dst, dst + lo, 0.0);
        if (g.sw == 1) {
          std::copy(src + lo, src + hi, dst + lo);
        } else {
          for (int xo = lo; xo < hi; ++xo) dst[xo] = src[xo * g.sw];
        }
        std::fill(dst + hi, dst + wo, 0.0);
      }
    }
  });
}

void transpose(const double* src, std::size_t rows, std::size_t cols, double* dst) {
  constexpr std::size_t kTile = 32;
  for (std::size_t r0 = 0; r0 < rows; r0 += kTile) {
    for (std::size_t c0 = 0; c0 < cols; c0 += kTile) {
      const std::size_t r1 = std::min(rows, r0 + kTile), c1 = std::min(cols, c0 + kTile);
      for (std::size_t r = r0; r < r1; ++r) {
        for (std::size_t c = c0; c < c1; ++c) dst[c * rows + r] = src[r * cols + c];
      }
    }
  }
}

void im2col_transposed(const double* x, const ConvGeom& g, double* col_t) {
  std::vector<double> col(g.patch() * g.positions());
  im2col(x, g, col.data());
  transpose(col.data(), g.patch(), g.positions(), col_t);
}

void col2im(const double* col, const ConvGeom& g, double* x) {
  const int to = g.out_frames(), ho = g.out_height(), wo = g.out_width();
  const std::size_t n = g.positions();
  for_each_patch_row(g, [&](std::size_t row, int c, int a, int b, int d) {
    const auto [lo, hi] = valid_columns(g, d);
    const double* src = col + row * n;
    for (int t = 0; t < to; ++t) {
      const int ti = t * g.st - g.pt + a;
      for (int y = 0; y < ho; ++y, src += wo) {
        const int yi = y * g.sh - g.ph + b;
        if (ti < 0 || ti >= g.frames || yi < 0 || yi >= g.height) continue;
        double* dst = x + ((static_cast<std::size_t>(c) * g.frames + ti) * g.height + yi) * g.width - g.pw + d;
        for (int xo = lo; xo < hi; ++xo) dst[xo * g.sw] += src[xo];
      }
    }
  });
}

void gemm_nn(int m, int n, int k, const double* a, const double* b, double* c) {
  gemm_blocked(m, n, k, [a, k](int i, int p) { return a[static_cast<std::size_t>(i) * k + p]; }, b, c);
}

void gemm_tn(int m, int n, int k, const double* a, const double* b, double* c) {
  gemm_blocked(m, n, k, [a, m](int i, int p) { return a[static_cast<std::size_t>(p) * m + i]; }, b, c);
}

void gemm_nt(int m, int n, int k, const double* a, const double* b, double* c) {
  constexpr int kR = 4;
  const int kv = k / 8 * 8;
  auto dot_tail = [&](int i, int j, double partial) {
    const double* ai = a + static_cast<std::size_t>(i) * k;
    const double* bj = b + static_cast<std::size_t>(j) * k;
    for (int p = kv; p < k; ++p) partial += ai[p] * bj[p];
    c[static_cast<std::size_t>(i) * n + j] += partial;
  };
  auto hsum = [](V8 v) {
    double s = 0.0;
    for (int l = 0; l < 8; ++l) s += v[l];
    return s;
  };
  const int row_blocks = (m + kR - 1) / kR;
#pragma omp parallel for schedule(static)
  for (int ib = 0; ib < row_blocks; ++ib) {
    const int i0 = ib * kR;
    const int ni = std::min(kR, m - i0);
    for (int j0 = 0; j0 < n; j0 += kR) {
      const int nj = std::min(kR, n - j0);
      V8 acc[kR][kR] = {};
      for (int p = 0; p < kv; p += 8) {
        V8 bv[kR];
        for (int q = 0; q < nj; ++q) bv[q] = load8(b + static_cast<std::size_t>(j0 + q) * k + p);
        for (int r = 0; r < ni; ++r) {
          const V8 av = load8(a + static_cast<std::size_t>(i0 + r) * k + p);
          for (int q = 0; q < nj; ++q) acc[r][q] += av * bv[q];
        }
      }
      for (int r = 0; r < ni; ++r) {
        for (int q = 0; q < nj; ++q) dot_tail(i0 + r, j0 + q, hsum(acc[r][q]));
      }
    }
  }
}

void conv3d_forward(const double* x, const double* w, const double* bias, int out_channels, const ConvGeom& g,
                    double* col, double* out) {
  const std::size_t n = g.positions();
  im2col(x, g, col);
  for (int o = 0; o < out_channels; ++o) std::fill(out + o * n, out + (o + 1) * n, bias ? bias[o] : 0.0);
  gemm_nn(out_channels, static_cast<int>(n), static_cast<int>(g.patch()), w, col, out);
}

namespace reference {

void gemm_nn(int m, int n, int k, const double* a, const double* b, double* c) {
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      double acc = c[static_cast<std::size_t>(i) * n + j];
      for (int p = 0; p < k; ++p) acc += a[static_cast<std::size_t>(i) * k + p] * b[static_cast<std::size_t>(p) * n + j];
      c[static_cast<std::size_t>(i) * n + j] = acc;
    }
  }
}

void gemm_tn(int m, int n, int k, const double* a, const double* b, double* c) {
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      double acc = c[static_cast<std::size_t>(i) * n + j];
      for (int p = 0; p < k; ++p) acc += a[static_cast<std::size_t>(p) * m + i] * b[static_cast<std::size_t>(p) * n + j];
      c[static_cast<std::size_t>(i) * n + j] = acc;
    }
  }
}

void gemm_nt(int m, int n, int k, const double* a, const double* b, double* c) {
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int p = 0; p < k; ++p) acc += a[static_cast<std::size_t>(i) * k + p] * b[static_cast<std::size_t>(j) * k + p];
      c[static_cast<std::size_t>(i) * n + j] += acc;
    }
  }
}

void conv3d_forward(const double* x, const double* w, const double* bias, int out_channels, const ConvGeom& g,
                    double* out) {
  const int to = g.out_frames(), ho = g.out_height(), wo = g.out_width();
  std::size_t idx = 0;
  for (int o = 0; o < out_channels; ++o) {
    for (int t = 0; t < to; ++t) {
      for (int y = 0; y < ho; ++y) {
        for (int xo = 0; xo < wo; ++xo, ++idx) {
          double acc = bias ? bias[o] : 0.0;
          std::size_t wi = static_cast<std::size_t>(o) * g.patch();
          for (int c = 0; c < g.channels; ++c) {
            for (int a = 0; a < g.kt; ++a) {
              for (int b = 0; b < g.kh; ++b) {
                for (int d = 0; d < g.kw; ++d, ++wi) {
                  const int ti = t * g.st - g.pt + a;
                  const int yi = y * g.sh - g.ph + b;
                  const int xi = xo * g.sw - g.pw + d;
                  if (ti < 0 || ti >= g.frames || yi < 0 || yi >= g.height || xi < 0 || xi >= g.width) continue;
                  acc += w[wi] * x[((static_cast<std::size_t>(c) * g.frames + ti) * g.height + yi) * g.width + xi];
                }
              }
            }
          }
          out[idx] = acc;
        }
      }
    }
  }
}

}  // namespace reference
}  // namespace topdown::nn
