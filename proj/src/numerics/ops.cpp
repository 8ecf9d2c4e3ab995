// Copyright 2026 The xledit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "xledit/numerics/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace xledit::num {

namespace kernel {

// Register-tiled kernels. Every output element still accumulates its products
// one at a time in ascending order of the summed index, starting from the
// existing value of c, so results match the naive triple loop bit for bit and
// a row of the output never depends on other rows.

#if defined(__AVX512F__)
constexpr std::size_t kVecBytes = 64;
#else
constexpr std::size_t kVecBytes = 32;
#endif

template <typename T>
using Vec [[gnu::vector_size(kVecBytes)]] = T;
template <typename T>
using VecU [[gnu::vector_size(kVecBytes), gnu::aligned(alignof(T)), gnu::may_alias]] = T;

template <typename T>
constexpr std::size_t kLanes = kVecBytes / sizeof(T);

// c[r, j0 .. j0 + NV*lanes) += sum_s a(r, s) * b[s, ...] for r < R.
// a(r, s) = a[r * ars + s * ass].
template <typename T, int R, int NV>
inline void tile(const T* a, std::size_t ars, std::size_t ass, const T* b, std::size_t ldb, T* c, std::size_t ldc,
                 std::size_t depth) {
  constexpr std::size_t W = kLanes<T>;
  Vec<T> acc[R * NV];
#pragma GCC unroll 16
  for (int q = 0; q < R * NV; ++q) acc[q] = *reinterpret_cast<const VecU<T>*>(c + (q / NV) * ldc + (q % NV) * W);
  for (std::size_t s = 0; s < depth; ++s) {
    const T* bs = b + s * ldb;
#pragma GCC unroll 16
    for (int q = 0; q < R * NV; ++q)
      acc[q] += a[(q / NV) * ars + s * ass] * *reinterpret_cast<const VecU<T>*>(bs + (q % NV) * W);
  }
#pragma GCC unroll 16
  for (int q = 0; q < R * NV; ++q) *reinterpret_cast<VecU<T>*>(c + (q / NV) * ldc + (q % NV) * W) = acc[q];
}

template <typename T, int NV>
inline void row_block(const T* a, std::size_t ars, std::size_t ass, const T* b, std::size_t ldb, T* c,
                      std::size_t ldc, std::size_t rows, std::size_t depth) {
  constexpr int MR = 4;
  std::size_t r = 0;
  for (; r + MR <= rows; r += MR) tile<T, MR, NV>(a + r * ars, ars, ass, b, ldb, c + r * ldc, ldc, depth);
  for (; r < rows; ++r) tile<T, 1, NV>(a + r * ars, ars, ass, b, ldb, c + r * ldc, ldc, depth);
}

// c[rows, n] += A b where A(r, s) = a[r * ars + s * ass] and b is [depth, n].
template <typename T>
void gemm_strided(const T* a, std::size_t ars, std::size_t ass, const T* b, T* c, std::size_t rows,
                  std::size_t depth, std::size_t n) {
  constexpr std::size_t W = kLanes<T>;
  constexpr int NV = 4;
  std::size_t j = 0;
  for (; j + NV * W <= n; j += NV * W) row_block<T, NV>(a, ars, ass, b + j, n, c + j, n, rows, depth);
  for (; j + W <= n; j += W) row_block<T, 1>(a, ars, ass, b + j, n, c + j, n, rows, depth);
  if (j == n) return;
  for (std::size_t r = 0; r < rows; ++r) {
    T* cr = c + r * n;
    for (std::size_t s = 0; s < depth; ++s) {
      const T x = a[r * ars + s * ass];
      const T* br = b + s * n;
      for (std::size_t q = j; q < n; ++q) cr[q] += x * br[q];
    }
  }
}

template <typename T>
void gemm_nn(const T* __restrict a, const T* __restrict b, T* __restrict c, std::size_t m,
             std::size_t k, std::size_t n) {
  gemm_strided(a, k, 1, b, c, m, k, n);
}

// c[k, n] += a^T b with a [m, k] and b [m, n].
template <typename T>
void gemm_tn(const T* __restrict a, const T* __restrict b, T* __restrict c, std::size_t m,
             std::size_t k, std::size_t n) {
  gemm_strided(a, 1, k, b, c, k, m, n);
}

template <typename T>
Tensor<T> transpose(const Tensor<T>& x) {
  const std::size_t r = x.rows(), c = x.cols();
  Tensor<T> out(Shape{c, r});
  constexpr std::size_t B = 16;
  for (std::size_t i0 = 0; i0 < r; i0 += B)
    for (std::size_t j0 = 0; j0 < c; j0 += B)
      for (std::size_t i = i0; i < std::min(r, i0 + B); ++i)
        for (std::size_t j = j0; j < std::min(c, j0 + B); ++j) out[j * r + i] = x[i * c + j];
  return out;
}

template void gemm_nn(const float*, const float*, float*, std::size_t, std::size_t, std::size_t);
template void gemm_nn(const double*, const double*, double*, std::size_t, std::size_t, std::size_t);
template void gemm_tn(const float*, const float*, float*, std::size_t, std::size_t, std::size_t);
template void gemm_tn(const double*, const double*, double*, std::size_t, std::size_t, std::size_t);
template Tensor<float> transpose(const Tensor<float>&);
template Tensor<double> transpose(const Tensor<double>&);

}  // namespace kernel

namespace ops {
namespace {

template <typename T>
void require_same(const Var<T>& a, const Var<T>& b, const char* op) {
  XLEDIT_REQUIRE(a.shape() == b.shape(), std::string(op) + ": shape mismatch " +
                                             shape_str(a.shape()) + " vs " + shape_str(b.shape()));
}

template <typename T>
bool needs(const std::shared_ptr<Node<T>>& n) {
  return n->requires_grad;
}

}  // namespace

template <typename T>
Var<T> matmul(const Var<T>& a, const Var<T>& b) {
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  XLEDIT_REQUIRE(b.rows() == k, "matmul: inner dimension mismatch " + shape_str(a.shape()) +
                                    " x " + shape_str(b.shape()));
  Tensor<T> out(Shape{m, n});
  kernel::gemm_nn(a.value().data(), b.value().data(), out.data(), m, k, n);
  return make_result<T>(std::move(out), {a, b}, [m, k, n](Node<T>& self) {
    auto& A = self.inputs[0];
    auto& B = self.inputs[1];
    if (needs(A)) {
      Tensor<T> bt = kernel::transpose(B->value);
      kernel::gemm_nn(self.grad.data(), bt.data(), A->ensure_grad().data(), m, n, k);
    }
    if (needs(B)) kernel::gemm_tn(A->value.data(), self.grad.data(), B->ensure_grad().data(), m, k, n);
  });
}

template <typename T>
Var<T> matmul_bt(const Var<T>& a, const Var<T>& b) {
  const std::size_t m = a.rows(), k = a.cols(), n = b.rows();
  XLEDIT_REQUIRE(b.cols() == k, "matmul_bt: inner dimension mismatch " + shape_str(a.shape()) +
                                    " x " + shape_str(b.shape()) + "^T");
  Tensor<T> bt = kernel::transpose(b.value());
  Tensor<T> out(Shape{m, n});
  kernel::gemm_nn(a.value().data(), bt.data(), out.data(), m, k, n);
  return make_result<T>(std::move(out), {a, b}, [m, k, n](Node<T>& self) {
    auto& A = self.inputs[0];
    auto& B = self.inputs[1];
    // dA = dC * B ; dB = dC^T * A
    if (needs(A)) kernel::gemm_nn(self.grad.data(), B->value.data(), A->ensure_grad().data(), m, n, k);
    if (needs(B)) kernel::gemm_tn(self.grad.data(), A->value.data(), B->ensure_grad().data(), m, n, k);
  });
}

template <typename T>
Var<T> add(const Var<T>& a, const Var<T>& b) {
  require_same(a, b, "add");
  Tensor<T> out = a.value();
  const T* bv = b.value().data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += bv[i];
  return make_result<T>(std::move(out), {a, b}, [](Node<T>& self) {
    for (auto& in : self.inputs) {
      if (!needs(in)) continue;
      auto& g = in->ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    }
  });
}

template <typename T>
Var<T> add_row(const Var<T>& a, const Var<T>& bias) {
  const std::size_t m = a.rows(), n = a.cols();
  XLEDIT_REQUIRE(bias.value().size() == n, "add_row: bias length " +
                                               std::to_string(bias.value().size()) +
                                               " does not match " + std::to_string(n) + " columns");
  Tensor<T> out = a.value();
  const T* bv = bias.value().data();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out[i * n + j] += bv[j];
  return make_result<T>(std::move(out), {a, bias}, [m, n](Node<T>& self) {
    auto& A = self.inputs[0];
    auto& B = self.inputs[1];
    if (needs(A)) {
      auto& g = A->ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    }
    if (needs(B)) {
      auto& g = B->ensure_grad();
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) g[j] += self.grad[i * n + j];
    }
  });
}

template <typename T>
Var<T> mul(const Var<T>& a, const Var<T>& b) {
  require_same(a, b, "mul");
  Tensor<T> out = a.value();
  const T* bv = b.value().data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= bv[i];
  return make_result<T>(std::move(out), {a, b}, [](Node<T>& self) {
    auto& A = self.inputs[0];
    auto& B = self.inputs[1];
    if (needs(A)) {
      auto& g = A->ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * B->value[i];
    }
    if (needs(B)) {
      auto& g = B->ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * A->value[i];
    }
  });
}

template <typename T>
Var<T> scale(const Var<T>& a, T factor) {
  Tensor<T> out = a.value();
  for (auto& v : out.values()) v *= factor;
  return make_result<T>(std::move(out), {a}, [factor](Node<T>& self) {
    auto& g = self.inputs[0]->ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * factor;
  });
}

template <typename T>
Var<T> gelu(const Var<T>& a) {
  Tensor<T> out = a.value();
  const T inv_sqrt2 = T(1) / std::sqrt(T(2));
  for (auto& v : out.values()) v = T(0.5) * v * (T(1) + std::erf(v * inv_sqrt2));
  return make_result<T>(std::move(out), {a}, [inv_sqrt2](Node<T>& self) {
    auto& in = self.inputs[0];
    auto& g = in->ensure_grad();
    const T inv_sqrt_2pi = T(1) / std::sqrt(T(2) * std::numbers::pi_v<T>);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const T x = in->value[i];
      const T cdf = T(0.5) * (T(1) + std::erf(x * inv_sqrt2));
      const T pdf = std::exp(T(-0.5) * x * x) * inv_sqrt_2pi;
      g[i] += self.grad[i] * (cdf + x * pdf);
    }
  });
}

template <typename T>
Var<T> log(const Var<T>& a) {
  Tensor<T> out = a.value();
  for (auto& v : out.values()) v = std::log(v);
  return make_result<T>(std::move(out), {a}, [](Node<T>& self) {
    auto& in = self.inputs[0];
    auto& g = in->ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] / in->value[i];
  });
}

template <typename T>
Var<T> exp(const Var<T>& a) {
  Tensor<T> out = a.value();
  for (auto& v : out.values()) v = std::exp(v);
  return make_result<T>(std::move(out), {a}, [](Node<T>& self) {
    auto& g = self.inputs[0]->ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * self.value[i];
  });
}

template <typename T>
Var<T> layernorm(const Var<T>& x, const Var<T>& gamma, const Var<T>& beta, T eps) {
  const std::size_t m = x.rows(), n = x.cols();
  XLEDIT_REQUIRE(gamma.value().size() == n && beta.value().size() == n,
                 "layernorm: gain/bias length must equal " + std::to_string(n));
  Tensor<T> out(x.shape());
  Tensor<T> xhat(x.shape());
  std::vector<T> rstd(m);
  const T* xv = x.value().data();
  const T* gv = gamma.value().data();
  const T* bv = beta.value().data();
  for (std::size_t i = 0; i < m; ++i) {
    const T* r = xv + i * n;
    T mu = 0;
    for (std::size_t j = 0; j < n; ++j) mu += r[j];
    mu /= T(n);
    T var = 0;
    for (std::size_t j = 0; j < n; ++j) var += (r[j] - mu) * (r[j] - mu);
    var /= T(n);
    rstd[i] = T(1) / std::sqrt(var + eps);
    for (std::size_t j = 0; j < n; ++j) {
      const T h = (r[j] - mu) * rstd[i];
      xhat[i * n + j] = h;
      out[i * n + j] = gv[j] * h + bv[j];
    }
  }
  return make_result<T>(
      std::move(out), {x, gamma, beta},
      [m, n, xhat = std::move(xhat), rstd = std::move(rstd)](Node<T>& self) {
        auto& X = self.inputs[0];
        auto& G = self.inputs[1];
        auto& B = self.inputs[2];
        const T* dy = self.grad.data();
        if (needs(G)) {
          auto& g = G->ensure_grad();
          for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j) g[j] += dy[i * n + j] * xhat[i * n + j];
        }
        if (needs(B)) {
          auto& g = B->ensure_grad();
          for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j) g[j] += dy[i * n + j];
        }
        if (needs(X)) {
          auto& g = X->ensure_grad();
          const T* gam = G->value.data();
          std::vector<T> dxh(n);
          for (std::size_t i = 0; i < m; ++i) {
            T s1 = 0, s2 = 0;
            for (std::size_t j = 0; j < n; ++j) {
              dxh[j] = dy[i * n + j] * gam[j];
              s1 += dxh[j];
              s2 += dxh[j] * xhat[i * n + j];
            }
            s1 /= T(n);
            s2 /= T(n);
            for (std::size_t j = 0; j < n; ++j)
              g[i * n + j] += rstd[i] * (dxh[j] - s1 - xhat[i * n + j] * s2);
          }
        }
      });
}

template <typename T>
Var<T> softmax(const Var<T>& x, const Mask* mask) {
  const std::size_t m = x.rows(), n = x.cols();
  if (mask) XLEDIT_REQUIRE(mask->rows == m && mask->cols == n, "softmax: mask shape mismatch");
  Tensor<T> out(x.shape());
  const T* xv = x.value().data();
  for (std::size_t i = 0; i < m; ++i) {
    T mx = -std::numeric_limits<T>::infinity();
    for (std::size_t j = 0; j < n; ++j)
      if (!mask || (*mask)(i, j)) mx = std::max(mx, xv[i * n + j]);
    if (mx == -std::numeric_limits<T>::infinity()) continue;  // fully masked row
    T z = 0;
    for (std::size_t j = 0; j < n; ++j) {
      const T e = (!mask || (*mask)(i, j)) ? std::exp(xv[i * n + j] - mx) : T(0);
      out[i * n + j] = e;
      z += e;
    }
    for (std::size_t j = 0; j < n; ++j) out[i * n + j] /= z;
  }
  return make_result<T>(std::move(out), {x}, [m, n](Node<T>& self) {
    auto& g = self.inputs[0]->ensure_grad();
    const T* p = self.value.data();
    const T* dp = self.grad.data();
    for (std::size_t i = 0; i < m; ++i) {
      T dot = 0;
      for (std::size_t j = 0; j < n; ++j) dot += dp[i * n + j] * p[i * n + j];
      for (std::size_t j = 0; j < n; ++j) g[i * n + j] += p[i * n + j] * (dp[i * n + j] - dot);
    }
  });
}

template <typename T>
Var<T> log_softmax(const Var<T>& x, const Mask* mask) {
  const std::size_t m = x.rows(), n = x.cols();
  if (mask) XLEDIT_REQUIRE(mask->rows == m && mask->cols == n, "log_softmax: mask shape mismatch");
  const T ninf = -std::numeric_limits<T>::infinity();
  Tensor<T> out(x.shape(), ninf);
  const T* xv = x.value().data();
  for (std::size_t i = 0; i < m; ++i) {
    T mx = ninf;
    for (std::size_t j = 0; j < n; ++j)
      if (!mask || (*mask)(i, j)) mx = std::max(mx, xv[i * n + j]);
    XLEDIT_REQUIRE(mx != ninf, "log_softmax: row with every entry masked");
    T z = 0;
    for (std::size_t j = 0; j < n; ++j)
      if (!mask || (*mask)(i, j)) z += std::exp(xv[i * n + j] - mx);
    const T lz = mx + std::log(z);
    for (std::size_t j = 0; j < n; ++j)
      if (!mask || (*mask)(i, j)) out[i * n + j] = xv[i * n + j] - lz;
  }
  return make_result<T>(std::move(out), {x}, [m, n](Node<T>& self) {
    auto& g = self.inputs[0]->ensure_grad();
    const T* y = self.value.data();
    const T* dy = self.grad.data();
    const T ninf = -std::numeric_limits<T>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
      T total = 0;
      for (std::size_t j = 0; j < n; ++j)
        if (y[i * n + j] != ninf) total += dy[i * n + j];
      for (std::size_t j = 0; j < n; ++j)
        if (y[i * n + j] != ninf) g[i * n + j] += dy[i * n + j] - std::exp(y[i * n + j]) * total;
    }
  });
}

template <typename T>
Var<T> embedding(const Var<T>& table, std::span<const int> ids) {
  const std::size_t v = table.rows(), d = table.cols();
  Tensor<T> out(Shape{ids.size(), d});
  std::vector<int> idv(ids.begin(), ids.end());
  for (std::size_t i = 0; i < idv.size(); ++i) {
    XLEDIT_REQUIRE(idv[i] >= 0 && static_cast<std::size_t>(idv[i]) < v,
                   "embedding: id " + std::to_string(idv[i]) + " out of range " + std::to_string(v));
    std::copy_n(table.value().data() + idv[i] * d, d, out.data() + i * d);
  }
  return make_result<T>(std::move(out), {table}, [d, idv = std::move(idv)](Node<T>& self) {
    auto& g = self.inputs[0]->ensure_grad();
    for (std::size_t i = 0; i < idv.size(); ++i) {
      T* gr = g.data() + idv[i] * d;
      const T* dr = self.grad.data() + i * d;
      for (std::size_t j = 0; j < d; ++j) gr[j] += dr[j];
    }
  });
}

template <typename T>
Var<T> gather_cols(const Var<T>& x, std::span<const int> index) {
  const std::size_t m = x.rows(), r = x.cols();
  XLEDIT_REQUIRE(m > 0 && index.size() % m == 0, "gather_cols: index size not a multiple of rows");
  const std::size_t n = index.size() / m;
  std::vector<int> idx(index.begin(), index.end());
  Tensor<T> out(Shape{m, n});
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const int c = idx[i * n + j];
      XLEDIT_REQUIRE(c >= 0 && static_cast<std::size_t>(c) < r, "gather_cols: column out of range");
      out[i * n + j] = x.value()[i * r + c];
    }
  return make_result<T>(std::move(out), {x}, [m, n, r, idx = std::move(idx)](Node<T>& self) {
    auto& g = self.inputs[0]->ensure_grad();
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) g[i * r + idx[i * n + j]] += self.grad[i * n + j];
  });
}

template <typename T>
Var<T> pick(const Var<T>& x, std::span<const int> cols) {
  const std::size_t m = x.rows(), n = x.cols();
  XLEDIT_REQUIRE(cols.size() == m, "pick: need one column per row");
  std::vector<int> c(cols.begin(), cols.end());
  Tensor<T> out(Shape{m});
  for (std::size_t i = 0; i < m; ++i) {
    XLEDIT_REQUIRE(c[i] >= 0 && static_cast<std::size_t>(c[i]) < n, "pick: column out of range");
    out[i] = x.value()[i * n + c[i]];
  }
  return make_result<T>(std::move(out), {x}, [n, c = std::move(c)](Node<T>& self) {
    auto& g = self.inputs[0]->ensure_grad();
    for (std::size_t i = 0; i < c.size(); ++i) g[i * n + c[i]] += self.grad[i];
  });
}

template <typename T>
Var<T> sum(const Var<T>& x) {
  T s = 0;
  for (T v : x.value().values()) s += v;
  return make_result<T>(Tensor<T>::scalar(s), {x}, [](Node<T>& self) {
    auto& g = self.inputs[0]->ensure_grad();
    const T d = self.grad[0];
    for (auto& v : g.values()) v += d;
  });
}

template <typename T>
Var<T> mean(const Var<T>& x) {
  XLEDIT_REQUIRE(x.value().size() > 0, "mean of empty tensor");
  return scale(sum(x), T(1) / T(x.value().size()));
}

template <typename T>
Var<T> slice_rows(const Var<T>& x, std::size_t begin, std::size_t end) {
  XLEDIT_REQUIRE(begin <= end && end <= x.rows(), "slice_rows: bad range");
  const std::size_t n = x.cols();
  Shape s = x.shape();
  if (s.empty()) s = {1};
  s[0] = end - begin;
  Tensor<T> out(s);
  std::copy_n(x.value().data() + begin * n, (end - begin) * n, out.data());
  return make_result<T>(std::move(out), {x}, [begin, n](Node<T>& self) {
    auto& g = self.inputs[0]->ensure_grad();
    T* dst = g.data() + begin * n;
    for (std::size_t i = 0; i < self.grad.size(); ++i) dst[i] += self.grad[i];
  });
}

template <typename T>
Var<T> slice_cols(const Var<T>& x, std::size_t begin, std::size_t end) {
  const std::size_t m = x.rows(), n = x.cols();
  XLEDIT_REQUIRE(begin <= end && end <= n, "slice_cols: bad range");
  const std::size_t w = end - begin;
  Tensor<T> out(Shape{m, w});
  for (std::size_t i = 0; i < m; ++i)
    std::copy_n(x.value().data() + i * n + begin, w, out.data() + i * w);
  return make_result<T>(std::move(out), {x}, [m, n, w, begin](Node<T>& self) {
    auto& g = self.inputs[0]->ensure_grad();
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < w; ++j) g[i * n + begin + j] += self.grad[i * w + j];
  });
}

template <typename T>
Var<T> concat_rows(const std::vector<Var<T>>& parts) {
  XLEDIT_REQUIRE(!parts.empty(), "concat_rows: no inputs");
  const std::size_t n = parts.front().cols();
  std::size_t m = 0;
  for (const auto& p : parts) {
    XLEDIT_REQUIRE(p.rows() == 0 || p.cols() == n, "concat_rows: column mismatch");
    m += p.rows();
  }
  Tensor<T> out(Shape{m, n});
  std::size_t at = 0;
  std::vector<std::size_t> offsets;
  for (const auto& p : parts) {
    offsets.push_back(at);
    std::copy_n(p.value().data(), p.rows() * n, out.data() + at * n);
    at += p.rows();
  }
  return make_result<T>(std::move(out), parts, [n, offsets = std::move(offsets)](Node<T>& self) {
    for (std::size_t k = 0; k < self.inputs.size(); ++k) {
      auto& in = self.inputs[k];
      if (!needs(in)) continue;
      auto& g = in->ensure_grad();
      const T* src = self.grad.data() + offsets[k] * n;
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += src[i];
    }
  });
}

template <typename T>
Var<T> concat_cols(const std::vector<Var<T>>& parts) {
  XLEDIT_REQUIRE(!parts.empty(), "concat_cols: no inputs");
  const std::size_t m = parts.front().rows();
  std::size_t n = 0;
  std::vector<std::size_t> offsets, widths;
  for (const auto& p : parts) {
    XLEDIT_REQUIRE(p.rows() == m, "concat_cols: row mismatch");
    offsets.push_back(n);
    widths.push_back(p.cols());
    n += p.cols();
  }
  Tensor<T> out(Shape{m, n});
  for (std::size_t k = 0; k < parts.size(); ++k)
    for (std::size_t i = 0; i < m; ++i)
      std::copy_n(parts[k].value().data() + i * widths[k], widths[k], out.data() + i * n + offsets[k]);
  return make_result<T>(
      std::move(out), parts,
      [m, n, offsets = std::move(offsets), widths = std::move(widths)](Node<T>& self) {
        for (std::size_t k = 0; k < self.inputs.size(); ++k) {
          auto& in = self.inputs[k];
          if (!needs(in)) continue;
          auto& g = in->ensure_grad();
          for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < widths[k]; ++j)
              g[i * widths[k] + j] += self.grad[i * n + offsets[k] + j];
        }
      });
}

template <typename T>
Var<T> repeat_rows(const Var<T>& x, std::size_t m) {
  const std::size_t n = x.value().size();
  Tensor<T> out(Shape{m, n});
  for (std::size_t i = 0; i < m; ++i) std::copy_n(x.value().data(), n, out.data() + i * n);
  return make_result<T>(std::move(out), {x}, [m, n](Node<T>& self) {
    auto& g = self.inputs[0]->ensure_grad();
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) g[j] += self.grad[i * n + j];
  });
}

#define XLEDIT_INSTANTIATE_OPS(T)                                                        \
  template Var<T> matmul(const Var<T>&, const Var<T>&);                                  \
  template Var<T> matmul_bt(const Var<T>&, const Var<T>&);                               \
  template Var<T> add(const Var<T>&, const Var<T>&);                                     \
  template Var<T> add_row(const Var<T>&, const Var<T>&);                                 \
  template Var<T> mul(const Var<T>&, const Var<T>&);                                     \
  template Var<T> scale(const Var<T>&, T);                                               \
  template Var<T> gelu(const Var<T>&);                                                   \
  template Var<T> log(const Var<T>&);                                                    \
  template Var<T> exp(const Var<T>&);                                                    \
  template Var<T> layernorm(const Var<T>&, const Var<T>&, const Var<T>&, T);             \
  template Var<T> softmax(const Var<T>&, const Mask*);                                   \
  template Var<T> log_softmax(const Var<T>&, const Mask*);                               \
  template Var<T> embedding(const Var<T>&, std::span<const int>);                        \
  template Var<T> gather_cols(const Var<T>&, std::span<const int>);                      \
  template Var<T> pick(const Var<T>&, std::span<const int>);                             \
  template Var<T> sum(const Var<T>&);                                                    \
  template Var<T> mean(const Var<T>&);                                                   \
  template Var<T> slice_rows(const Var<T>&, std::size_t, std::size_t);                   \
  template Var<T> slice_cols(const Var<T>&, std::size_t, std::size_t);                   \
  template Var<T> concat_rows(const std::vector<Var<T>>&);                               \
  template Var<T> concat_cols(const std::vector<Var<T>>&);                               \
  template Var<T> repeat_rows(const Var<T>&, std::size_t);

XLEDIT_INSTANTIATE_OPS(float)
XLEDIT_INSTANTIATE_OPS(double)

}  // namespace ops
}  // namespace xledit::num
