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

// The closed set of differentiable ops. All matrix ops treat their inputs
// as [rows, cols]; there is no implicit broadcasting except add_row and
// repeat_rows.
//
// Every kernel accumulates each output element over its reduction index in
// ascending order, independent of how many rows or columns the operands
// have. A row's result therefore does not depend on what other rows are in
// the batch, which the insertion model relies on for exact comparisons
// between layouts of different length.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "xledit/numerics/autograd.hpp"

namespace xledit::num {

/// Row-major boolean matrix; a zero entry removes that key from a softmax.
struct Mask {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint8_t> bits;

  Mask() = default;
  Mask(std::size_t r, std::size_t c, bool fill = true) : rows(r), cols(c), bits(r * c, fill ? 1 : 0) {}
  bool operator()(std::size_t r, std::size_t c) const { return bits[r * cols + c] != 0; }
  void set(std::size_t r, std::size_t c, bool v) { bits[r * cols + c] = v ? 1 : 0; }
};

namespace kernel {
/// c[m,n] += a[m,k] * b[k,n]
template <typename T>
void gemm_nn(const T* a, const T* b, T* c, std::size_t m, std::size_t k, std::size_t n);
/// c[k,n] += a[m,k]^T * b[m,n]
template <typename T>
void gemm_tn(const T* a, const T* b, T* c, std::size_t m, std::size_t k, std::size_t n);
template <typename T>
Tensor<T> transpose(const Tensor<T>& x);
}  // namespace kernel

namespace ops {

template <typename T> Var<T> matmul(const Var<T>& a, const Var<T>& b);     // [m,k]x[k,n]
template <typename T> Var<T> matmul_bt(const Var<T>& a, const Var<T>& b);  // [m,k]x[n,k]^T

template <typename T> Var<T> add(const Var<T>& a, const Var<T>& b);
template <typename T> Var<T> add_row(const Var<T>& a, const Var<T>& bias);  // bias has cols(a) values
template <typename T> Var<T> mul(const Var<T>& a, const Var<T>& b);
template <typename T> Var<T> scale(const Var<T>& a, T factor);

template <typename T> Var<T> gelu(const Var<T>& a);
template <typename T> Var<T> log(const Var<T>& a);
template <typename T> Var<T> exp(const Var<T>& a);

template <typename T>
Var<T> layernorm(const Var<T>& x, const Var<T>& gamma, const Var<T>& beta, T eps = T(1e-5));

/// Row softmax. Masked entries get probability 0; a row with no unmasked
/// entry yields all zeros. nullptr means no mask.
template <typename T> Var<T> softmax(const Var<T>& x, const Mask* mask = nullptr);
/// Row log-softmax; masked entries hold -inf and receive no gradient.
template <typename T> Var<T> log_softmax(const Var<T>& x, const Mask* mask = nullptr);

/// Rows of `table` selected by ids: [ids.size(), cols(table)].
template <typename T> Var<T> embedding(const Var<T>& table, std::span<const int> ids);
/// out[i][j] = x[i][index[i*n + j]] with n = index.size() / rows(x).
template <typename T> Var<T> gather_cols(const Var<T>& x, std::span<const int> index);
/// out[i] = x[i][cols[i]], shape [rows(x)].
template <typename T> Var<T> pick(const Var<T>& x, std::span<const int> cols);

template <typename T> Var<T> sum(const Var<T>& x);
template <typename T> Var<T> mean(const Var<T>& x);

template <typename T> Var<T> slice_rows(const Var<T>& x, std::size_t begin, std::size_t end);
template <typename T> Var<T> slice_cols(const Var<T>& x, std::size_t begin, std::size_t end);
template <typename T> Var<T> concat_rows(const std::vector<Var<T>>& parts);
template <typename T> Var<T> concat_cols(const std::vector<Var<T>>& parts);
/// [1,n] -> [m,n]
template <typename T> Var<T> repeat_rows(const Var<T>& x, std::size_t m);

}  // namespace ops
}  // namespace xledit::num
