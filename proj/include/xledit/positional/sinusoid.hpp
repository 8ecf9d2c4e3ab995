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

#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "xledit/numerics/tensor.hpp"

namespace xledit::pos {

/// R_d for d in [-max_offset, max_offset]: interleaved
/// [sin(d w_0), cos(d w_0), sin(d w_1), ...] with w_k = 10000^(-2k/dim).
/// Offsets outside the range clamp to the boundary.
class SinusoidTable {
 public:
  SinusoidTable(int dim, int max_offset);

  int dim() const { return dim_; }
  int max_offset() const { return max_offset_; }
  int clamp(int offset) const { return std::clamp(offset, -max_offset_, max_offset_); }

  std::span<const double> row(int offset) const {
    const int r = clamp(offset) + max_offset_;
    return {table_.data() + static_cast<std::size_t>(r) * dim_, static_cast<std::size_t>(dim_)};
  }

  /// Rows for offsets lo..hi (inclusive) as a [hi-lo+1, dim] tensor.
  template <typename T>
  num::Tensor<T> rows(int lo, int hi) const {
    num::Tensor<T> out(num::Shape{static_cast<std::size_t>(hi - lo + 1), static_cast<std::size_t>(dim_)});
    for (int d = lo; d <= hi; ++d) {
      auto src = row(d);
      std::transform(src.begin(), src.end(), out.data() + static_cast<std::size_t>(d - lo) * dim_,
                     [](double v) { return static_cast<T>(v); });
    }
    return out;
  }

 private:
  int dim_;
  int max_offset_;
  std::vector<double> table_;
};

}  // namespace xledit::pos
