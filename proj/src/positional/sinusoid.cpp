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

#include "xledit/positional/sinusoid.hpp"

#include <cmath>

#include "xledit/error.hpp"

namespace xledit::pos {

SinusoidTable::SinusoidTable(int dim, int max_offset) : dim_(dim), max_offset_(max_offset) {
  XLEDIT_REQUIRE(dim > 0 && dim % 2 == 0, "sinusoid dimension must be positive and even");
  XLEDIT_REQUIRE(max_offset >= 1, "sinusoid max offset must be >= 1");
  table_.resize(static_cast<std::size_t>(2 * max_offset + 1) * dim);
  for (int d = -max_offset; d <= max_offset; ++d) {
    double* r = table_.data() + static_cast<std::size_t>(d + max_offset) * dim;
    for (int k = 0; k < dim / 2; ++k) {
      const double freq = std::pow(10000.0, -2.0 * k / dim);
      r[2 * k] = std::sin(d * freq);
      r[2 * k + 1] = std::cos(d * freq);
    }
  }
}

}  // namespace xledit::pos
