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

#include "xledit/positional/offsets.hpp"

#include <cstdio>

#include "xledit/error.hpp"

namespace xledit::pos {

void SpanLayout::validate() const {
  XLEDIT_REQUIRE(1 <= a && a <= b && b <= total_len,
                 "invalid span layout: need 1 <= a <= b <= total_len, got a=" + std::to_string(a) +
                     " b=" + std::to_string(b) + " total_len=" + std::to_string(total_len));
}

std::optional<int> phi(int a, int b, int i, int j) {
  if ((i < a && j < a) || (i > b && j > b)) return 0;
  if (i < a && j > b) return b - a;
  if (i > b && j < a) return b - a;
  if (a <= i && i <= b && j <= i) return 0;
  if (a <= i && i <= b && b < j) return b - i - 1;
  return std::nullopt;
}

std::optional<int> effective_offset(int a, int b, int i, int j) {
  const auto p = phi(a, b, i, j);
  if (!p) return std::nullopt;
  const int raw = i - j;
  const int sign = (raw > 0) - (raw < 0);
  return raw - sign * *p;
}

std::optional<int> oracle_offset(int a, int b, int i, int j) {
  const bool i_in = a <= i && i <= b;
  const bool j_in = a <= j && j <= b;
  const bool i_left = i < a, i_right = i > b;
  const bool j_left = j < a, j_right = j > b;
  if ((i_left && j_left) || (i_right && j_right) || (i_in && j <= i)) return i - j;
  if ((i_left && j_right) || (i_right && j_left)) {
    // Collapse the span to a single slot.
    auto c = [&](int p) { return p < a ? p : p - (b - a); };
    return c(i) - c(j);
  }
  if (i_in && j_right) return (b - 1) - j;  // query viewed from coordinate b - 1
  (void)j_in;
  return std::nullopt;
}

std::optional<int> pair_offset(OffsetScheme scheme, const SpanLayout& layout, int i, int j) {
  switch (scheme) {
    case OffsetScheme::kFull:
      return i - j;
    case OffsetScheme::kLeftToRight:
      if (!phi(layout.a, layout.b, i, j)) return std::nullopt;
      return i - j;
    case OffsetScheme::kInsertion:
    default:
      return effective_offset(layout.a, layout.b, i, j);
  }
}

OffsetMatrix build_offset_matrix(const SpanLayout& layout, OffsetScheme scheme) {
  if (scheme != OffsetScheme::kFull) layout.validate();
  OffsetMatrix m;
  m.n = layout.total_len;
  m.offsets.assign(static_cast<std::size_t>(m.n) * m.n, 0);
  m.legal.assign(static_cast<std::size_t>(m.n) * m.n, 0);
  for (int i = 1; i <= m.n; ++i)
    for (int j = 1; j <= m.n; ++j) {
      const auto off = pair_offset(scheme, layout, i, j);
      if (!off) continue;
      m.offsets[(i - 1) * m.n + (j - 1)] = *off;
      m.legal[(i - 1) * m.n + (j - 1)] = 1;
    }
  return m;
}

OffsetMatrix build_full_offset_matrix(int n) {
  return build_offset_matrix(SpanLayout{n, 1, 1}, OffsetScheme::kFull);
}

std::string render(const OffsetMatrix& m) {
  std::string out = "    ";
  char buf[16];
  for (int j = 1; j <= m.n; ++j) {
    std::snprintf(buf, sizeof buf, "%4d", j);
    out += buf;
  }
  out += "\n";
  for (int i = 0; i < m.n; ++i) {
    std::snprintf(buf, sizeof buf, "%3d ", i + 1);
    out += buf;
    for (int j = 0; j < m.n; ++j) {
      if (!m.is_legal(i, j)) {
        out += "   .";
      } else if (m.offset(i, j) == 0) {
        out += "   0";
      } else {
        std::snprintf(buf, sizeof buf, "%+4d", m.offset(i, j));
        out += buf;
      }
    }
    out += "\n";
  }
  return out;
}

}  // namespace xledit::pos
