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

#include "xledit/encoding/compose.hpp"

#include <algorithm>
#include <cmath>

#include "xledit/error.hpp"

namespace xledit::enc {

ComposedRow compose(const SpanSample& s, const Vocabulary& vocab, const ComposeOptions& opts) {
  const int n = static_cast<int>(s.x.size());
  XLEDIT_REQUIRE(1 <= s.i && s.i <= s.j + 1 && s.j <= n,
                 "span (" + std::to_string(s.i) + ", " + std::to_string(s.j) + ") out of bounds for length " +
                     std::to_string(n));
  XLEDIT_REQUIRE(!opts.l2r || s.j >= s.i, "left-to-right composition needs a non-empty span");
  for (int t : s.x) XLEDIT_REQUIRE(t >= 0 && t < vocab.size(), "token id out of vocabulary range");

  ComposedRow row;
  row.l2r = opts.l2r;
  row.tokens.reserve(s.x.size() + 3);
  row.tokens.insert(row.tokens.end(), s.x.begin(), s.x.begin() + s.j);
  if (!opts.l2r) row.tokens.push_back(kEoi);
  row.tokens.insert(row.tokens.end(), s.x.begin() + s.j, s.x.end());
  if (opts.conditional) {
    XLEDIT_REQUIRE(s.style >= 0, "conditional composition needs a style");
    row.tokens.push_back(vocab.style_token(s.style));
    row.style = s.style;
  }
  if (opts.with_cls) {
    row.tokens.push_back(kCls);
    row.has_cls = true;
  }
  row.layout = {row.length(), s.i, opts.l2r ? s.j : s.j + 1};
  return row;
}

std::vector<int> strip_span(const ComposedRow& row) {
  const int trailing = (row.style >= 0 ? 1 : 0) + (row.has_cls ? 1 : 0);
  std::vector<int> out(row.tokens.begin(), row.tokens.begin() + (row.layout.a - 1));
  out.insert(out.end(), row.tokens.begin() + row.layout.b, row.tokens.end() - trailing);
  return out;
}

std::pair<int, int> sample_interval(int n, num::Rng& rng, bool strict) {
  XLEDIT_REQUIRE(n >= 1, "cannot sample an interval of an empty sequence");
  XLEDIT_REQUIRE(!strict || n >= 2, "strict intervals need at least two tokens");
  // Enumerate intervals by start: start i owns (n - i + 1) of them, or
  // (n - i) when strict.
  const std::uint64_t total =
      strict ? static_cast<std::uint64_t>(n) * (n - 1) / 2 : static_cast<std::uint64_t>(n) * (n + 1) / 2;
  std::uint64_t k = rng.below(total);
  for (int i = 1; i <= n; ++i) {
    const std::uint64_t owned = strict ? n - i : n - i + 1;
    if (k < owned) return {i, i + static_cast<int>(k) + (strict ? 1 : 0)};
    k -= owned;
  }
  throw ContractError("interval enumeration overran");
}

int ComposedBatch::max_length() const {
  int m = 0;
  for (auto& r : rows) m = std::max(m, r.length());
  return m;
}

std::vector<int> ComposedBatch::padded() const {
  const int w = max_length();
  std::vector<int> out(rows.size() * static_cast<std::size_t>(w), kPad);
  for (std::size_t r = 0; r < rows.size(); ++r)
    std::copy(rows[r].tokens.begin(), rows[r].tokens.end(), out.begin() + r * w);
  return out;
}

}  // namespace xledit::enc
