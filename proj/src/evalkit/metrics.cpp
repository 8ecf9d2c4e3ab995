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

#include "xledit/evalkit/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>

#include "xledit/error.hpp"

namespace xledit::evalkit {

namespace {

constexpr int kOrder = 4;

struct Counts {
  std::array<double, kOrder> match{};
  std::array<double, kOrder> total{};
  double hyp_len = 0;
  double ref_len = 0;
};

using NGrams = std::map<std::vector<std::string>, int>;

NGrams ngrams(std::span<const std::string> s, int n) {
  NGrams out;
  for (std::size_t k = 0; k + n <= s.size(); ++k) ++out[std::vector<std::string>(s.begin() + k, s.begin() + k + n)];
  return out;
}

void accumulate(Counts& c, std::span<const std::string> hyp, std::span<const std::string> ref) {
  if (ref.empty()) throw DataError("BLEU needs a non-empty reference");
  for (int n = 1; n <= kOrder; ++n) {
    const auto h = ngrams(hyp, n);
    const auto r = ngrams(ref, n);
    for (const auto& [g, cnt] : h) {
      c.total[n - 1] += cnt;
      auto it = r.find(g);
      if (it != r.end()) c.match[n - 1] += std::min(cnt, it->second);
    }
  }
  c.hyp_len += static_cast<double>(hyp.size());
  c.ref_len += static_cast<double>(ref.size());
}

double score(const Counts& c) {
  if (c.hyp_len == 0) return 0.0;
  double log_p = 0;
  for (int n = 0; n < kOrder; ++n) log_p += std::log((c.match[n] + 1) / (c.total[n] + 1));
  const double bp = c.hyp_len >= c.ref_len ? 0.0 : 1.0 - c.ref_len / c.hyp_len;
  return 100.0 * std::exp(bp + log_p / kOrder);
}

}  // namespace

double bleu(std::span<const std::string> hyp, std::span<const std::string> ref) {
  Counts c;
  accumulate(c, hyp, ref);
  return score(c);
}

double corpus_bleu(std::span<const std::pair<Tokens, Tokens>> hyp_ref) {
  if (hyp_ref.empty()) throw DataError("corpus BLEU over an empty set");
  Counts c;
  for (const auto& [h, r] : hyp_ref) accumulate(c, h, r);
  return score(c);
}

double g_score(double style_acc, double bleu) {
  XLEDIT_REQUIRE(style_acc >= 0 && style_acc <= 100 && bleu >= 0 && bleu <= 100, "g_score inputs must be percentages");
  return std::sqrt(style_acc * bleu);
}

std::pair<int, int> kept_tokens(std::span<const std::string> input, std::span<const std::string> output,
                                const std::unordered_set<std::string>& style_words) {
  std::vector<std::string> plain;
  for (const auto& w : input)
    if (!style_words.count(w)) plain.push_back(w);
  const std::size_t n = plain.size(), m = output.size();
  std::vector<int> prev(m + 1, 0), cur(m + 1, 0);
  for (std::size_t a = 1; a <= n; ++a) {
    for (std::size_t b = 1; b <= m; ++b)
      cur[b] = plain[a - 1] == output[b - 1] ? prev[b - 1] + 1 : std::max(prev[b], cur[b - 1]);
    std::swap(prev, cur);
  }
  return {prev[m], static_cast<int>(n)};
}

}  // namespace xledit::evalkit
