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

#include "xledit/editor/editor.hpp"

#include <cmath>
#include <limits>

#include "xledit/encoding/vocab.hpp"
#include "xledit/error.hpp"

namespace xledit::edit {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::vector<int> cut(std::span<const int> x, int from, int to) {  // 0-based [from, to)
  return std::vector<int>(x.begin() + from, x.begin() + to);
}

void check_span(std::span<const int> x, int i, int j) {
  const int n = static_cast<int>(x.size());
  if (i < 1 || i > n + 1 || j < i - 1 || j > n)
    throw DataError("span [" + std::to_string(i) + ", " + std::to_string(j) + "] does not fit a sequence of " +
                    std::to_string(n) + " tokens");
}

template <typename T>
void check_payload(const model::Model<T>& model, std::span<const int> y) {
  const auto& ok = model.emittable();
  for (int t : y)
    if (t < 0 || t >= model.config().vocab_size || !ok[t] || t == enc::kEoi)
      throw DataError("token id " + std::to_string(t) + " cannot appear in an insertion");
}

}  // namespace

std::string to_string(EditKind k) {
  switch (k) {
    case EditKind::kInsert: return "insert";
    case EditKind::kDelete: return "delete";
    case EditKind::kReplace: return "replace";
  }
  return "?";
}

void EditOp::check() const {
  const bool gap = j == i - 1;
  XLEDIT_REQUIRE(j >= i - 1, "edit span ends before it starts");
  switch (kind) {
    case EditKind::kInsert: XLEDIT_REQUIRE(gap && !payload.empty(), "insert needs an empty span and a payload"); break;
    case EditKind::kDelete: XLEDIT_REQUIRE(!gap && payload.empty(), "delete needs a span and no payload"); break;
    case EditKind::kReplace: XLEDIT_REQUIRE(!gap && !payload.empty(), "replace needs a span and a payload"); break;
  }
}

std::vector<int> EditOp::apply(std::span<const int> x) const {
  check();
  XLEDIT_REQUIRE(i >= 1 && j <= static_cast<int>(x.size()), "edit span outside the sequence");
  std::vector<int> out(x.begin(), x.begin() + (i - 1));
  out.insert(out.end(), payload.begin(), payload.end());
  out.insert(out.end(), x.begin() + j, x.end());
  return out;
}

EditOp make_edit(int i, int j, std::vector<int> payload, double score) {
  EditOp op;
  op.i = i;
  op.j = j;
  op.score = score;
  if (j == i - 1)
    op.kind = EditKind::kInsert;
  else
    op.kind = payload.empty() ? EditKind::kDelete : EditKind::kReplace;
  op.payload = std::move(payload);
  op.check();
  return op;
}

template <typename T>
InsertionEstimate estimate_between(const model::Model<T>& model, std::span<const int> left,
                                   std::span<const int> right, std::span<const int> y, int style) {
  check_payload(model, y);
  const bool l2r = model.config().l2r;
  const int n = static_cast<int>(y.size());
  if (l2r && n == 0) throw DataError("a left-to-right model cannot score an empty insertion");
  model::InsertionSession<T> session(model, left, right, style, l2r ? n : n + 1);
  InsertionEstimate est;
  est.style = style;
  for (int t = 0; t < n; ++t) {
    const auto lp = session.next_log_probs();
    est.per_token_logprobs.push_back(static_cast<double>(lp[y[t]]));
    if (!l2r || t + 1 < n) session.push(y[t]);
  }
  if (!l2r) est.per_token_logprobs.push_back(static_cast<double>(session.next_log_probs()[enc::kEoi]));
  for (double v : est.per_token_logprobs) est.total_logprob += v;
  return est;
}

template <typename T>
InsertionEstimate estimate_insertion(const model::Model<T>& model, std::span<const int> x, int i, int j,
                                     std::span<const int> y, int style) {
  check_span(x, i, j);
  auto est = estimate_between(model, x.subspan(0, i - 1), x.subspan(j), y, style);
  est.i = i;
  est.j = j;
  return est;
}

double perplexity(const InsertionEstimate& est) {
  XLEDIT_REQUIRE(!est.per_token_logprobs.empty(), "perplexity of an estimate without scored slots");
  return std::exp(-est.total_logprob / static_cast<double>(est.per_token_logprobs.size()));
}

template <typename T>
std::vector<std::optional<double>> gap_scores(const model::Model<T>& model, std::span<const int> x,
                                              std::span<const int> gaps) {
  const int n = static_cast<int>(x.size());
  std::vector<std::optional<double>> out;
  for (int g : gaps) {
    if (g < 0 || g > n) throw DataError("gap " + std::to_string(g) + " outside a sequence of " + std::to_string(n));
    if (!model.config().l2r) {
      out.push_back(estimate_between(model, x.subspan(0, g), x.subspan(g), std::span<const int>{}).total_logprob);
    } else if (g == 0 || g == n) {
      out.push_back(std::nullopt);
    } else {
      out.push_back(estimate_insertion(model, x, g, g + 1, x.subspan(g - 1, 2)).total_logprob);
    }
  }
  return out;
}

template <typename T>
int locate(const model::Model<T>& model, std::span<const int> x, std::span<const int> gaps) {
  if (gaps.empty()) throw DataError("locate needs at least one candidate gap");
  const auto scores = gap_scores(model, x, gaps);
  int best = -1;
  double best_score = 0;
  for (std::size_t k = 0; k < gaps.size(); ++k) {
    if (!scores[k]) continue;
    if (best < 0 || *scores[k] < best_score || (*scores[k] == best_score && gaps[k] < best))
      best = gaps[k], best_score = *scores[k];
  }
  if (best < 0) {
    best = gaps[0];
    for (int g : gaps) best = std::min(best, g);
  }
  return best;
}

template <typename T>
int locate(const model::Model<T>& model, std::span<const int> x) {
  if (x.empty()) throw DataError("locate needs a non-empty sequence");
  std::vector<int> all;
  for (int g = 0; g <= static_cast<int>(x.size()); ++g) all.push_back(g);
  return locate(model, x, all);
}

template <typename T>
double replace_odds(const model::Model<T>& model, std::span<const int> x, int i, int j, std::span<const int> y,
                    int style) {
  check_span(x, i, j);
  if (j < i) throw DataError("replacement needs a non-empty span");
  const auto num = estimate_insertion(model, x, i, j, y, style);
  const auto den = estimate_insertion(model, x, i, j, x.subspan(i - 1, j - i + 1), style);
  return std::exp(num.total_logprob - den.total_logprob);
}

template <typename T>
InsertionEstimate sequence_estimate(const model::Model<T>& model, std::span<const int> x, int style) {
  auto est = estimate_between(model, std::span<const int>{}, std::span<const int>{}, x, style);
  est.i = 1;
  est.j = static_cast<int>(x.size());
  return est;
}

namespace {

double log_ppl(const InsertionEstimate& e) {
  return -e.total_logprob / static_cast<double>(e.per_token_logprobs.size());
}

template <typename T>
double ratio_score(const model::Model<T>& model, std::span<const int> x, Span s) {
  if (!model.config().l2r) {
    const auto span = estimate_insertion(model, x, s.i, s.j, x.subspan(s.i - 1, s.j - s.i + 1));
    const auto eoi = estimate_insertion(model, x, s.i, s.j, std::span<const int>{});
    return log_ppl(span) - log_ppl(eoi);
  }
  // Widen by one token on each side that exists; the denominator scores
  // just those neighbours joined together.
  const int n = static_cast<int>(x.size());
  const int wi = std::max(1, s.i - 1), wj = std::min(n, s.j + 1);
  const auto span = estimate_insertion(model, x, wi, wj, x.subspan(wi - 1, wj - wi + 1));
  std::vector<int> joined;
  if (wi < s.i) joined.push_back(x[wi - 1]);
  if (wj > s.j) joined.push_back(x[wj - 1]);
  const double den = joined.empty() ? 0.0 : log_ppl(estimate_insertion(model, x, wi, wj, joined));
  return log_ppl(span) - den;
}

}  // namespace

template <typename T>
std::vector<double> delete_scores(const model::Model<T>& model, std::span<const int> x, std::span<const Span> spans,
                                  DeleteRule rule) {
  std::vector<double> out;
  for (const Span& s : spans) {
    check_span(x, s.i, s.j);
    if (s.j < s.i) throw DataError("deletion candidates must be non-empty spans");
    if (rule == DeleteRule::kRatio) {
      out.push_back(ratio_score(model, x, s));
      continue;
    }
    std::vector<int> rest = cut(x, 0, s.i - 1);
    rest.insert(rest.end(), x.begin() + s.j, x.end());
    if (rest.empty() && model.config().l2r)
      out.push_back(kNegInf);
    else
      out.push_back(-log_ppl(sequence_estimate(model, rest)));
  }
  return out;
}

template <typename T>
int delete_rank(const model::Model<T>& model, std::span<const int> x, std::span<const Span> spans, DeleteRule rule) {
  if (spans.empty()) throw DataError("delete needs at least one candidate span");
  if (spans.size() == 1) return 0;
  const auto scores = delete_scores(model, x, spans, rule);
  int best = 0;
  for (std::size_t k = 1; k < scores.size(); ++k)
    if (scores[k] > scores[best]) best = static_cast<int>(k);
  return best;
}

template <typename T>
InfillResult infill(const model::Model<T>& model, std::span<const int> x, int gap, int cap, InfillRule rule,
                    int style) {
  const int n = static_cast<int>(x.size());
  if (gap < 0 || gap > n) throw DataError("gap " + std::to_string(gap) + " outside a sequence of " + std::to_string(n));
  if (cap < 0) throw DataError("infill cap must be non-negative");
  const auto left = x.subspan(0, gap), right = x.subspan(gap);
  InfillResult out;
  if (!model.config().l2r) {
    model::DecodeOptions opts;
    opts.cap = cap;
    auto r = model::decode(model, left, right, style, opts);
    out.tokens = std::move(r.tokens);
    out.logprobs = std::move(r.logprobs);
    out.hit_cap = r.hit_cap;
    return out;
  }
  double best = std::numeric_limits<double>::infinity();
  for (int len = 1; len <= cap; ++len) {
    auto r = model::decode_fixed(model, left, right, style, len);
    double score;
    if (rule == InfillRule::kSpanPerplexity) {
      score = -r.total() / len;
    } else {
      std::vector<int> whole(left.begin(), left.end());
      whole.insert(whole.end(), r.tokens.begin(), r.tokens.end());
      whole.insert(whole.end(), right.begin(), right.end());
      score = log_ppl(sequence_estimate(model, whole, style));
    }
    if (score < best) {
      best = score;
      out.tokens = std::move(r.tokens);
      out.logprobs = std::move(r.logprobs);
    }
  }
  return out;
}

#define XLEDIT_EDITOR_INSTANTIATE(T)                                                                                \
  template InsertionEstimate estimate_insertion(const model::Model<T>&, std::span<const int>, int, int,              \
                                                std::span<const int>, int);                                         \
  template InsertionEstimate estimate_between(const model::Model<T>&, std::span<const int>, std::span<const int>,   \
                                              std::span<const int>, int);                                           \
  template std::vector<std::optional<double>> gap_scores(const model::Model<T>&, std::span<const int>,              \
                                                         std::span<const int>);                                     \
  template int locate(const model::Model<T>&, std::span<const int>, std::span<const int>);                          \
  template int locate(const model::Model<T>&, std::span<const int>);                                                \
  template double replace_odds(const model::Model<T>&, std::span<const int>, int, int, std::span<const int>, int);  \
  template InsertionEstimate sequence_estimate(const model::Model<T>&, std::span<const int>, int);                   \
  template std::vector<double> delete_scores(const model::Model<T>&, std::span<const int>, std::span<const Span>,    \
                                             DeleteRule);                                                           \
  template int delete_rank(const model::Model<T>&, std::span<const int>, std::span<const Span>, DeleteRule);        \
  template InfillResult infill(const model::Model<T>&, std::span<const int>, int, int, InfillRule, int);

XLEDIT_EDITOR_INSTANTIATE(float)
XLEDIT_EDITOR_INSTANTIATE(double)

}  // namespace xledit::edit
