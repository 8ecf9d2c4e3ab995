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

#include "xledit/styler/transfer.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "xledit/error.hpp"

namespace xledit::style {

void TransferConfig::validate(int num_styles) const {
  auto bad = [](const std::string& what) { throw DataError("transfer config: " + what); };
  if (max_span < 1) bad("max_span must be at least 1");
  if (!(v_thres > 0)) bad("v_thres must be positive");
  if (max_iters < 1) bad("max_iters must be at least 1");
  if (!(forced_insertion_conf >= 0 && forced_insertion_conf <= 1)) bad("forced_insertion_conf must lie in [0, 1]");
  if (payload_cap < 1) bad("payload_cap must be at least 1");
  if (src_style < 0 || src_style >= num_styles || tgt_style < 0 || tgt_style >= num_styles)
    bad("styles must lie in [0, " + std::to_string(num_styles) + ")");
}

double Candidate::f() const { return std::exp(log_f); }

std::string to_string(Termination t) {
  switch (t) {
    case Termination::kThreshold: return "threshold";
    case Termination::kMaxIters: return "max_iters";
    case Termination::kForcedInsertion: return "forced_insertion_exhausted";
  }
  return "?";
}

std::string TransferTrace::to_jsonl(const enc::Vocabulary* vocab) const {
  auto tokens = [&](const std::vector<int>& ids) {
    nlohmann::ordered_json a = nlohmann::ordered_json::array();
    for (int t : ids) {
      if (vocab)
        a.push_back(vocab->token(t));
      else
        a.push_back(t);
    }
    return a;
  };
  std::ostringstream out;
  for (const auto& s : steps) {
    nlohmann::ordered_json j;
    j["iter"] = s.iter;
    j["kind"] = edit::to_string(s.op.kind);
    j["i"] = s.op.i;
    j["j"] = s.op.j;
    j["y"] = tokens(s.op.payload);
    j["score"] = s.op.score;
    j["x_after"] = tokens(s.after);
    out << j.dump() << '\n';
  }
  return out.str();
}

template <typename T>
double span_log_score(const model::Model<T>& model, std::span<const int> x, int i, int j, int src, int tgt) {
  const auto y = x.subspan(i - 1, j - i + 1);
  const auto a = edit::estimate_insertion(model, x, i, j, y, src);
  const auto b = edit::estimate_insertion(model, x, i, j, y, tgt);
  return a.total_logprob - b.total_logprob;
}

template <typename T>
double span_score_f(const model::Model<T>& model, std::span<const int> x, int i, int j, int src, int tgt) {
  return std::exp(span_log_score(model, x, i, j, src, tgt));
}

template <typename T>
std::vector<Candidate> score_all_candidates(const model::Model<T>& model, std::span<const int> x,
                                            const TransferConfig& cfg) {
  cfg.validate(model.config().n_styles);
  if (x.empty()) throw DataError("cannot score candidates of an empty sequence");
  const int n = static_cast<int>(x.size());
  std::vector<Candidate> out;
  for (int i = 1; i <= n + 1; ++i)
    for (int j = i - 1; j <= std::min(n, i + cfg.max_span - 1); ++j)
      out.push_back({i, j, span_log_score(model, x, i, j, cfg.src_style, cfg.tgt_style)});
  std::stable_sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) {
    if (a.log_f != b.log_f) return a.log_f > b.log_f;
    return a.i != b.i ? a.i < b.i : a.j < b.j;
  });
  return out;
}

namespace {

// Greedy payload under the target style. With biased sampling the first
// token maximises p_tgt - p_src instead of p_tgt.
template <typename T>
std::vector<int> payload(const model::Model<T>& model, std::span<const int> x, int i, int j,
                         const TransferConfig& cfg) {
  const auto left = x.subspan(0, i - 1), right = x.subspan(j);
  model::DecodeOptions opts;
  opts.cap = cfg.payload_cap;
  opts.forbid_empty = j == i - 1;
  std::vector<double> bias;
  if (cfg.biased_sampling) {
    const auto tgt = model::InsertionSession<T>(model, left, right, cfg.tgt_style, 1).next_log_probs();
    const auto src = model::InsertionSession<T>(model, left, right, cfg.src_style, 1).next_log_probs();
    bias.resize(tgt.size());
    for (std::size_t k = 0; k < tgt.size(); ++k)
      bias[k] = std::exp(static_cast<double>(tgt[k])) - std::exp(static_cast<double>(src[k]));
    opts.first_scores = &bias;
  }
  return model::decode(model, left, right, cfg.tgt_style, opts).tokens;
}

}  // namespace

template <typename T>
TransferResult transfer(const model::Model<T>& model, std::span<const int> x, const TransferConfig& cfg) {
  cfg.validate(model.config().n_styles);
  if (model.config().l2r) throw DataError("style transfer needs an insertion model");
  if (x.empty()) throw DataError("cannot transfer an empty sequence");
  TransferResult res;
  res.output.assign(x.begin(), x.end());
  // Every score is exactly 1 when the styles agree; nothing to do.
  if (cfg.src_style == cfg.tgt_style) return res;

  const double log_thres = std::log(cfg.v_thres);
  bool stalled = false;
  int iter = 0;
  for (; iter < cfg.max_iters; ++iter) {
    const auto cands = score_all_candidates(model, std::span<const int>(res.output), cfg);
    bool edited = false;
    // Best candidate first; one whose decoded payload would leave the
    // sequence unchanged yields to the next one above the threshold.
    for (const auto& c : cands) {
      if (!(c.log_f >= log_thres)) break;
      auto y = payload(model, std::span<const int>(res.output), c.i, c.j, cfg);
      if (c.j == c.i - 1 && y.empty()) continue;
      auto op = edit::make_edit(c.i, c.j, std::move(y), c.f());
      auto after = op.apply(res.output);
      if (after == res.output) continue;
      res.output = after;
      res.trace.steps.push_back({iter, std::move(op), std::move(after)});
      edited = true;
      break;
    }
    if (!edited) {
      stalled = true;
      break;
    }
  }
  res.trace.terminated_by = stalled ? Termination::kThreshold : Termination::kMaxIters;

  if (stalled && cfg.forced_insertion) {
    const auto p = model.classify_style(res.output);
    if (static_cast<double>(p[cfg.src_style]) > cfg.forced_insertion_conf) {
      auto y = payload(model, std::span<const int>(res.output), 1, 0, cfg);
      if (!y.empty()) {
        auto op = edit::make_edit(1, 0, std::move(y), static_cast<double>(p[cfg.src_style]));
        auto after = op.apply(res.output);
        res.output = after;
        res.trace.steps.push_back({iter, std::move(op), std::move(after)});
        res.trace.terminated_by = Termination::kForcedInsertion;
      }
    }
  }
  return res;
}

#define XLEDIT_STYLER_INSTANTIATE(T)                                                                               \
  template double span_log_score(const model::Model<T>&, std::span<const int>, int, int, int, int);               \
  template double span_score_f(const model::Model<T>&, std::span<const int>, int, int, int, int);                 \
  template std::vector<Candidate> score_all_candidates(const model::Model<T>&, std::span<const int>,              \
                                                       const TransferConfig&);                                    \
  template TransferResult transfer(const model::Model<T>&, std::span<const int>, const TransferConfig&);

XLEDIT_STYLER_INSTANTIATE(float)
XLEDIT_STYLER_INSTANTIATE(double)

}  // namespace xledit::style
