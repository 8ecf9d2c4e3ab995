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

#include "xledit/evalkit/evaluate.hpp"

#include <algorithm>
#include <json.hpp>

#include "xledit/editor/editor.hpp"
#include "xledit/error.hpp"
#include "xledit/evalkit/metrics.hpp"

namespace xledit::evalkit {

using Json = nlohmann::ordered_json;

std::string to_string(EvalMode m) {
  switch (m) {
    case EvalMode::kXledit: return "xledit";
    case EvalMode::kXleditRank: return "xledit_rank";
    case EvalMode::kL2r: return "l2r";
    case EvalMode::kL2rRank: return "l2r_rank";
    case EvalMode::kCopy: return "copy";
  }
  return "?";
}

EvalMode parse_eval_mode(const std::string& s) {
  for (auto m : {EvalMode::kXledit, EvalMode::kXleditRank, EvalMode::kL2r, EvalMode::kL2rRank, EvalMode::kCopy})
    if (to_string(m) == s) return m;
  throw DataError("unknown eval mode '" + s + "' (xledit|xledit_rank|l2r|l2r_rank|copy)");
}

std::string MetricsReport::to_json() const {
  auto opt = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
  Json j;
  j["kind"] = kind;
  j["mode"] = mode;
  j["n_instances"] = n_instances;
  j["accuracy"] = opt(accuracy);
  j["bleu"] = opt(bleu);
  j["style_accuracy"] = opt(style_accuracy);
  j["g_score"] = opt(g_score);
  j["mean_edits"] = opt(mean_edits);
  j["kept_non_style"] = opt(kept_non_style);
  return j.dump();
}

int predict_style(const model::Model<float>& classifier, std::span<const int> x) {
  const auto p = classifier.classify_style(x);
  return static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
}

namespace {

std::vector<int> encode(const enc::Vocabulary& vocab, const TaskInstance& t, const std::vector<std::string>& words) {
  std::vector<int> out;
  for (const auto& w : words) {
    if (!vocab.contains(w))
      throw DataError("task " + std::to_string(t.id) + ": token '" + w + "' is not in the model vocabulary");
    const int id = vocab.id(w);
    if (vocab.is_reserved(id)) throw DataError("task " + std::to_string(t.id) + ": reserved token '" + w + "'");
    out.push_back(id);
  }
  return out;
}

std::vector<std::string> words_of(const enc::Vocabulary& vocab, std::span<const int> ids) {
  std::vector<std::string> out;
  for (int id : ids) out.push_back(vocab.token(id));
  return out;
}

double percent(int hits, int n) { return n ? 100.0 * hits / n : 0.0; }

}  // namespace

MetricsReport run_eval(const model::Model<float>& model, const enc::Vocabulary& vocab,
                       std::span<const TaskInstance> tasks, EvalMode mode, const EvalOptions& opts,
                       const model::Model<float>* classifier, EvalDetail* detail) {
  if (tasks.empty()) throw DataError("no tasks to evaluate");
  const TaskKind kind = tasks[0].kind;
  for (const auto& t : tasks) {
    if (t.kind != kind) throw DataError("tasks mix kinds " + to_string(kind) + " and " + to_string(t.kind));
    t.check();
  }
  if (model.config().vocab_size != vocab.size())
    throw DataError("vocabulary has " + std::to_string(vocab.size()) + " entries but the model expects " +
                    std::to_string(model.config().vocab_size));
  const bool l2r_mode = mode == EvalMode::kL2r || mode == EvalMode::kL2rRank;
  if (mode == EvalMode::kCopy) {
    if (kind != TaskKind::kTransfer) throw DataError("copy mode only applies to transfer tasks");
  } else if (l2r_mode != model.config().l2r) {
    throw DataError("mode " + to_string(mode) + " needs " + (l2r_mode ? "a left-to-right" : "an insertion") +
                    " model checkpoint");
  }
  const bool rank = mode == EvalMode::kXleditRank || mode == EvalMode::kL2rRank;

  MetricsReport rep;
  rep.kind = to_string(kind);
  rep.mode = to_string(mode);
  rep.n_instances = static_cast<int>(tasks.size());
  if (detail) *detail = {};
  int hits = 0;

  switch (kind) {
    case TaskKind::kLocate:
      for (const auto& t : tasks) {
        const auto x = encode(vocab, t, t.input);
        const int g = edit::locate(model, x, t.gaps);
        hits += g == t.truth_gap;
        if (detail) detail->chosen.push_back(g);
      }
      rep.accuracy = percent(hits, rep.n_instances);
      break;

    case TaskKind::kDelete:
      for (const auto& t : tasks) {
        const auto x = encode(vocab, t, t.input);
        const int k = edit::delete_rank(model, x, t.spans, rank ? edit::DeleteRule::kRank : edit::DeleteRule::kRatio);
        hits += t.spans[k] == t.truth_span;
        if (detail) detail->chosen.push_back(k);
      }
      rep.accuracy = percent(hits, rep.n_instances);
      break;

    case TaskKind::kInfill: {
      std::vector<std::pair<Tokens, Tokens>> pairs;
      for (const auto& t : tasks) {
        const auto x = encode(vocab, t, t.input);
        encode(vocab, t, t.truth_tokens);
        const int cap = std::max(opts.infill_cap, 2 * static_cast<int>(t.truth_tokens.size()));
        const auto r = edit::infill(model, x, t.gaps[0], cap,
                                    rank ? edit::InfillRule::kWholePerplexity : edit::InfillRule::kSpanPerplexity);
        auto got = words_of(vocab, r.tokens);
        hits += got == t.truth_tokens;
        pairs.emplace_back(got, t.truth_tokens);
        if (detail) detail->text.push_back(std::move(got));
      }
      rep.accuracy = percent(hits, rep.n_instances);
      rep.bleu = corpus_bleu(pairs);
      break;
    }

    case TaskKind::kTransfer: {
      if (!classifier) throw DataError("transfer evaluation needs a style classifier");
      if (classifier->config().vocab_size != vocab.size())
        throw DataError("classifier vocabulary does not match the model vocabulary");
      if (mode != EvalMode::kCopy && mode != EvalMode::kXledit)
        throw DataError("transfer evaluation supports modes xledit and copy");
      std::vector<std::pair<Tokens, Tokens>> pairs;
      long edits = 0;
      long kept = 0, plain = 0;
      for (const auto& t : tasks) {
        const auto x = encode(vocab, t, t.input);
        std::vector<int> y = x;
        if (mode == EvalMode::kXledit) {
          auto cfg = opts.transfer;
          cfg.src_style = t.src_style;
          cfg.tgt_style = t.tgt_style;
          auto res = style::transfer(model, x, cfg);
          y = std::move(res.output);
          edits += static_cast<long>(res.trace.steps.size());
          if (detail) detail->traces.push_back(res.trace.to_jsonl(&vocab));
        } else if (detail) {
          detail->traces.emplace_back();
        }
        hits += predict_style(*classifier, y) == t.tgt_style;
        auto out = words_of(vocab, y);
        if (!opts.style_words.empty()) {
          const auto [k, n] = kept_tokens(t.input, out, opts.style_words);
          kept += k;
          plain += n;
        }
        pairs.emplace_back(out, t.input);
        if (detail) detail->text.push_back(std::move(out));
      }
      rep.style_accuracy = percent(hits, rep.n_instances);
      rep.bleu = corpus_bleu(pairs);
      rep.g_score = g_score(*rep.style_accuracy, *rep.bleu);
      rep.mean_edits = static_cast<double>(edits) / rep.n_instances;
      if (!opts.style_words.empty()) rep.kept_non_style = plain ? 100.0 * kept / plain : 100.0;
      break;
    }
  }
  return rep;
}

}  // namespace xledit::evalkit
