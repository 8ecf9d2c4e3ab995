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

#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "xledit/encoding/vocab.hpp"
#include "xledit/evalkit/tasks.hpp"
#include "xledit/model/transformer.hpp"
#include "xledit/styler/transfer.hpp"

namespace xledit::evalkit {

// Mode decides the scoring rule:
//   xledit       EOI-based locate, perplexity-ratio delete, greedy infill
//   xledit_rank  as xledit, but delete ranks whole-sequence perplexity
//   l2r          left-to-right model: bigram locate, widened-span delete,
//                best fixed-length infill by span perplexity
//   l2r_rank     l2r with whole-sequence perplexity for delete and infill
//   copy         transfer only: output = input
enum class EvalMode { kXledit, kXleditRank, kL2r, kL2rRank, kCopy };
std::string to_string(EvalMode m);
EvalMode parse_eval_mode(const std::string& s);

struct MetricsReport {
  std::string kind;
  std::string mode;
  int n_instances = 0;
  std::optional<double> accuracy;  // percent; exact match for infill
  std::optional<double> bleu;
  std::optional<double> style_accuracy;
  std::optional<double> g_score;
  std::optional<double> mean_edits;      // transfer
  std::optional<double> kept_non_style;  // transfer, percent

  std::string to_json() const;
};

struct EvalOptions {
  int infill_cap = 24;  // at least twice the reference length is always allowed
  style::TransferConfig transfer;
  /// Words excluded from kept_non_style; empty leaves it unreported.
  std::unordered_set<std::string> style_words;
};

/// Per-item outputs, in task order.
struct EvalDetail {
  std::vector<int> chosen;                     // locate gap / delete candidate index
  std::vector<std::vector<std::string>> text;  // infill payload / transfer output
  std::vector<std::string> traces;             // transfer JSONL per item
};

/// All tasks must share one kind. `classifier` is required for transfer.
/// Throws DataError when tasks, mode, model and vocabulary disagree.
MetricsReport run_eval(const model::Model<float>& model, const enc::Vocabulary& vocab,
                       std::span<const TaskInstance> tasks, EvalMode mode, const EvalOptions& opts = {},
                       const model::Model<float>* classifier = nullptr, EvalDetail* detail = nullptr);

/// Index of the most probable style.
int predict_style(const model::Model<float>& classifier, std::span<const int> x);

}  // namespace xledit::evalkit
