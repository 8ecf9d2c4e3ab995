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

// Style transfer by repeated local edits. A span is worth editing when it is
// much likelier under the source style than under the target style:
//
//   f(i, j) = q(x_{i:j} | contexts, src) / q(x_{i:j} | contexts, tgt)
//
// with the empty span (j = i - 1) standing for "insert something here".

#pragma once

#include <span>
#include <string>
#include <vector>

#include "xledit/editor/editor.hpp"
#include "xledit/encoding/vocab.hpp"

namespace xledit::style {

struct TransferConfig {
  int max_span = 4;  // longest span scored for replacement or deletion
  double v_thres = 2.0;
  int max_iters = 10;
  bool biased_sampling = true;
  bool forced_insertion = false;
  double forced_insertion_conf = 0.9;
  int payload_cap = 8;  // longest decoded replacement
  int src_style = 0;
  int tgt_style = 1;

  void validate(int num_styles) const;
};

struct Candidate {
  int i = 1;
  int j = 0;
  double log_f = 0;
  double f() const;
};

enum class Termination { kThreshold, kMaxIters, kForcedInsertion };
std::string to_string(Termination t);

struct TraceStep {
  int iter = 0;
  edit::EditOp op;
  std::vector<int> after;
};

struct TransferTrace {
  std::vector<TraceStep> steps;
  Termination terminated_by = Termination::kThreshold;

  /// One JSON object per line. Tokens are written as strings when a
  /// vocabulary is given, ids otherwise.
  std::string to_jsonl(const enc::Vocabulary* vocab = nullptr) const;
};

struct TransferResult {
  std::vector<int> output;
  TransferTrace trace;
};

template <typename T>
double span_log_score(const model::Model<T>& model, std::span<const int> x, int i, int j, int src, int tgt);
template <typename T>
double span_score_f(const model::Model<T>& model, std::span<const int> x, int i, int j, int src, int tgt);

/// Every span of length 1..max_span and every gap, best first; ties by
/// (i, j) ascending.
template <typename T>
std::vector<Candidate> score_all_candidates(const model::Model<T>& model, std::span<const int> x,
                                            const TransferConfig& cfg);

template <typename T>
TransferResult transfer(const model::Model<T>& model, std::span<const int> x, const TransferConfig& cfg);

}  // namespace xledit::style
