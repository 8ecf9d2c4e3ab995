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

// Editing operations over a trained model. Positions follow the sequence
// convention used throughout: x is 1-based, a span [i, j] is inclusive and
// j == i - 1 denotes the empty span in front of x_i. A gap g in [0, |x|]
// sits between x_g and x_{g+1}.

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "xledit/model/session.hpp"
#include "xledit/model/transformer.hpp"

namespace xledit::edit {

struct InsertionEstimate {
  double total_logprob = 0;
  /// One entry per span token, then EOI (absent for left-to-right models).
  std::vector<double> per_token_logprobs;
  int i = 1;
  int j = 0;
  int style = -1;
};

enum class EditKind { kInsert, kDelete, kReplace };
std::string to_string(EditKind k);

struct EditOp {
  EditKind kind = EditKind::kInsert;
  int i = 1;
  int j = 0;
  std::vector<int> payload;
  double score = 0;

  /// kind agrees with (i, j, payload); throws ContractError otherwise.
  void check() const;
  std::vector<int> apply(std::span<const int> x) const;
};

/// Builds the op a decoded payload implies for span [i, j].
EditOp make_edit(int i, int j, std::vector<int> payload, double score);

/// log q(y | x_{1:i-1}, x_{j+1:}) via one context pass and |y| + 1 steps.
template <typename T>
InsertionEstimate estimate_insertion(const model::Model<T>& model, std::span<const int> x, int i, int j,
                                     std::span<const int> y, int style = -1);
/// Same with explicit contexts.
template <typename T>
InsertionEstimate estimate_between(const model::Model<T>& model, std::span<const int> left,
                                   std::span<const int> right, std::span<const int> y, int style = -1);

/// exp(-total / n) with n the number of scored slots.
double perplexity(const InsertionEstimate& est);

/// Score of each candidate gap under the model's locate rule: EOI
/// log-probability for insertion models, log-probability of the bigram
/// around the gap for left-to-right models (nullopt at the sequence ends).
template <typename T>
std::vector<std::optional<double>> gap_scores(const model::Model<T>& model, std::span<const int> x,
                                              std::span<const int> gaps);

/// Gap with the lowest score among `gaps`; ties go to the lowest gap.
/// Gaps the rule cannot score are skipped unless nothing else is left.
template <typename T>
int locate(const model::Model<T>& model, std::span<const int> x, std::span<const int> gaps);
/// Over every gap 0..|x|.
template <typename T>
int locate(const model::Model<T>& model, std::span<const int> x);

/// q(y | .) / q(x_{i:j} | .) under the same contexts.
template <typename T>
double replace_odds(const model::Model<T>& model, std::span<const int> x, int i, int j, std::span<const int> y,
                    int style = -1);

struct Span {
  int i = 1;
  int j = 0;
  bool operator==(const Span&) const = default;
};

enum class DeleteRule {
  kRatio,  // argmax PPL(span) / PPL(EOI); widened-span ratio for left-to-right models
  kRank,   // argmin whole-sequence PPL after deleting the span
};

/// Whole-sequence estimate with empty contexts (EOI-terminated for
/// insertion models).
template <typename T>
InsertionEstimate sequence_estimate(const model::Model<T>& model, std::span<const int> x, int style = -1);

/// Higher means a better deletion under `rule` (log PPL ratio, or negated
/// log PPL of the remaining sequence).
template <typename T>
std::vector<double> delete_scores(const model::Model<T>& model, std::span<const int> x, std::span<const Span> spans,
                                  DeleteRule rule);
/// Index into `spans` of the chosen deletion.
template <typename T>
int delete_rank(const model::Model<T>& model, std::span<const int> x, std::span<const Span> spans, DeleteRule rule);

enum class InfillRule {
  kSpanPerplexity,   // left-to-right: lowest PPL of y given the contexts
  kWholePerplexity,  // left-to-right: lowest PPL of the completed sequence
};

struct InfillResult {
  std::vector<int> tokens;
  std::vector<double> logprobs;
  bool hit_cap = false;
};

/// Greedy insertion at gap g. Insertion models decode until EOI or `cap`;
/// left-to-right models decode every length 1..cap and keep the best under
/// `rule`.
template <typename T>
InfillResult infill(const model::Model<T>& model, std::span<const int> x, int gap, int cap,
                    InfillRule rule = InfillRule::kSpanPerplexity, int style = -1);

}  // namespace xledit::edit
