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

#include <span>
#include <stdexcept>
#include <vector>

#include "xledit/model/transformer.hpp"

namespace xledit::model {

/// Raised when a session is asked for more span slots than it reserved.
class CapReached : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Incremental insertion between fixed contexts. Context content states are
/// computed once (they never see the span); each pushed token adds one
/// column of span keys per layer, and each query runs a single query-stream
/// row against left, span-so-far and right keys.
///
/// `slots` is the number of span positions the layout reserves. In insertion
/// mode nothing depends on it beyond the cap; in left-to-right mode it is the
/// fixed span length and shifts every offset to the right context.
template <typename T>
class InsertionSession {
 public:
  InsertionSession(const Model<T>& model, std::span<const int> left, std::span<const int> right, int style,
                   int slots);

  int pushed() const { return pushed_; }
  int slots() const { return slots_; }

  /// Log-probabilities (length V, -inf where not emittable) for slot pushed().
  std::vector<T> next_log_probs() const;
  void push(int token);

 private:
  struct LayerKeys {
    num::Var<T> k_left, v_left, k_right, v_right, k_span, v_span;
  };

  std::vector<int> key_offsets(int query_pos, int span_keys) const;
  num::Var<T> stack_keys(const num::Var<T>& left, const num::Var<T>& span, const num::Var<T>& right) const;

  const Model<T>& model_;
  int n_left_, n_right_, slots_, pushed_ = 0;
  pos::SpanLayout layout_;
  PositionKeys<T> keys_;
  std::vector<LayerKeys> layers_;
};

struct DecodeOptions {
  enum class Mode { kGreedy, kSample };
  Mode mode = Mode::kGreedy;
  int cap = 24;
  num::Rng* rng = nullptr;  // kSample
  bool forbid_empty = false;  // EOI may not be the first token
  /// When set, the first token is the argmax of these scores over the
  /// allowed ids instead of the model's own choice.
  const std::vector<double>* first_scores = nullptr;
};

struct DecodeResult {
  std::vector<int> tokens;
  /// Model log-probability of each chosen token, then of EOI at the stop slot.
  std::vector<double> logprobs;
  bool hit_cap = false;  // stopped by the cap; EOI was not the decoder's choice

  double total() const;
};

/// Open-ended insertion decode (insertion mode).
template <typename T>
DecodeResult decode(const Model<T>& model, std::span<const int> left, std::span<const int> right, int style,
                    const DecodeOptions& opts);

/// Fixed-length greedy decode of exactly `length` tokens (left-to-right mode).
template <typename T>
DecodeResult decode_fixed(const Model<T>& model, std::span<const int> left, std::span<const int> right, int style,
                          int length);

/// Lowest index with the highest value among allowed entries.
int argmax_allowed(std::span<const double> scores, std::span<const std::uint8_t> allowed);

}  // namespace xledit::model
