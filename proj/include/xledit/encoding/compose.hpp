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
#include <string>
#include <utility>
#include <vector>

#include "xledit/encoding/vocab.hpp"
#include "xledit/numerics/rng.hpp"
#include "xledit/positional/offsets.hpp"

namespace xledit::enc {

/// x with the 1-based inclusive span [i, j]; j == i - 1 is an empty span
/// sitting before x_i.
struct SpanSample {
  std::vector<int> x;
  int i = 1;
  int j = 0;
  int style = -1;  // -1: unconditional
};

struct ComposeOptions {
  bool conditional = false;  // append the style token
  bool with_cls = false;     // append CLS last
  bool l2r = false;          // no EOI slot; span must be non-empty
};

/// left ++ span ++ EOI ++ right (++ STYLE_s) (++ CLS). The span slots
/// [a, b] are also the prediction targets: slot p predicts tokens[p - 1].
struct ComposedRow {
  std::vector<int> tokens;
  pos::SpanLayout layout;
  bool l2r = false;
  int style = -1;
  bool has_cls = false;

  int length() const { return static_cast<int>(tokens.size()); }
  int num_slots() const { return layout.b - layout.a + 1; }
  int target(int slot) const { return tokens[layout.a - 1 + slot]; }
};

ComposedRow compose(const SpanSample& sample, const Vocabulary& vocab, const ComposeOptions& opts = {});

/// Tokens of the composed row without the span, EOI, style and CLS.
std::vector<int> strip_span(const ComposedRow& row);

/// Uniform over {(i, j) | 1 <= i <= j <= n}, or i < j when strict.
std::pair<int, int> sample_interval(int n, num::Rng& rng, bool strict = false);

struct ComposedBatch {
  std::vector<ComposedRow> rows;

  int max_length() const;
  /// Row-major [rows, max_length] token matrix filled with PAD.
  std::vector<int> padded() const;
};

}  // namespace xledit::enc
