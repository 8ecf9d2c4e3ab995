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

// Insertion-aware relative offsets.
//
// A composed sequence z = left ++ y ++ EOI ++ right (++ trailing tokens)
// holds the insertion span y ++ EOI at 1-based positions [a, b]. Attention
// between positions i (query) and j (key) uses the offset
//
//   i - j - sign(i - j) * phi(a, b, i, j)
//
// where phi collapses the span so that contexts see each other as if exactly
// one token were inserted, and every span position sees the right context as
// if exactly one slot remained after it. Pairs where a context position would
// look into the span, or a span position would look ahead inside the span,
// have no offset and are masked.

#pragma once

#include <optional>
#include <string>
#include <vector>

namespace xledit::pos {

/// 1-based, inclusive: z[a..b] = y ++ EOI. a == b is an empty insertion.
struct SpanLayout {
  int total_len = 0;
  int a = 1;
  int b = 1;

  void validate() const;
  bool in_span(int p) const { return p >= a && p <= b; }
};

/// phi_{a,b}(i, j); nullopt marks the unspecified (masked) pairs.
std::optional<int> phi(int a, int b, int i, int j);

/// i - j - sign(i - j) * phi, or nullopt where phi is unspecified.
std::optional<int> effective_offset(int a, int b, int i, int j);

/// Independent reference for effective_offset built from virtual
/// coordinates instead of the case table; used by the tests.
std::optional<int> oracle_offset(int a, int b, int i, int j);

enum class OffsetScheme {
  kInsertion,    // phi-adjusted offsets, span masking
  kLeftToRight,  // raw offsets, same masking (length-aware baseline)
  kFull,         // raw offsets, every pair legal (plain bidirectional encode)
};

/// Dense n x n table of offsets and legality, 0-based storage.
struct OffsetMatrix {
  int n = 0;
  std::vector<int> offsets;
  std::vector<unsigned char> legal;

  int offset(int row, int col) const { return offsets[row * n + col]; }
  bool is_legal(int row, int col) const { return legal[row * n + col] != 0; }
};

OffsetMatrix build_offset_matrix(const SpanLayout& layout,
                                 OffsetScheme scheme = OffsetScheme::kInsertion);
OffsetMatrix build_full_offset_matrix(int n);

/// Offset for a single (i, j) pair under a scheme; nullopt when masked.
std::optional<int> pair_offset(OffsetScheme scheme, const SpanLayout& layout, int i, int j);

/// Text rendering for inspection: one row per query position, "." for
/// masked pairs, signed offsets otherwise ("+2", "-2", "0").
std::string render(const OffsetMatrix& m);

}  // namespace xledit::pos
