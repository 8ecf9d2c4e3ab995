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
#include <unordered_set>
#include <utility>
#include <vector>

namespace xledit::evalkit {

using Tokens = std::vector<std::string>;

/// BLEU-4 in percent. Every n-gram precision is smoothed as
/// (matches + 1) / (hyp n-grams + 1); brevity penalty as usual.
/// An empty hypothesis scores 0. Throws DataError on an empty reference.
double bleu(std::span<const std::string> hyp, std::span<const std::string> ref);

/// Corpus BLEU-4: n-gram matches and counts and the two lengths are summed
/// over all pairs before smoothing and the brevity penalty.
double corpus_bleu(std::span<const std::pair<Tokens, Tokens>> hyp_ref);

/// Geometric mean of two percentages.
double g_score(double style_acc, double bleu);

/// Number of tokens of `input` outside `style_words` that survive into
/// `output` in order (longest common subsequence restricted to them), and
/// how many there were.
std::pair<int, int> kept_tokens(std::span<const std::string> input, std::span<const std::string> output,
                                const std::unordered_set<std::string>& style_words);

}  // namespace xledit::evalkit
