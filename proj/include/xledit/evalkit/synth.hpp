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

// Generated corpora with known structure.
//
// Stories: each document follows one topic's fixed cycle of events, told
// about one person, starting at a random point of the cycle. Any sentence is
// therefore implied by its neighbours, and a sentence from another document
// stands out by topic and name.
//
// Reviews: short two-style sentences whose style is carried only by
// adjectives from two opposite lexicons.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "xledit/encoding/corpus.hpp"

namespace xledit::evalkit {

inline constexpr const char* kSentenceEnd = ".";

struct StoryOptions {
  int documents = 2000;
  int sentences = 8;
  std::uint64_t seed = 1;
};

/// One document per line.
std::vector<std::string> story_corpus(const StoryOptions& opts);
int story_topics();

struct ReviewOptions {
  int lines = 4000;
  std::uint64_t seed = 1;
};

/// Balanced styles: 0 = positive, 1 = negative.
std::vector<enc::StyledLine> review_corpus(const ReviewOptions& opts);
/// Words that carry style in review_corpus.
const std::vector<std::string>& review_style_words();

}  // namespace xledit::evalkit
