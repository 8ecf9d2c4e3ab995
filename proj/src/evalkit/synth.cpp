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

#include "xledit/evalkit/synth.hpp"

#include <array>

#include "xledit/error.hpp"
#include "xledit/numerics/rng.hpp"

namespace xledit::evalkit {

namespace {

// '@' is replaced by the document's protagonist.
constexpr int kEvents = 6;
const std::array<std::array<const char*, kEvents>, 6> kTopics = {{
    {"@ opens the fridge .", "@ takes out two eggs .", "@ heats a pan on the stove .", "@ cracks the eggs .",
     "@ adds salt and pepper .", "@ eats at the small table ."},
    {"@ walks into the garden .", "@ waters the roses .", "@ pulls weeds from the dry soil .",
     "@ picks ripe tomatoes .", "@ fills a basket .", "@ rests under the apple tree ."},
    {"@ arrives at the harbor .", "@ checks the ropes on the boat .", "@ unties the boat .",
     "@ sails past the lighthouse .", "@ catches three fish .", "@ returns before the storm ."},
    {"@ enters the classroom .", "@ opens a math book .", "@ solves the problems on the board .",
     "@ raises a hand .", "@ answers the teacher .", "@ leaves when the bell rings ."},
    {"@ follows the trail .", "@ crosses a narrow bridge .", "@ sees a deer near the river .", "@ climbs the hill .",
     "@ sets up the tent .", "@ sleeps under the stars ."},
    {"@ goes to the market .", "@ buys fresh bread .", "@ chooses apples from a wooden cart .", "@ pays the baker .",
     "@ talks with a friend .", "@ carries the bags home ."},
}};

const std::array<const char*, 12> kNames = {"anna", "ben",  "carla", "david", "elena", "felix",
                                             "grace", "hugo", "iris",  "jonas", "kate",  "leo"};

std::string fill(const char* tmpl, const std::string& name) {
  std::string out;
  for (const char* p = tmpl; *p; ++p) {
    if (*p == '@')
      out += name;
    else
      out += *p;
  }
  return out;
}

const std::array<const char*, 10> kSubjects = {"the food",  "the service", "the staff", "the room", "the pizza",
                                               "the coffee", "our waiter", "the music", "the price", "this place"};
const std::array<const char*, 3> kVerbs = {"was", "is", "seemed"};
const std::array<const char*, 6> kPositive = {"good", "great", "excellent", "amazing", "friendly", "perfect"};
const std::array<const char*, 6> kNegative = {"bad", "terrible", "awful", "poor", "rude", "horrible"};
const std::array<const char*, 5> kTails = {"", " today", " again", " as usual", " overall"};

}  // namespace

int story_topics() { return static_cast<int>(kTopics.size()); }

std::vector<std::string> story_corpus(const StoryOptions& opts) {
  if (opts.documents < 0 || opts.sentences < 1) throw DataError("story corpus needs documents >= 0 and sentences >= 1");
  num::Rng rng = num::Rng(opts.seed).split("stories");
  std::vector<std::string> out;
  for (int d = 0; d < opts.documents; ++d) {
    const auto& topic = kTopics[rng.below(kTopics.size())];
    const std::string name = kNames[rng.below(kNames.size())];
    const int start = static_cast<int>(rng.below(kEvents));
    std::string doc;
    for (int s = 0; s < opts.sentences; ++s) {
      if (s) doc += ' ';
      doc += fill(topic[(start + s) % kEvents], name);
    }
    out.push_back(std::move(doc));
  }
  return out;
}

std::vector<enc::StyledLine> review_corpus(const ReviewOptions& opts) {
  if (opts.lines < 0) throw DataError("review corpus needs lines >= 0");
  num::Rng rng = num::Rng(opts.seed).split("reviews");
  std::vector<enc::StyledLine> out;
  for (int k = 0; k < opts.lines; ++k) {
    const int style = k % 2;
    const auto& lex = style == 0 ? kPositive : kNegative;
    std::string text = kSubjects[rng.below(kSubjects.size())];
    text.append(" ").append(kVerbs[rng.below(kVerbs.size())]);
    text.append(" ").append(lex[rng.below(lex.size())]);
    if (rng.below(4) == 0) text.append(" and ").append(lex[rng.below(lex.size())]);
    text.append(kTails[rng.below(kTails.size())]);
    out.push_back({style, text});
  }
  return out;
}

const std::vector<std::string>& review_style_words() {
  static const std::vector<std::string> words = {kPositive[0], kPositive[1], kPositive[2], kPositive[3],
                                                  kPositive[4], kPositive[5], kNegative[0], kNegative[1],
                                                  kNegative[2], kNegative[3], kNegative[4], kNegative[5]};
  return words;
}

}  // namespace xledit::evalkit
