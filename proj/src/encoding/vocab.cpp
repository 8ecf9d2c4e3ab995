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

#include "xledit/encoding/vocab.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>

#include "xledit/error.hpp"

namespace xledit::enc {

namespace {
bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }
constexpr const char* kMagic = "xledit-vocab";
}  // namespace

std::vector<std::string> split_whitespace(std::string_view line) {
  std::vector<std::string> out;
  std::size_t p = 0;
  while (p < line.size()) {
    while (p < line.size() && is_space(line[p])) ++p;
    std::size_t q = p;
    while (q < line.size() && !is_space(line[q])) ++q;
    if (q > p) out.emplace_back(line.substr(p, q - p));
    p = q;
  }
  return out;
}

Vocabulary::Vocabulary(int num_styles) : num_styles_(num_styles) {
  XLEDIT_REQUIRE(num_styles >= 0, "negative style count");
  tokens_ = {"<pad>", "<unk>", "<eoi>", "<cls>"};
  for (int s = 0; s < num_styles; ++s) tokens_.push_back("<style" + std::to_string(s) + ">");
}

void Vocabulary::add_word(const std::string& w) {
  auto [it, inserted] = index_.emplace(w, size());
  if (!inserted) throw DataError("duplicate vocabulary entry: " + w);
  tokens_.push_back(w);
}

Vocabulary Vocabulary::build(std::span<const std::string> lines, int min_count, int num_styles) {
  std::map<std::string, long> counts;
  for (const auto& line : lines)
    for (auto& w : split_whitespace(line)) ++counts[w];
  if (counts.empty()) throw DataError("cannot build a vocabulary from an empty corpus");
  std::vector<std::pair<std::string, long>> kept;
  for (auto& [w, c] : counts)
    if (c >= min_count) kept.emplace_back(w, c);
  // map iteration is lexicographic, stable sort keeps that order on ties
  std::stable_sort(kept.begin(), kept.end(), [](auto& l, auto& r) { return l.second > r.second; });
  Vocabulary v(num_styles);
  for (auto& [w, c] : kept) v.add_word(w);
  return v;
}

int Vocabulary::style_token(int style) const {
  XLEDIT_REQUIRE(style >= 0 && style < num_styles_,
                 "style " + std::to_string(style) + " out of range [0, " + std::to_string(num_styles_) + ")");
  return kFirstStyle + style;
}

int Vocabulary::id(std::string_view word) const {
  auto it = index_.find(std::string(word));
  return it == index_.end() ? kUnk : it->second;
}

const std::string& Vocabulary::token(int id) const {
  XLEDIT_REQUIRE(id >= 0 && id < size(), "token id " + std::to_string(id) + " out of range");
  return tokens_[id];
}

std::vector<int> Vocabulary::encode(std::string_view line) const {
  std::vector<int> ids;
  for (auto& w : split_whitespace(line)) ids.push_back(id(w));
  return ids;
}

std::string Vocabulary::decode(std::span<const int> ids) const {
  std::string out;
  for (std::size_t k = 0; k < ids.size(); ++k) {
    if (k) out += ' ';
    out += token(ids[k]);
  }
  return out;
}

void Vocabulary::save(std::ostream& out) const {
  out << kMagic << ' ' << num_styles_ << ' ' << num_words() << '\n';
  for (int i = first_word(); i < size(); ++i) out << tokens_[i] << '\n';
}

Vocabulary Vocabulary::load(std::istream& in) {
  std::string magic;
  int styles = -1;
  long words = -1;
  in >> magic >> styles >> words;
  if (!in || magic != kMagic || styles < 0 || words < 0) throw DataError("malformed vocabulary header");
  std::string line;
  std::getline(in, line);
  Vocabulary v(styles);
  for (long k = 0; k < words; ++k) {
    if (!std::getline(in, line)) throw DataError("vocabulary truncated after " + std::to_string(k) + " words");
    if (line.empty() || split_whitespace(line).size() != 1) throw DataError("malformed vocabulary entry: '" + line + "'");
    v.add_word(line);
  }
  return v;
}

void Vocabulary::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write vocabulary file: " + path);
  save(out);
  if (!out) throw DataError("failed writing vocabulary file: " + path);
}

Vocabulary Vocabulary::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open vocabulary file: " + path);
  try {
    return load(in);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

}  // namespace xledit::enc
