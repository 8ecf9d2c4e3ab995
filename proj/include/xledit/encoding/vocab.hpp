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

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace xledit::enc {

inline constexpr int kPad = 0;
inline constexpr int kUnk = 1;
inline constexpr int kEoi = 2;
inline constexpr int kCls = 3;
inline constexpr int kFirstStyle = 4;

/// Splits on ASCII whitespace.
std::vector<std::string> split_whitespace(std::string_view line);

/// Word-level vocabulary. Ids 0..3 are PAD, UNK, EOI, CLS, followed by one
/// token per style, followed by words in descending count order (ties
/// lexicographic). Reserved ids are never produced from raw text: a literal
/// "<eoi>" in the input is just an unknown word.
class Vocabulary {
 public:
  explicit Vocabulary(int num_styles = 2);

  static Vocabulary build(std::span<const std::string> lines, int min_count, int num_styles = 2);

  int size() const { return static_cast<int>(tokens_.size()); }
  int num_styles() const { return num_styles_; }
  int first_word() const { return kFirstStyle + num_styles_; }
  int num_words() const { return size() - first_word(); }

  int style_token(int style) const;
  bool is_reserved(int id) const { return id >= 0 && id < first_word(); }
  bool is_style(int id) const { return id >= kFirstStyle && id < first_word(); }

  /// UNK when absent.
  int id(std::string_view word) const;
  bool contains(std::string_view word) const { return index_.count(std::string(word)) != 0; }
  const std::string& token(int id) const;

  std::vector<int> encode(std::string_view line) const;
  std::string decode(std::span<const int> ids) const;

  /// Text format: header line, then one word per line in id order.
  void save(std::ostream& out) const;
  static Vocabulary load(std::istream& in);
  void save(const std::string& path) const;
  static Vocabulary load(const std::string& path);

  bool operator==(const Vocabulary& other) const {
    return num_styles_ == other.num_styles_ && tokens_ == other.tokens_;
  }

 private:
  void add_word(const std::string& w);

  int num_styles_;
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

}  // namespace xledit::enc
