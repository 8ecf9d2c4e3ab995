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

#include "xledit/encoding/corpus.hpp"

#include <charconv>
#include <fstream>

#include "xledit/error.hpp"

namespace xledit::enc {

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus file: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!split_whitespace(line).empty()) lines.push_back(line);
  }
  if (in.bad()) throw DataError("read error on corpus file: " + path);
  return lines;
}

std::vector<StyledLine> parse_style_tsv(std::span<const std::string> lines, int num_styles,
                                        const std::string& source) {
  std::vector<StyledLine> out;
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const std::string& line = lines[n];
    const auto where = source + ":" + std::to_string(n + 1);
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw DataError(where + ": expected style_id<TAB>text");
    int style = -1;
    auto [p, ec] = std::from_chars(line.data(), line.data() + tab, style);
    if (ec != std::errc() || p != line.data() + tab) throw DataError(where + ": bad style id");
    if (style < 0 || style >= num_styles)
      throw DataError(where + ": style " + std::to_string(style) + " out of range [0, " +
                      std::to_string(num_styles) + ")");
    out.push_back({style, line.substr(tab + 1)});
  }
  return out;
}

std::vector<StyledLine> read_style_tsv(const std::string& path, int num_styles) {
  auto lines = read_lines(path);
  return parse_style_tsv(lines, num_styles, path);
}

void write_lines(const std::string& path, std::span<const std::string> lines) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write file: " + path);
  for (auto& l : lines) out << l << '\n';
  if (!out) throw DataError("failed writing file: " + path);
}

std::vector<Document> encode_documents(std::span<const std::string> lines, const Vocabulary& vocab) {
  std::vector<Document> docs;
  docs.reserve(lines.size());
  for (auto& l : lines) docs.push_back({vocab.encode(l), -1});
  return docs;
}

std::vector<Document> encode_documents(std::span<const StyledLine> lines, const Vocabulary& vocab) {
  std::vector<Document> docs;
  docs.reserve(lines.size());
  for (auto& l : lines) docs.push_back({vocab.encode(l.text), l.style});
  return docs;
}

std::vector<std::vector<int>> split_sentences(std::span<const int> tokens, int delimiter) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  for (int t : tokens) {
    cur.push_back(t);
    if (t == delimiter) out.push_back(std::move(cur)), cur.clear();
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

}  // namespace xledit::enc
