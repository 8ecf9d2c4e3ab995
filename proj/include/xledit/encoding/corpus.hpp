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
#include <vector>

#include "xledit/encoding/vocab.hpp"

namespace xledit::enc {

struct Document {
  std::vector<int> tokens;
  int style = -1;
};

struct StyledLine {
  int style = -1;
  std::string text;
};

/// Non-blank lines of a UTF-8 text file, one document per line.
std::vector<std::string> read_lines(const std::string& path);

/// `style_id<TAB>text` rows; styles must lie in [0, num_styles).
std::vector<StyledLine> read_style_tsv(const std::string& path, int num_styles);
std::vector<StyledLine> parse_style_tsv(std::span<const std::string> lines, int num_styles,
                                        const std::string& source = "<memory>");

void write_lines(const std::string& path, std::span<const std::string> lines);

std::vector<Document> encode_documents(std::span<const std::string> lines, const Vocabulary& vocab);
std::vector<Document> encode_documents(std::span<const StyledLine> lines, const Vocabulary& vocab);

/// Splits after every delimiter token; a trailing fragment without the
/// delimiter becomes its own sentence.
std::vector<std::vector<int>> split_sentences(std::span<const int> tokens, int delimiter);

}  // namespace xledit::enc
