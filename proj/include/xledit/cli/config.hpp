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

// Run settings as `section.key = value` lines. Every key has a default;
// files are applied first, then command-line overrides.

#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <string>
#include <vector>

#include "xledit/evalkit/evaluate.hpp"
#include "xledit/model/config.hpp"
#include "xledit/objectives/train.hpp"
#include "xledit/styler/transfer.hpp"

namespace xledit::cli {

enum class ValueType { kInt, kUint, kReal, kBool, kText };

struct KeySpec {
  std::string key;
  ValueType type;
  std::string default_value;
  std::string help;
};

/// Every accepted key, in display order.
const std::vector<KeySpec>& key_specs();

class RunConfig {
 public:
  RunConfig();

  /// Throws DataError naming the key (and source) for unknown keys or
  /// values that do not parse as the key's type.
  void set(const std::string& key, const std::string& value, const std::string& source = "command line");
  void load(std::istream& in, const std::string& source);
  void load_file(const std::string& path);

  const std::string& text(const std::string& key) const;
  long long integer(const std::string& key) const;
  std::uint64_t uinteger(const std::string& key) const;
  double real(const std::string& key) const;
  bool boolean(const std::string& key) const;

  /// vocab_size is left at 0 for the caller.
  model::ModelConfig model_config() const;
  /// delimiter is resolved by the caller from train.delimiter.
  obj::TrainConfig train_config() const;
  style::TransferConfig transfer_config() const;

  /// All keys as `key = value` lines.
  std::string dump() const;

 private:
  const KeySpec& spec(const std::string& key) const;
  std::map<std::string, std::string> values_;
};

}  // namespace xledit::cli
