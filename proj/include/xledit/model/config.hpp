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

#include <string>

namespace xledit::model {

struct ModelConfig {
  int n_layers = 4;
  int n_heads = 4;
  int d_model = 256;
  int d_ff = 512;
  int vocab_size = 0;
  int n_styles = 2;
  int max_offset = 256;
  double dropout = 0.1;
  double init_std = 0.02;
  bool l2r = false;  // raw offsets, no EOI slot

  int head_dim() const { return d_model / n_heads; }
  void validate() const;

  /// key=value lines, one per field.
  std::string to_text() const;
  static ModelConfig from_text(const std::string& text);

  bool operator==(const ModelConfig&) const = default;
};

}  // namespace xledit::model
