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

// Binary layout, all integers little-endian:
//
//   "XLED" | u32 version | u64 n + n bytes of key=value config text
//   | u32 tensor count | tensor records
//
// record: u32 name length + name bytes | u32 rank | rank x u64 dims
//         | f32 values

#pragma once

#include <string>

#include "xledit/error.hpp"
#include "xledit/model/params.hpp"

namespace xledit::model {

inline constexpr std::uint32_t kCheckpointVersion = 1;

class CheckpointError : public DataError {
 public:
  enum class Kind { kIo, kBadMagic, kBadVersion, kTruncated, kBadConfig, kShapeMismatch, kMissingTensor, kUnknownTensor };

  CheckpointError(Kind kind, const std::string& msg) : DataError(msg), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

void save_checkpoint(const Params<float>& params, const std::string& path);

/// Reads the config stored in the file and the tensors it describes.
Params<float> load_checkpoint(const std::string& path);
/// Loads into the layout of `expected`; tensors must match it by name and
/// shape.
Params<float> load_checkpoint(const std::string& path, const ModelConfig& expected);

}  // namespace xledit::model
