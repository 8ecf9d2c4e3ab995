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

#include "xledit/model/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <map>
#include <set>

namespace xledit::model {

namespace {

using Kind = CheckpointError::Kind;

class Writer {
 public:
  explicit Writer(const std::string& path) : path_(path), out_(path, std::ios::binary) {
    if (!out_) throw CheckpointError(Kind::kIo, "cannot write checkpoint: " + path);
  }
  void bytes(const void* p, std::size_t n) { out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n)); }
  void u32(std::uint32_t v) {
    unsigned char b[4];
    for (int k = 0; k < 4; ++k) b[k] = static_cast<unsigned char>(v >> (8 * k));
    bytes(b, 4);
  }
  void u64(std::uint64_t v) {
    unsigned char b[8];
    for (int k = 0; k < 8; ++k) b[k] = static_cast<unsigned char>(v >> (8 * k));
    bytes(b, 8);
  }
  void finish() {
    out_.flush();
    if (!out_) throw CheckpointError(Kind::kIo, "failed writing checkpoint: " + path_);
  }

 private:
  std::string path_;
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::string& path) : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw CheckpointError(Kind::kIo, "cannot open checkpoint: " + path);
  }
  void bytes(void* p, std::size_t n, const char* what) {
    in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n)
      throw CheckpointError(Kind::kTruncated, path_ + ": truncated while reading " + what);
  }
  std::uint32_t u32(const char* what) {
    unsigned char b[4];
    bytes(b, 4, what);
    std::uint32_t v = 0;
    for (int k = 0; k < 4; ++k) v |= static_cast<std::uint32_t>(b[k]) << (8 * k);
    return v;
  }
  std::uint64_t u64(const char* what) {
    unsigned char b[8];
    bytes(b, 8, what);
    std::uint64_t v = 0;
    for (int k = 0; k < 8; ++k) v |= static_cast<std::uint64_t>(b[k]) << (8 * k);
    return v;
  }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ifstream in_;
};

// Guards allocations driven by header fields of a corrupt file.
constexpr std::uint64_t kMaxField = 1ull << 32;

struct FileContents {
  ModelConfig config;
  std::map<std::string, num::Tensor<float>> tensors;
};

FileContents read_file(const std::string& path) {
  Reader r(path);
  char magic[4];
  r.bytes(magic, 4, "magic");
  if (std::memcmp(magic, "XLED", 4) != 0) throw CheckpointError(Kind::kBadMagic, path + ": bad magic, not a checkpoint");
  const auto version = r.u32("version");
  if (version != kCheckpointVersion)
    throw CheckpointError(Kind::kBadVersion, path + ": unsupported checkpoint version " + std::to_string(version));
  const auto clen = r.u64("config length");
  if (clen > kMaxField) throw CheckpointError(Kind::kBadConfig, path + ": implausible config length");
  std::string text(clen, '\0');
  r.bytes(text.data(), clen, "config");
  FileContents fc;
  try {
    fc.config = ModelConfig::from_text(text);
  } catch (const DataError& e) {
    throw CheckpointError(Kind::kBadConfig, path + ": " + e.what());
  }
  const auto count = r.u32("tensor count");
  for (std::uint32_t t = 0; t < count; ++t) {
    const auto nlen = r.u32("tensor name length");
    if (nlen > 4096) throw CheckpointError(Kind::kTruncated, path + ": corrupt tensor name length");
    std::string name(nlen, '\0');
    r.bytes(name.data(), nlen, "tensor name");
    const auto rank = r.u32("tensor rank");
    if (rank > 8) throw CheckpointError(Kind::kTruncated, path + ": corrupt rank for " + name);
    num::Shape shape;
    std::uint64_t n = 1;
    for (std::uint32_t k = 0; k < rank; ++k) {
      shape.push_back(r.u64("tensor dims"));
      n *= shape.back();
      if (n > kMaxField) throw CheckpointError(Kind::kTruncated, path + ": corrupt dims for " + name);
    }
    std::vector<float> data(n);
    for (std::uint64_t k = 0; k < n; ++k) data[k] = std::bit_cast<float>(r.u32(name.c_str()));
    fc.tensors.emplace(name, num::Tensor<float>(shape, std::move(data)));
  }
  return fc;
}

Params<float> fill(const std::string& path, const ModelConfig& layout, FileContents& fc) {
  auto params = Params<float>::zeros(layout);
  const auto named = params.named();
  std::set<std::string> expected;
  for (auto& [name, var] : named) expected.insert(name);
  for (auto& [name, t] : fc.tensors)
    if (!expected.count(name)) throw CheckpointError(Kind::kUnknownTensor, path + ": unknown tensor " + name);
  for (auto& [name, var] : named) {
    auto it = fc.tensors.find(name);
    if (it == fc.tensors.end()) throw CheckpointError(Kind::kMissingTensor, path + ": missing tensor " + name);
    if (it->second.shape() != var.shape())
      throw CheckpointError(Kind::kShapeMismatch, path + ": shape mismatch for tensor " + name + ": file has " +
                                                      num::shape_str(it->second.shape()) + ", expected " +
                                                      num::shape_str(var.shape()));
    var.mutable_value() = std::move(it->second);
  }
  return params;
}

}  // namespace

void save_checkpoint(const Params<float>& params, const std::string& path) {
  Writer w(path);
  w.bytes("XLED", 4);
  w.u32(kCheckpointVersion);
  const auto text = params.config.to_text();
  w.u64(text.size());
  w.bytes(text.data(), text.size());
  const auto named = params.named();
  w.u32(static_cast<std::uint32_t>(named.size()));
  for (auto& [name, var] : named) {
    w.u32(static_cast<std::uint32_t>(name.size()));
    w.bytes(name.data(), name.size());
    const auto& t = var.value();
    w.u32(static_cast<std::uint32_t>(t.rank()));
    for (auto d : t.shape()) w.u64(d);
    for (std::size_t k = 0; k < t.size(); ++k) w.u32(std::bit_cast<std::uint32_t>(t[k]));
  }
  w.finish();
}

Params<float> load_checkpoint(const std::string& path) {
  auto fc = read_file(path);
  const auto config = fc.config;
  return fill(path, config, fc);
}

Params<float> load_checkpoint(const std::string& path, const ModelConfig& expected) {
  auto fc = read_file(path);
  return fill(path, expected, fc);
}

}  // namespace xledit::model
