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

#include "xledit/model/config.hpp"

#include <charconv>
#include <cstdio>
#include <set>
#include <sstream>

#include "xledit/error.hpp"

namespace xledit::model {

void ModelConfig::validate() const {
  auto need = [](bool ok, const std::string& what) {
    if (!ok) throw DataError("invalid model config: " + what);
  };
  need(n_layers >= 1, "n_layers must be >= 1");
  need(n_heads >= 1, "n_heads must be >= 1");
  need(d_model >= 2 && d_model % n_heads == 0, "d_model must be divisible by n_heads");
  need(d_model % 2 == 0, "d_model must be even");
  need(d_ff >= 1, "d_ff must be >= 1");
  need(vocab_size >= 4 + n_styles, "vocab_size too small for the reserved ids");
  need(n_styles >= 0, "n_styles must be >= 0");
  need(max_offset >= 1, "max_offset must be >= 1");
  need(dropout >= 0.0 && dropout < 1.0, "dropout must lie in [0, 1)");
  need(init_std >= 0.0, "init_std must be >= 0");
}

std::string ModelConfig::to_text() const {
  char buf[64];
  std::ostringstream out;
  out << "n_layers=" << n_layers << '\n'
      << "n_heads=" << n_heads << '\n'
      << "d_model=" << d_model << '\n'
      << "d_ff=" << d_ff << '\n'
      << "vocab_size=" << vocab_size << '\n'
      << "n_styles=" << n_styles << '\n'
      << "max_offset=" << max_offset << '\n';
  std::snprintf(buf, sizeof buf, "%.17g", dropout);
  out << "dropout=" << buf << '\n';
  std::snprintf(buf, sizeof buf, "%.17g", init_std);
  out << "init_std=" << buf << '\n' << "l2r=" << (l2r ? 1 : 0) << '\n';
  return out.str();
}

ModelConfig ModelConfig::from_text(const std::string& text) {
  ModelConfig c;
  std::istringstream in(text);
  std::string line;
  std::set<std::string> seen;
  auto as_int = [](const std::string& key, const std::string& v) {
    int x = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || p != v.data() + v.size()) throw DataError("bad integer for model." + key + ": " + v);
    return x;
  };
  auto as_double = [](const std::string& key, const std::string& v) {
    try {
      std::size_t used = 0;
      double x = std::stod(v, &used);
      if (used != v.size()) throw std::invalid_argument(v);
      return x;
    } catch (const std::exception&) {
      throw DataError("bad number for model." + key + ": " + v);
    }
  };
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw DataError("malformed model config line: " + line);
    const std::string key = line.substr(0, eq), value = line.substr(eq + 1);
    seen.insert(key);
    if (key == "n_layers") c.n_layers = as_int(key, value);
    else if (key == "n_heads") c.n_heads = as_int(key, value);
    else if (key == "d_model") c.d_model = as_int(key, value);
    else if (key == "d_ff") c.d_ff = as_int(key, value);
    else if (key == "vocab_size") c.vocab_size = as_int(key, value);
    else if (key == "n_styles") c.n_styles = as_int(key, value);
    else if (key == "max_offset") c.max_offset = as_int(key, value);
    else if (key == "dropout") c.dropout = as_double(key, value);
    else if (key == "init_std") c.init_std = as_double(key, value);
    else if (key == "l2r") c.l2r = as_int(key, value) != 0;
    else throw DataError("unknown model config key: " + key);
  }
  c.validate();
  return c;
}

}  // namespace xledit::model
