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

#include "xledit/cli/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "xledit/error.hpp"

namespace xledit::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_bool(const std::string& v, bool& out) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return out = true, true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return out = false, true;
  return false;
}

template <typename N>
bool parse_number(const std::string& v, N& out) {
  const char* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, out);
  return ec == std::errc() && p == end && !v.empty();
}

bool valid(ValueType t, const std::string& v) {
  long long i;
  std::uint64_t u;
  double d;
  bool b;
  switch (t) {
    case ValueType::kInt: return parse_number(v, i);
    case ValueType::kUint: return parse_number(v, u);
    case ValueType::kReal: return (parse_number(v, d) && !std::isnan(d)) || v == "inf";
    case ValueType::kBool: return parse_bool(v, b);
    case ValueType::kText: return true;
  }
  return false;
}

const char* type_name(ValueType t) {
  switch (t) {
    case ValueType::kInt: return "integer";
    case ValueType::kUint: return "non-negative integer";
    case ValueType::kReal: return "number";
    case ValueType::kBool: return "boolean";
    case ValueType::kText: return "text";
  }
  return "?";
}

}  // namespace

const std::vector<KeySpec>& key_specs() {
  using V = ValueType;
  static const std::vector<KeySpec> specs = {
      {"seed", V::kUint, "1", "seed for every random choice"},

      {"model.n_layers", V::kInt, "4", "transformer layers"},
      {"model.n_heads", V::kInt, "4", "attention heads"},
      {"model.d_model", V::kInt, "256", "hidden width"},
      {"model.d_ff", V::kInt, "512", "feed-forward width"},
      {"model.n_styles", V::kInt, "2", "number of style labels"},
      {"model.max_offset", V::kInt, "256", "largest relative offset with its own encoding"},
      {"model.dropout", V::kReal, "0.1", "dropout rate during training"},
      {"model.init_std", V::kReal, "0.02", "initial weight scale"},
      {"model.l2r", V::kBool, "false", "left-to-right baseline: raw offsets, no end-of-insertion"},

      {"train.batch_size", V::kInt, "16", "examples per step"},
      {"train.steps", V::kInt, "1000", "optimizer steps"},
      {"train.lr", V::kReal, "0.0003", "peak learning rate"},
      {"train.warmup", V::kInt, "200", "linear warmup steps"},
      {"train.lambda_ins", V::kReal, "1", "weight of the insertion loss"},
      {"train.lambda_cls", V::kReal, "1", "weight of the style classification loss"},
      {"train.strict_intervals", V::kBool, "false", "never train on the whole sequence as one span"},
      {"train.conditional", V::kBool, "false", "feed the line's style to the insertion model"},
      {"train.clip", V::kReal, "1", "gradient norm clip, 0 disables"},
      {"train.delimiter", V::kText, "", "sentence end word; empty trains on whole lines"},
      {"train.window_min", V::kInt, "3", "fewest sentences per training window"},
      {"train.window_max", V::kInt, "5", "most sentences per training window"},
      {"train.report_every", V::kInt, "10", "steps between metrics lines"},
      {"train.checkpoint_every", V::kInt, "0", "steps between checkpoints, 0 only at the end"},
      {"train.timing", V::kBool, "false", "report throughput (metrics become run-dependent)"},
      {"train.min_count", V::kInt, "1", "rarer words map to the unknown token"},

      {"transfer.max_span", V::kInt, "4", "longest span considered for an edit"},
      {"transfer.v_thres", V::kReal, "2", "span score needed to edit"},
      {"transfer.max_iters", V::kInt, "10", "most edits per sentence"},
      {"transfer.biased_sampling", V::kBool, "true", "first payload token by target-minus-source preference"},
      {"transfer.forced_insertion", V::kBool, "false", "insert at the start when nothing else fires"},
      {"transfer.forced_insertion_conf", V::kReal, "0.9", "source-style confidence that forces an insertion"},
      {"transfer.payload_cap", V::kInt, "8", "longest decoded payload"},
      {"transfer.src_style", V::kInt, "0", "style of the input"},
      {"transfer.tgt_style", V::kInt, "1", "style to produce"},

      {"eval.kind", V::kText, "locate", "task kind: locate, infill, delete or transfer"},
      {"eval.n", V::kInt, "100", "tasks to generate"},
      {"eval.mode", V::kText, "xledit", "xledit, xledit_rank, l2r, l2r_rank or copy"},
      {"eval.delimiter", V::kText, ".", "sentence end word of the task corpus"},
      {"eval.infill_cap", V::kInt, "24", "longest infill (at least twice the reference)"},
      {"eval.style_words", V::kText, "", "file of style words, 'builtin' for the review lexicon, empty for none"},

      {"edit.op", V::kText, "locate", "locate, infill, delete or replace"},
      {"edit.gap", V::kInt, "-1", "infill gap; -1 locates it first"},
      {"edit.gaps", V::kText, "", "comma-separated candidate gaps for locate; empty for all"},
      {"edit.i", V::kInt, "1", "first token of the replaced span"},
      {"edit.j", V::kInt, "1", "last token of the replaced span"},
      {"edit.payload", V::kText, "", "replacement text; empty decodes one"},
      {"edit.spans", V::kText, "", "delete candidates as i-j,i-j; empty uses the sentences"},
      {"edit.cap", V::kInt, "24", "longest decoded insertion"},
      {"edit.style", V::kInt, "-1", "style to condition on, -1 for none"},

      {"corpus.kind", V::kText, "story", "story or reviews"},
      {"corpus.documents", V::kInt, "2000", "story documents"},
      {"corpus.sentences", V::kInt, "8", "sentences per story document"},
      {"corpus.lines", V::kInt, "4000", "review lines"},

      {"inspect.len", V::kInt, "6", "composed sequence length"},
      {"inspect.a", V::kInt, "2", "first span position"},
      {"inspect.b", V::kInt, "5", "last span position (end-of-insertion slot)"},
      {"inspect.scheme", V::kText, "insertion", "insertion, l2r or full"},

      {"paths.corpus", V::kText, "", "plain corpus, one document per line"},
      {"paths.styled_corpus", V::kText, "", "style<TAB>text corpus"},
      {"paths.checkpoint", V::kText, "model.ckpt", "model checkpoint; vocabulary goes next to it"},
      {"paths.classifier", V::kText, "", "style classifier checkpoint for transfer evaluation"},
      {"paths.metrics", V::kText, "", "training metrics, JSON lines"},
      {"paths.tasks", V::kText, "tasks.jsonl", "task file"},
      {"paths.report", V::kText, "", "evaluation report, JSON"},
      {"paths.trace", V::kText, "", "transfer trace, JSON lines"},
      {"paths.input", V::kText, "", "input text; empty reads stdin"},
      {"paths.output", V::kText, "", "output text; empty writes stdout"},
  };
  return specs;
}

RunConfig::RunConfig() {
  for (const auto& s : key_specs()) values_[s.key] = s.default_value;
}

const KeySpec& RunConfig::spec(const std::string& key) const {
  for (const auto& s : key_specs())
    if (s.key == key) return s;
  throw DataError("unknown config key '" + key + "'");
}

void RunConfig::set(const std::string& key, const std::string& value, const std::string& source) {
  const KeySpec* s;
  try {
    s = &spec(key);
  } catch (const DataError&) {
    throw DataError("unknown config key '" + key + "' (" + source + ")");
  }
  if (!valid(s->type, value))
    throw DataError("config key '" + key + "': expected " + type_name(s->type) + ", got '" + value + "' (" + source +
                    ")");
  values_[key] = value;
}

void RunConfig::load(std::istream& in, const std::string& source) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = source + ":" + std::to_string(lineno);
    if (eq == std::string::npos) throw DataError(where + ": expected 'key = value'");
    set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)), where);
  }
}

void RunConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file: " + path);
  load(in, path);
}

const std::string& RunConfig::text(const std::string& key) const {
  spec(key);
  return values_.at(key);
}

long long RunConfig::integer(const std::string& key) const {
  XLEDIT_REQUIRE(spec(key).type == ValueType::kInt, key + " is not an integer key");
  long long v = 0;
  parse_number(values_.at(key), v);
  return v;
}

std::uint64_t RunConfig::uinteger(const std::string& key) const {
  XLEDIT_REQUIRE(spec(key).type == ValueType::kUint, key + " is not an unsigned key");
  std::uint64_t v = 0;
  parse_number(values_.at(key), v);
  return v;
}

double RunConfig::real(const std::string& key) const {
  XLEDIT_REQUIRE(spec(key).type == ValueType::kReal, key + " is not a numeric key");
  const auto& s = values_.at(key);
  if (s == "inf") return HUGE_VAL;
  double v = 0;
  parse_number(s, v);
  return v;
}

bool RunConfig::boolean(const std::string& key) const {
  XLEDIT_REQUIRE(spec(key).type == ValueType::kBool, key + " is not a boolean key");
  bool v = false;
  parse_bool(values_.at(key), v);
  return v;
}

model::ModelConfig RunConfig::model_config() const {
  model::ModelConfig c;
  c.n_layers = static_cast<int>(integer("model.n_layers"));
  c.n_heads = static_cast<int>(integer("model.n_heads"));
  c.d_model = static_cast<int>(integer("model.d_model"));
  c.d_ff = static_cast<int>(integer("model.d_ff"));
  c.n_styles = static_cast<int>(integer("model.n_styles"));
  c.max_offset = static_cast<int>(integer("model.max_offset"));
  c.dropout = real("model.dropout");
  c.init_std = real("model.init_std");
  c.l2r = boolean("model.l2r");
  return c;
}

obj::TrainConfig RunConfig::train_config() const {
  obj::TrainConfig c;
  c.batch_size = static_cast<int>(integer("train.batch_size"));
  c.steps = static_cast<int>(integer("train.steps"));
  c.lr = real("train.lr");
  c.warmup = static_cast<int>(integer("train.warmup"));
  c.seed = uinteger("seed");
  c.lambda_ins = real("train.lambda_ins");
  c.lambda_cls = real("train.lambda_cls");
  c.strict_intervals = boolean("train.strict_intervals");
  c.conditional = boolean("train.conditional");
  c.clip = real("train.clip");
  c.window_min = static_cast<int>(integer("train.window_min"));
  c.window_max = static_cast<int>(integer("train.window_max"));
  c.report_every = static_cast<int>(integer("train.report_every"));
  c.checkpoint_every = static_cast<int>(integer("train.checkpoint_every"));
  c.timing = boolean("train.timing");
  return c;
}

style::TransferConfig RunConfig::transfer_config() const {
  style::TransferConfig c;
  c.max_span = static_cast<int>(integer("transfer.max_span"));
  c.v_thres = real("transfer.v_thres");
  c.max_iters = static_cast<int>(integer("transfer.max_iters"));
  c.biased_sampling = boolean("transfer.biased_sampling");
  c.forced_insertion = boolean("transfer.forced_insertion");
  c.forced_insertion_conf = real("transfer.forced_insertion_conf");
  c.payload_cap = static_cast<int>(integer("transfer.payload_cap"));
  c.src_style = static_cast<int>(integer("transfer.src_style"));
  c.tgt_style = static_cast<int>(integer("transfer.tgt_style"));
  return c;
}

std::string RunConfig::dump() const {
  std::string out;
  for (const auto& s : key_specs()) out += s.key + " = " + values_.at(s.key) + "\n";
  return out;
}

}  // namespace xledit::cli
