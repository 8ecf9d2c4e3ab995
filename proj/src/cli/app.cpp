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

#include "xledit/cli/app.hpp"

#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <memory>
#include <sstream>
#include <unordered_set>

#include "xledit/cli/config.hpp"
#include "xledit/editor/editor.hpp"
#include "xledit/encoding/corpus.hpp"
#include "xledit/error.hpp"
#include "xledit/evalkit/evaluate.hpp"
#include "xledit/evalkit/synth.hpp"
#include "xledit/evalkit/tasks.hpp"
#include "xledit/model/checkpoint.hpp"
#include "xledit/objectives/train.hpp"
#include "xledit/positional/offsets.hpp"
#include "xledit/styler/transfer.hpp"

namespace xledit::cli {

namespace {

using Json = nlohmann::ordered_json;
using Log = std::shared_ptr<spdlog::logger>;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Io {
  std::istream& in;
  std::ostream& out;
  Log log;
};

struct Loaded {
  enc::Vocabulary vocab;
  model::Model<float> model;
};

std::string vocab_path(const std::string& checkpoint) { return checkpoint + ".vocab"; }

Loaded load_model(const std::string& checkpoint) {
  auto params = model::load_checkpoint(checkpoint);
  auto vocab = enc::Vocabulary::load(vocab_path(checkpoint));
  if (vocab.size() != params.config.vocab_size)
    throw DataError(vocab_path(checkpoint) + " has " + std::to_string(vocab.size()) + " entries but " + checkpoint +
                    " expects " + std::to_string(params.config.vocab_size));
  return {std::move(vocab), model::Model<float>(std::move(params))};
}

const std::string& required(const RunConfig& cfg, const std::string& key, const std::string& what) {
  const auto& v = cfg.text(key);
  if (v.empty()) throw DataError(what + " needs " + key);
  return v;
}

std::vector<std::string> input_lines(const RunConfig& cfg, Io& io) {
  const auto& path = cfg.text("paths.input");
  if (!path.empty()) return enc::read_lines(path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(io.in, line)) lines.push_back(line);
  return lines;
}

// Writes to paths.output when set, to stdout otherwise.
void emit_lines(const RunConfig& cfg, Io& io, const std::vector<std::string>& lines) {
  const auto& path = cfg.text("paths.output");
  if (!path.empty()) {
    enc::write_lines(path, lines);
    return;
  }
  for (const auto& l : lines) io.out << l << '\n';
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot write " + path);
  f << text;
  if (!f.flush()) throw DataError("failed writing " + path);
}

std::vector<int> encode_words(const enc::Vocabulary& vocab, const std::string& line, Io& io) {
  auto ids = vocab.encode(line);
  for (auto& w : enc::split_whitespace(line))
    if (!vocab.contains(w)) io.log->warn("'{}' is not in the vocabulary; using the unknown token", w);
  return ids;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw DataError("config key '" + key + "': bad integer '" + item + "'");
    }
  }
  return out;
}

// ---- subcommands ---------------------------------------------------------

void cmd_gen_corpus(const RunConfig& cfg, Io& io) {
  const auto& kind = cfg.text("corpus.kind");
  std::vector<std::string> lines;
  if (kind == "story") {
    evalkit::StoryOptions o;
    o.documents = static_cast<int>(cfg.integer("corpus.documents"));
    o.sentences = static_cast<int>(cfg.integer("corpus.sentences"));
    o.seed = cfg.uinteger("seed");
    lines = evalkit::story_corpus(o);
  } else if (kind == "reviews") {
    evalkit::ReviewOptions o;
    o.lines = static_cast<int>(cfg.integer("corpus.lines"));
    o.seed = cfg.uinteger("seed");
    for (const auto& l : evalkit::review_corpus(o)) lines.push_back(std::to_string(l.style) + "\t" + l.text);
  } else {
    throw DataError("config key 'corpus.kind' must be story or reviews, got '" + kind + "'");
  }
  emit_lines(cfg, io, lines);
  io.log->info("wrote {} {} lines", lines.size(), kind);
}

void cmd_train(const RunConfig& cfg, Io& io) {
  const auto& plain = cfg.text("paths.corpus");
  const auto& styled = cfg.text("paths.styled_corpus");
  if (plain.empty() == styled.empty()) throw DataError("train needs exactly one of paths.corpus and paths.styled_corpus");
  auto mcfg = cfg.model_config();
  std::vector<std::string> texts;
  std::vector<enc::StyledLine> styled_lines;
  if (!plain.empty()) {
    texts = enc::read_lines(plain);
  } else {
    styled_lines = enc::read_style_tsv(styled, mcfg.n_styles);
    for (const auto& l : styled_lines) texts.push_back(l.text);
  }
  const auto vocab = enc::Vocabulary::build(texts, static_cast<int>(cfg.integer("train.min_count")), mcfg.n_styles);
  const auto docs = plain.empty() ? enc::encode_documents(styled_lines, vocab) : enc::encode_documents(texts, vocab);
  auto tcfg = cfg.train_config();
  if (const auto& d = cfg.text("train.delimiter"); !d.empty()) {
    if (!vocab.contains(d)) throw DataError("train.delimiter '" + d + "' never occurs in the corpus");
    tcfg.delimiter = vocab.id(d);
  }
  mcfg.vocab_size = vocab.size();
  const auto& ckpt = cfg.text("paths.checkpoint");
  io.log->info("training on {} documents, vocabulary {}, {} steps", docs.size(), vocab.size(), tcfg.steps);
  vocab.save(vocab_path(ckpt));
  obj::train_to_files(docs, vocab, tcfg, mcfg, ckpt, cfg.text("paths.metrics"), [&](const obj::LossReport& r) {
    io.log->info("step {} ins_nll {} cls_ce {}", r.step, r.ins_nll ? std::to_string(*r.ins_nll) : "-",
                 r.cls_ce ? std::to_string(*r.cls_ce) : "-");
  });
  io.log->info("wrote {} and {}", ckpt, vocab_path(ckpt));
}

void cmd_gen_tasks(const RunConfig& cfg, Io& io) {
  const auto kind = evalkit::parse_task_kind(cfg.text("eval.kind"));
  const int n = static_cast<int>(cfg.integer("eval.n"));
  num::Rng rng = num::Rng(cfg.uinteger("seed")).split("tasks");
  std::vector<evalkit::TaskInstance> tasks;
  if (kind == evalkit::TaskKind::kTransfer) {
    const auto lines = enc::read_style_tsv(required(cfg, "paths.styled_corpus", "gen-tasks --eval.kind transfer"),
                                           static_cast<int>(cfg.integer("model.n_styles")));
    tasks = evalkit::gen_transfer_tasks(lines, n, static_cast<int>(cfg.integer("model.n_styles")), rng);
  } else {
    const auto docs = enc::read_lines(required(cfg, "paths.corpus", "gen-tasks"));
    evalkit::TaskOptions opts;
    opts.delimiter = cfg.text("eval.delimiter");
    tasks = evalkit::gen_tasks(docs, kind, n, rng, opts);
  }
  const auto& path = cfg.text("paths.tasks");
  evalkit::write_tasks(path, tasks);
  io.log->info("wrote {} {} tasks to {}", tasks.size(), evalkit::to_string(kind), path);
}

std::unordered_set<std::string> style_words(const RunConfig& cfg) {
  const auto& src = cfg.text("eval.style_words");
  std::unordered_set<std::string> out;
  if (src == "builtin") {
    out.insert(evalkit::review_style_words().begin(), evalkit::review_style_words().end());
  } else if (!src.empty()) {
    for (const auto& line : enc::read_lines(src))
      for (auto& w : enc::split_whitespace(line)) out.insert(w);
  }
  return out;
}

void cmd_eval(const RunConfig& cfg, Io& io) {
  const auto mode = evalkit::parse_eval_mode(cfg.text("eval.mode"));
  auto tasks = evalkit::read_tasks(cfg.text("paths.tasks"));
  const auto lm = load_model(cfg.text("paths.checkpoint"));
  std::optional<Loaded> clf;
  if (const auto& c = cfg.text("paths.classifier"); !c.empty()) {
    clf.emplace(load_model(c));
    if (!(clf->vocab == lm.vocab)) throw DataError("classifier vocabulary " + vocab_path(c) + " differs from the model's");
  }
  evalkit::EvalOptions opts;
  opts.infill_cap = static_cast<int>(cfg.integer("eval.infill_cap"));
  opts.transfer = cfg.transfer_config();
  opts.style_words = style_words(cfg);
  evalkit::EvalDetail detail;
  const auto rep =
      evalkit::run_eval(lm.model, lm.vocab, tasks, mode, opts, clf ? &clf->model : nullptr, &detail);
  const auto json = rep.to_json();
  io.out << json << '\n';
  if (const auto& p = cfg.text("paths.report"); !p.empty()) write_text(p, json + "\n");
  if (const auto& p = cfg.text("paths.trace"); !p.empty() && !detail.traces.empty()) {
    std::string text;
    for (std::size_t k = 0; k < tasks.size(); ++k) {
      std::stringstream lines(detail.traces[k]);
      std::string line;
      while (std::getline(lines, line)) {
        Json j;
        j["task"] = tasks[k].id;
        const auto step = Json::parse(line);
        for (auto& [key, v] : step.items()) j[key] = v;
        text += j.dump() + "\n";
      }
    }
    write_text(p, text);
  }
}

void cmd_edit(const RunConfig& cfg, Io& io) {
  const auto lm = load_model(cfg.text("paths.checkpoint"));
  const auto lines = input_lines(cfg, io);
  if (lines.empty()) throw DataError("edit needs one line of input");
  const auto x = encode_words(lm.vocab, lines[0], io);
  const int n = static_cast<int>(x.size());
  const auto& op = cfg.text("edit.op");
  const int style = static_cast<int>(cfg.integer("edit.style"));
  const int cap = static_cast<int>(cfg.integer("edit.cap"));
  const auto& m = lm.model;
  auto text = [&](const std::vector<int>& ids) { return lm.vocab.decode(ids); };

  std::vector<int> gaps;
  if (!cfg.text("edit.gaps").empty()) {
    gaps = parse_int_list("edit.gaps", cfg.text("edit.gaps"));
  } else {
    for (int g = 0; g <= n; ++g) gaps.push_back(g);
  }
  for (int g : gaps)
    if (g < 0 || g > n) throw DataError("gap " + std::to_string(g) + " is outside 0.." + std::to_string(n));

  if (op == "locate") {
    const int g = edit::locate(m, x, gaps);
    io.log->info("best gap {} of {} candidates", g, gaps.size());
    io.out << g << '\n';
  } else if (op == "infill") {
    int g = static_cast<int>(cfg.integer("edit.gap"));
    if (g < 0) g = edit::locate(m, x, gaps);
    if (g > n) throw DataError("edit.gap " + std::to_string(g) + " is outside 0.." + std::to_string(n));
    const auto r = edit::infill(m, x, g, cap, edit::InfillRule::kSpanPerplexity, style);
    const auto y = r.tokens.empty() ? x : edit::make_edit(g + 1, g, r.tokens, 0).apply(x);
    io.log->info("inserted {} tokens at gap {}{}", r.tokens.size(), g, r.hit_cap ? " (cap reached)" : "");
    io.out << text(y) << '\n';
  } else if (op == "delete") {
    std::vector<edit::Span> spans;
    if (!cfg.text("edit.spans").empty()) {
      std::stringstream ss(cfg.text("edit.spans"));
      std::string item;
      while (std::getline(ss, item, ',')) {
        const auto dash = item.find('-');
        if (dash == std::string::npos) throw DataError("config key 'edit.spans': expected i-j, got '" + item + "'");
        const auto ij = parse_int_list("edit.spans", item.substr(0, dash) + "," + item.substr(dash + 1));
        spans.push_back({ij[0], ij[1]});
      }
    } else {
      const int delim = lm.vocab.contains(cfg.text("eval.delimiter")) ? lm.vocab.id(cfg.text("eval.delimiter")) : -1;
      int start = 1;
      for (int k = 1; k <= n; ++k)
        if (x[k - 1] == delim || k == n) spans.push_back({start, k}), start = k + 1;
    }
    for (const auto& s : spans)
      if (s.i < 1 || s.j < s.i || s.j > n)
        throw DataError("delete span " + std::to_string(s.i) + "-" + std::to_string(s.j) + " is outside 1.." +
                        std::to_string(n));
    if (spans.empty()) throw DataError("nothing to delete");
    const auto mode = evalkit::parse_eval_mode(cfg.text("eval.mode"));
    const bool rank = mode == evalkit::EvalMode::kXleditRank || mode == evalkit::EvalMode::kL2rRank;
    const int k = edit::delete_rank(m, x, spans, rank ? edit::DeleteRule::kRank : edit::DeleteRule::kRatio);
    io.log->info("deleting span {}-{}", spans[k].i, spans[k].j);
    io.out << text(edit::make_edit(spans[k].i, spans[k].j, {}, 0).apply(x)) << '\n';
  } else if (op == "replace") {
    const int i = static_cast<int>(cfg.integer("edit.i")), j = static_cast<int>(cfg.integer("edit.j"));
    if (i < 1 || j < i - 1 || j > n)
      throw DataError("edit span " + std::to_string(i) + "-" + std::to_string(j) + " is outside 1.." +
                      std::to_string(n));
    std::vector<int> y;
    if (!cfg.text("edit.payload").empty()) {
      y = encode_words(lm.vocab, cfg.text("edit.payload"), io);
      io.log->info("replacement odds {}", edit::replace_odds(m, x, i, j, y, style));
    } else {
      std::vector<int> rest(x.begin(), x.begin() + (i - 1));
      rest.insert(rest.end(), x.begin() + j, x.end());
      y = edit::infill(m, rest, i - 1, cap, edit::InfillRule::kSpanPerplexity, style).tokens;
    }
    io.out << text(y.empty() && j < i ? x : edit::make_edit(i, j, y, 0).apply(x)) << '\n';
  } else {
    throw DataError("config key 'edit.op' must be locate, infill, delete or replace, got '" + op + "'");
  }
}

void cmd_transfer(const RunConfig& cfg, Io& io) {
  const auto lm = load_model(cfg.text("paths.checkpoint"));
  const auto tcfg = cfg.transfer_config();
  tcfg.validate(lm.model.config().n_styles);
  std::vector<std::string> outputs;
  std::string trace;
  int line_no = 0;
  for (const auto& line : input_lines(cfg, io)) {
    ++line_no;
    const auto x = encode_words(lm.vocab, line, io);
    const auto r = style::transfer(lm.model, x, tcfg);
    // Untouched lines are echoed verbatim so unknown words survive.
    outputs.push_back(r.trace.steps.empty() ? line : lm.vocab.decode(r.output));
    std::stringstream lines(r.trace.to_jsonl(&lm.vocab));
    std::string l;
    while (std::getline(lines, l)) {
      Json j;
      j["line"] = line_no;
      const auto step = Json::parse(l);
      for (auto& [key, v] : step.items()) j[key] = v;
      trace += j.dump() + "\n";
    }
    io.log->debug("line {}: {} edits, {}", line_no, r.trace.steps.size(), style::to_string(r.trace.terminated_by));
  }
  emit_lines(cfg, io, outputs);
  if (const auto& p = cfg.text("paths.trace"); !p.empty()) write_text(p, trace);
}

void cmd_inspect_offsets(const RunConfig& cfg, Io& io) {
  pos::SpanLayout layout{static_cast<int>(cfg.integer("inspect.len")), static_cast<int>(cfg.integer("inspect.a")),
                         static_cast<int>(cfg.integer("inspect.b"))};
  try {
    layout.validate();
  } catch (const ContractError& e) {
    throw DataError(e.what());
  }
  const auto& name = cfg.text("inspect.scheme");
  pos::OffsetScheme scheme;
  if (name == "insertion")
    scheme = pos::OffsetScheme::kInsertion;
  else if (name == "l2r")
    scheme = pos::OffsetScheme::kLeftToRight;
  else if (name == "full")
    scheme = pos::OffsetScheme::kFull;
  else
    throw DataError("config key 'inspect.scheme' must be insertion, l2r or full, got '" + name + "'");
  const auto m = pos::build_offset_matrix(layout, scheme);
  io.out << "offsets (T=" << layout.total_len << ", a=" << layout.a << ", b=" << layout.b << ", " << name
         << "), row = query, column = key, '.' = masked\n"
         << pos::render(m) << "legal\n";
  for (int i = 0; i < m.n; ++i) {
    for (int j = 0; j < m.n; ++j) io.out << (j ? " " : "") << (m.is_legal(i, j) ? '1' : '0');
    io.out << '\n';
  }
}

// ---- argument plumbing ---------------------------------------------------

spdlog::level::level_enum log_level() {
  const char* env = std::getenv("XLEDIT_LOG");
  const std::string v = env ? env : "info";
  if (v == "error") return spdlog::level::err;
  if (v == "info") return spdlog::level::info;
  if (v == "debug") return spdlog::level::debug;
  throw UsageError("XLEDIT_LOG must be error, info or debug, got '" + v + "'");
}

std::string key_footer() {
  std::string out = "\nSettings (section.key = value in --config files, or --section.key VALUE):\n";
  std::size_t width = 0;
  for (const auto& s : key_specs()) width = std::max(width, s.key.size());
  for (const auto& s : key_specs()) {
    std::string def = s.default_value.empty() ? "\"\"" : s.default_value;
    out += "  " + s.key + std::string(width - s.key.size() + 2, ' ') + "[" + def + "]  " + s.help + "\n";
  }
  out +=
      "\nShortcuts: --seed, --src-style, --tgt-style, --v-thres, --len, --a, --b.\n"
      "Exit status: 0 success, 1 usage error, 2 data error. XLEDIT_LOG=error|info|debug sets verbosity.\n";
  return out;
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Insertion-based text editing: training, evaluation tasks, edits and style transfer.", "xledit"};
  app.require_subcommand(1, 1);
  app.allow_extras();
  app.footer(key_footer());

  std::vector<std::string> config_files;
  std::vector<std::string> sets;
  std::vector<std::pair<std::string, std::string>> ordered;

  struct Sub {
    const char* name;
    const char* help;
    void (*fn)(const RunConfig&, Io&);
  };
  const Sub subs[] = {
      {"train", "train a model on paths.corpus or paths.styled_corpus", cmd_train},
      {"gen-tasks", "write eval.n tasks of eval.kind to paths.tasks", cmd_gen_tasks},
      {"eval", "score a checkpoint on paths.tasks; prints a JSON report", cmd_eval},
      {"edit", "apply one edit.op to the first input line", cmd_edit},
      {"transfer", "restyle every input line from transfer.src_style to transfer.tgt_style", cmd_transfer},
      {"inspect-offsets", "print the relative offset matrix and legality mask", cmd_inspect_offsets},
      {"gen-corpus", "write a generated corpus (corpus.kind) to paths.output", cmd_gen_corpus},
  };
  std::vector<CLI::App*> sub_apps;
  for (const auto& s : subs) {
    auto* sa = app.add_subcommand(s.name, s.help);
    sa->fallthrough();
    sub_apps.push_back(sa);
  }

  app.add_option("--config", config_files, "settings file(s), applied before any flag")->group("General");
  app.add_option("--set", sets, "KEY=VALUE override, repeatable")->group("General");
  const std::pair<const char*, const char*> shortcuts[] = {
      {"--src-style", "transfer.src_style"}, {"--tgt-style", "transfer.tgt_style"},
      {"--v-thres", "transfer.v_thres"}, {"--len", "inspect.len"}, {"--a", "inspect.a"}, {"--b", "inspect.b"}};
  for (const auto& [flag, key] : shortcuts) {
    const std::string k = key;
    app.add_option_function<std::string>(
           flag, [&ordered, k](const std::string& v) { ordered.emplace_back(k, v); }, "same as --" + k)
        ->group("");
  }
  for (const auto& s : key_specs()) {
    const std::string k = s.key;
    app.add_option_function<std::string>(
           "--" + k, [&ordered, k](const std::string& v) { ordered.emplace_back(k, v); }, s.help)
        ->group("");
  }

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  // Leftover --section.key flags name unknown settings (a data error);
  // anything else left over is a usage error.
  std::string unknown_key;
  for (const auto& extra : app.remaining()) {
    if (extra.rfind("--", 0) == 0 && extra.find('.') != std::string::npos) {
      if (unknown_key.empty()) unknown_key = extra.substr(2, extra.find('=') - 2);
    } else if (unknown_key.empty() || extra.rfind("-", 0) == 0) {
      err << "unexpected argument '" << extra << "'\nRun with --help for more information.\n";
      return kExitUsage;
    }
  }
  if (!unknown_key.empty()) {
    err << "[error] unknown config key '" << unknown_key << "' (command line)\n";
    return kExitData;
  }

  Log log;
  try {
    auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
    log = std::make_shared<spdlog::logger>("xledit", sink);
    log->set_pattern("[%l] %v");
    log->set_level(log_level());
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    RunConfig cfg;
    for (const auto& f : config_files) cfg.load_file(f);
    for (const auto& [k, v] : ordered) cfg.set(k, v, "--" + k);
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw DataError("--set expects KEY=VALUE, got '" + s + "'");
      cfg.set(s.substr(0, eq), s.substr(eq + 1), "--set");
    }
    Io io{in, out, log};
    for (std::size_t k = 0; k < sub_apps.size(); ++k)
      if (sub_apps[k]->parsed()) subs[k].fn(cfg, io);
    out.flush();
    return kExitOk;
  } catch (const std::exception& e) {
    log->error("{}", e.what());
    return kExitData;
  }
}

}  // namespace xledit::cli
