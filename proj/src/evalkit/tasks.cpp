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

#include "xledit/evalkit/tasks.hpp"

#include <algorithm>
#include <fstream>
#include <json.hpp>

#include "xledit/error.hpp"

namespace xledit::evalkit {

using Json = nlohmann::ordered_json;
using Words = std::vector<std::string>;

std::string to_string(TaskKind k) {
  switch (k) {
    case TaskKind::kLocate: return "locate";
    case TaskKind::kInfill: return "infill";
    case TaskKind::kDelete: return "delete";
    case TaskKind::kTransfer: return "transfer";
  }
  return "?";
}

TaskKind parse_task_kind(const std::string& s) {
  for (auto k : {TaskKind::kLocate, TaskKind::kInfill, TaskKind::kDelete, TaskKind::kTransfer})
    if (to_string(k) == s) return k;
  throw DataError("unknown task kind '" + s + "' (locate|infill|delete|transfer)");
}

void TaskInstance::check() const {
  const int n = static_cast<int>(input.size());
  auto fail = [&](const std::string& why) {
    throw DataError("task " + std::to_string(id) + " (" + to_string(kind) + "): " + why);
  };
  auto gap_ok = [&](int g) { return g >= 0 && g <= n; };
  auto span_ok = [&](const edit::Span& s) { return s.i >= 1 && s.j >= s.i && s.j <= n; };
  switch (kind) {
    case TaskKind::kLocate:
      if (gaps.empty()) fail("no candidate gaps");
      for (int g : gaps)
        if (!gap_ok(g)) fail("gap " + std::to_string(g) + " out of range");
      if (std::find(gaps.begin(), gaps.end(), truth_gap) == gaps.end()) fail("truth is not a candidate");
      break;
    case TaskKind::kInfill:
      if (gaps.size() != 1 || !gap_ok(gaps[0])) fail("needs exactly one valid gap");
      if (truth_tokens.empty()) fail("empty truth");
      break;
    case TaskKind::kDelete:
      if (spans.empty()) fail("no candidate spans");
      for (const auto& s : spans)
        if (!span_ok(s)) fail("span out of range");
      if (std::find(spans.begin(), spans.end(), truth_span) == spans.end()) fail("truth is not a candidate");
      break;
    case TaskKind::kTransfer:
      if (src_style < 0 || tgt_style < 0) fail("missing styles");
      break;
  }
}

std::string TaskInstance::to_json() const {
  Json j;
  j["id"] = id;
  j["kind"] = to_string(kind);
  j["input"] = input;
  switch (kind) {
    case TaskKind::kLocate:
      j["candidates"] = gaps;
      j["truth"] = truth_gap;
      break;
    case TaskKind::kInfill:
      j["gap"] = gaps.at(0);
      j["truth"] = truth_tokens;
      break;
    case TaskKind::kDelete: {
      Json c = Json::array();
      for (const auto& s : spans) c.push_back({s.i, s.j});
      j["candidates"] = c;
      j["truth"] = {truth_span.i, truth_span.j};
      j["alien_doc"] = alien_doc;
      break;
    }
    case TaskKind::kTransfer:
      j["src_style"] = src_style;
      j["tgt_style"] = tgt_style;
      break;
  }
  if (source_doc >= 0) j["source_doc"] = source_doc;
  return j.dump();
}

TaskInstance TaskInstance::from_json(const std::string& line) {
  TaskInstance t;
  try {
    const auto j = Json::parse(line);
    t.id = j.at("id").get<int>();
    t.kind = parse_task_kind(j.at("kind").get<std::string>());
    t.input = j.at("input").get<Words>();
    t.source_doc = j.value("source_doc", -1);
    switch (t.kind) {
      case TaskKind::kLocate:
        t.gaps = j.at("candidates").get<std::vector<int>>();
        t.truth_gap = j.at("truth").get<int>();
        break;
      case TaskKind::kInfill:
        t.gaps = {j.at("gap").get<int>()};
        t.truth_tokens = j.at("truth").get<Words>();
        break;
      case TaskKind::kDelete:
        for (const auto& c : j.at("candidates")) t.spans.push_back({c.at(0).get<int>(), c.at(1).get<int>()});
        t.truth_span = {j.at("truth").at(0).get<int>(), j.at("truth").at(1).get<int>()};
        t.alien_doc = j.value("alien_doc", -1);
        break;
      case TaskKind::kTransfer:
        t.src_style = j.at("src_style").get<int>();
        t.tgt_style = j.at("tgt_style").get<int>();
        break;
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed task line: ") + e.what());
  }
  t.check();
  return t;
}

namespace {

using Sentences = std::vector<Words>;

Sentences split_doc(const std::string& doc, const std::string& delim) {
  Sentences out;
  Words cur;
  for (auto& w : enc::split_whitespace(doc)) {
    cur.push_back(w);
    if (w == delim) out.push_back(std::move(cur)), cur.clear();
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

void append(Words& dst, const Words& src) { dst.insert(dst.end(), src.begin(), src.end()); }

int count_words(const Sentences& s, int upto) {
  int n = 0;
  for (int k = 0; k < upto; ++k) n += static_cast<int>(s[k].size());
  return n;
}

// Cut a random piece from the middle of a 3-sentence window.
TaskInstance cut_middle(const Sentences& win, num::Rng& rng, const std::string& delim) {
  const Words& mid = win[1];
  int content = static_cast<int>(mid.size());
  if (content > 1 && mid.back() == delim) --content;
  // uniform over the content * (content + 1) / 2 non-empty intervals
  const auto pick = rng.below(static_cast<std::uint64_t>(content) * (content + 1) / 2);
  int s = 0, len = content;
  for (std::uint64_t left = pick;; ++s, --len) {
    if (left < static_cast<std::uint64_t>(len)) {
      len = static_cast<int>(left) + 1;
      break;
    }
    left -= len;
  }
  TaskInstance t;
  append(t.input, win[0]);
  t.input.insert(t.input.end(), mid.begin(), mid.begin() + s);
  t.truth_tokens.assign(mid.begin() + s, mid.begin() + s + len);
  t.input.insert(t.input.end(), mid.begin() + s + len, mid.end());
  append(t.input, win[2]);
  t.truth_gap = static_cast<int>(win[0].size()) + s;
  return t;
}

}  // namespace

std::vector<TaskInstance> gen_tasks(std::span<const std::string> docs, TaskKind kind, int n, num::Rng& rng,
                                    const TaskOptions& opts) {
  if (n < 0) throw DataError("negative task count");
  if (kind == TaskKind::kTransfer) throw DataError("transfer tasks are built from a styled corpus");
  std::vector<TaskInstance> out;
  if (n == 0) return out;
  const int need = kind == TaskKind::kDelete ? 4 : 3;
  std::vector<Sentences> split;
  std::vector<int> usable, nonempty;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    split.push_back(split_doc(docs[d], opts.delimiter));
    if (static_cast<int>(split.back().size()) >= need) usable.push_back(static_cast<int>(d));
    if (!split.back().empty()) nonempty.push_back(static_cast<int>(d));
  }
  if (usable.empty())
    throw DataError("no document has the " + std::to_string(need) + " sentences " + to_string(kind) + " tasks need");
  if (kind == TaskKind::kDelete && nonempty.size() < 2) throw DataError("delete tasks need at least two documents");

  for (int id = 0; id < n; ++id) {
    const int d = usable[rng.below(usable.size())];
    const Sentences& s = split[d];
    const int start = static_cast<int>(rng.below(s.size() - need + 1));
    const Sentences win(s.begin() + start, s.begin() + start + need);
    TaskInstance t;
    if (kind == TaskKind::kDelete) {
      int other;
      do {
        other = nonempty[rng.below(nonempty.size())];
      } while (other == d);
      const Words& alien = split[other][rng.below(split[other].size())];
      const int pos = 1 + static_cast<int>(rng.below(3));  // 0-based sentence slot 1..3
      Sentences five = win;
      five.insert(five.begin() + pos, alien);
      for (const auto& sent : five) append(t.input, sent);
      for (int k = 1; k <= 3; ++k) {
        const int i = count_words(five, k) + 1;
        t.spans.push_back({i, i + static_cast<int>(five[k].size()) - 1});
      }
      t.truth_span = t.spans[pos - 1];
      t.alien_doc = other;
    } else {
      t = cut_middle(win, rng, opts.delimiter);
      if (kind == TaskKind::kInfill) {
        t.gaps = {t.truth_gap};
        t.truth_gap = -1;
      } else {
        const int len = static_cast<int>(t.input.size());
        const int want = opts.locate_candidates - 1;
        const int below = t.truth_gap - 1, above = len - 1 - t.truth_gap;
        if (below + above < want)
          throw DataError("window of " + std::to_string(len) + " tokens is too short for " +
                          std::to_string(opts.locate_candidates) + " candidates");
        // The truth takes a uniform rank among the candidates when the window
        // allows it, so candidate order alone says nothing.
        std::vector<int> ranks;
        for (int r = 0; r <= want; ++r)
          if (r <= below && want - r <= above) ranks.push_back(r);
        const int n_below = ranks[rng.below(ranks.size())];
        auto draw = [&](int lo, int hi, int k) {  // k distinct gaps from [lo, hi]
          std::vector<int> pool;
          for (int g = lo; g <= hi; ++g) pool.push_back(g);
          for (int m = 0; m < k; ++m) std::swap(pool[m], pool[m + rng.below(pool.size() - m)]);
          t.gaps.insert(t.gaps.end(), pool.begin(), pool.begin() + k);
        };
        draw(1, t.truth_gap - 1, n_below);
        draw(t.truth_gap + 1, len - 1, want - n_below);
        t.gaps.push_back(t.truth_gap);
        std::sort(t.gaps.begin(), t.gaps.end());
      }
    }
    t.id = id;
    t.kind = kind;
    t.source_doc = d;
    t.check();
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<TaskInstance> gen_transfer_tasks(std::span<const enc::StyledLine> lines, int n, int num_styles,
                                             num::Rng& rng) {
  if (n < 0) throw DataError("negative task count");
  if (num_styles < 2) throw DataError("transfer needs at least two styles");
  if (static_cast<std::size_t>(n) > lines.size())
    throw DataError("asked for " + std::to_string(n) + " transfer tasks from " + std::to_string(lines.size()) +
                    " lines");
  std::vector<int> order(lines.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = static_cast<int>(k);
  std::vector<TaskInstance> out;
  for (int id = 0; id < n; ++id) {
    const auto r = id + rng.below(order.size() - id);
    std::swap(order[id], order[r]);
    const auto& line = lines[order[id]];
    if (line.style < 0 || line.style >= num_styles) throw DataError("line without a valid style");
    TaskInstance t;
    t.id = id;
    t.kind = TaskKind::kTransfer;
    t.input = enc::split_whitespace(line.text);
    t.source_doc = order[id];
    t.src_style = line.style;
    t.tgt_style = (line.style + 1) % num_styles;
    out.push_back(std::move(t));
  }
  return out;
}

void write_tasks(const std::string& path, std::span<const TaskInstance> tasks) {
  std::vector<std::string> lines;
  for (const auto& t : tasks) lines.push_back(t.to_json());
  enc::write_lines(path, lines);
}

std::vector<TaskInstance> read_tasks(const std::string& path) {
  std::vector<TaskInstance> out;
  int lineno = 0;
  for (const auto& line : enc::read_lines(path)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      out.push_back(TaskInstance::from_json(line));
    } catch (const DataError& e) {
      throw DataError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace xledit::evalkit
