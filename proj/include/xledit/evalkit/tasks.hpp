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

// Evaluation items built from plain-text documents.
//
//   locate   3-sentence window, a random piece of the middle sentence cut
//            out; pick the cut among 5 interior gaps
//   infill   same window; regenerate the cut piece at the known gap
//   delete   4 consecutive sentences plus one sentence from another
//            document spliced in at sentence 2, 3 or 4; find it
//   transfer one styled line to be moved to the other style

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "xledit/editor/editor.hpp"
#include "xledit/encoding/corpus.hpp"
#include "xledit/numerics/rng.hpp"

namespace xledit::evalkit {

enum class TaskKind { kLocate, kInfill, kDelete, kTransfer };
std::string to_string(TaskKind k);
TaskKind parse_task_kind(const std::string& s);

struct TaskInstance {
  int id = 0;
  TaskKind kind = TaskKind::kLocate;
  std::vector<std::string> input;

  std::vector<int> gaps;  // locate candidates, or the single infill gap
  int truth_gap = -1;     // locate
  std::vector<std::string> truth_tokens;  // infill
  std::vector<edit::Span> spans;          // delete candidates
  edit::Span truth_span;                  // delete
  int source_doc = -1;
  int alien_doc = -1;  // delete
  int src_style = -1;  // transfer
  int tgt_style = -1;

  /// Throws DataError when the fields do not describe a valid item.
  void check() const;
  std::string to_json() const;
  static TaskInstance from_json(const std::string& line);
};

struct TaskOptions {
  std::string delimiter = ".";
  int locate_candidates = 5;
};

/// Documents are whitespace-tokenized lines. Items get ids 0..n-1.
std::vector<TaskInstance> gen_tasks(std::span<const std::string> docs, TaskKind kind, int n, num::Rng& rng,
                                    const TaskOptions& opts = {});
/// Transfer items: distinct lines, target = next style.
std::vector<TaskInstance> gen_transfer_tasks(std::span<const enc::StyledLine> lines, int n, int num_styles,
                                             num::Rng& rng);

void write_tasks(const std::string& path, std::span<const TaskInstance> tasks);
std::vector<TaskInstance> read_tasks(const std::string& path);

}  // namespace xledit::evalkit
