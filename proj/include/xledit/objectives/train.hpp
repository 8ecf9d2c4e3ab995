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

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "xledit/encoding/compose.hpp"
#include "xledit/encoding/corpus.hpp"
#include "xledit/model/transformer.hpp"
#include "xledit/numerics/adam.hpp"

namespace xledit::obj {

struct TrainConfig {
  int batch_size = 16;
  int steps = 1000;
  double lr = 3e-4;
  int warmup = 200;  // linear ramp, then constant
  std::uint64_t seed = 1;
  double lambda_ins = 1.0;
  double lambda_cls = 1.0;
  bool strict_intervals = false;
  bool conditional = false;  // feed the document style to the insertion model
  double clip = 1.0;         // global gradient norm; 0 disables
  // Training windows of consecutive sentences cut at `delimiter`. A negative
  // delimiter trains on whole documents.
  int delimiter = -1;
  int window_min = 3;
  int window_max = 5;
  int report_every = 10;
  int checkpoint_every = 0;
  bool timing = false;  // fill LossReport::tps (makes metrics non-reproducible)

  void validate() const;
  double lr_at(int step) const;
};

struct LossReport {
  int step = 0;
  std::optional<double> ins_nll;  // per predicted slot
  std::optional<double> cls_ce;
  std::optional<double> tps;

  std::string to_json() const;
};

/// λ_ins * insertion + λ_cls * style. A part is skipped (left invalid) when
/// its weight is zero or it has no data.
template <typename T>
struct Objective {
  num::Var<T> total;
  num::Var<T> ins;
  num::Var<T> cls;
  int slots = 0;
};

template <typename T>
Objective<T> combined_loss(const model::Model<T>& model, const enc::ComposedBatch& batch,
                           std::span<const std::vector<int>> xs, std::span<const int> styles, double lambda_ins,
                           double lambda_cls, const model::ForwardOptions& opts = {});

/// Draws training rows from a corpus. The draw sequence depends only on the
/// seed and the corpus.
class BatchSampler {
 public:
  BatchSampler(std::span<const enc::Document> docs, const enc::Vocabulary& vocab, const TrainConfig& cfg,
               bool l2r, num::Rng rng);

  struct Batch {
    enc::ComposedBatch rows;
    std::vector<std::vector<int>> xs;
    std::vector<int> styles;  // empty unless every document is labelled
  };
  Batch next();

 private:
  std::vector<int> window(const std::vector<std::vector<int>>& sentences);

  const enc::Vocabulary& vocab_;
  TrainConfig cfg_;
  bool l2r_;
  num::Rng rng_;
  std::vector<std::vector<std::vector<int>>> docs_;  // sentences per usable document
  std::vector<int> styles_;
  bool labelled_ = true;
  std::vector<std::size_t> order_;
  std::size_t cursor_ = 0;
};

struct TrainHooks {
  std::function<void(const LossReport&)> on_report;
  std::function<void(int step, const model::Params<float>&)> on_checkpoint;
};

class Trainer {
 public:
  Trainer(model::Model<float>& model, std::span<const enc::Document> docs, const enc::Vocabulary& vocab,
          const TrainConfig& cfg);

  /// One optimisation step; returns the losses of the batch it consumed.
  LossReport step();
  int steps_done() const { return done_; }

 private:
  model::Model<float>& model_;
  TrainConfig cfg_;
  BatchSampler sampler_;
  num::Rng dropout_rng_;
  num::AdamState<float> adam_;
  std::vector<num::Var<float>> params_;
  int done_ = 0;
};

/// Fresh parameters from the seed, then cfg.steps updates.
model::Params<float> train(std::span<const enc::Document> docs, const enc::Vocabulary& vocab,
                           const TrainConfig& cfg, const model::ModelConfig& mcfg, const TrainHooks& hooks = {});

/// train() writing JSON-lines metrics (skipped for an empty path) and a
/// checkpoint (also every checkpoint_every steps). `on_report` sees each
/// report after it is written.
model::Params<float> train_to_files(std::span<const enc::Document> docs, const enc::Vocabulary& vocab,
                                    const TrainConfig& cfg, const model::ModelConfig& mcfg,
                                    const std::string& checkpoint_path, const std::string& metrics_path,
                                    const std::function<void(const LossReport&)>& on_report = {});

}  // namespace xledit::obj
