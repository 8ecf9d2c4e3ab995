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

#include "xledit/objectives/train.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>

#include "xledit/error.hpp"
#include "xledit/model/checkpoint.hpp"

namespace xledit::obj {

namespace ops = num::ops;

void TrainConfig::validate() const {
  auto bad = [](const std::string& what) { throw DataError("train config: " + what); };
  if (batch_size < 1) bad("batch_size must be positive");
  if (steps < 0) bad("steps must be non-negative");
  if (!(lr > 0)) bad("lr must be positive");
  if (warmup < 0) bad("warmup must be non-negative");
  if (!(lambda_ins >= 0) || !(lambda_cls >= 0)) bad("loss weights must be non-negative");
  if (lambda_ins == 0 && lambda_cls == 0) bad("at least one loss weight must be positive");
  if (!(clip >= 0)) bad("clip must be non-negative");
  if (window_min < 1 || window_max < window_min) bad("window sizes must satisfy 1 <= window_min <= window_max");
  if (report_every < 1) bad("report_every must be positive");
  if (checkpoint_every < 0) bad("checkpoint_every must be non-negative");
}

double TrainConfig::lr_at(int step) const {
  if (warmup == 0) return lr;
  return lr * std::min(1.0, static_cast<double>(step + 1) / warmup);
}

std::string LossReport::to_json() const {
  nlohmann::ordered_json j;
  j["step"] = step;
  j["ins_nll"] = ins_nll ? nlohmann::ordered_json(*ins_nll) : nlohmann::ordered_json(nullptr);
  j["cls_ce"] = cls_ce ? nlohmann::ordered_json(*cls_ce) : nlohmann::ordered_json(nullptr);
  j["tps"] = tps ? nlohmann::ordered_json(*tps) : nlohmann::ordered_json(nullptr);
  return j.dump();
}

template <typename T>
Objective<T> combined_loss(const model::Model<T>& model, const enc::ComposedBatch& batch,
                           std::span<const std::vector<int>> xs, std::span<const int> styles, double lambda_ins,
                           double lambda_cls, const model::ForwardOptions& opts) {
  Objective<T> out;
  if (lambda_ins > 0 && !batch.rows.empty()) {
    out.ins = model.insertion_loss(batch, opts);
    for (auto& r : batch.rows) out.slots += r.num_slots();
    out.total = lambda_ins == 1 ? out.ins : ops::scale(out.ins, static_cast<T>(lambda_ins));
  }
  if (lambda_cls > 0 && !styles.empty()) {
    out.cls = model.style_loss(xs, styles, opts);
    auto w = lambda_cls == 1 ? out.cls : ops::scale(out.cls, static_cast<T>(lambda_cls));
    out.total = out.total.valid() ? ops::add(out.total, w) : w;
  }
  XLEDIT_REQUIRE(out.total.valid(), "objective has no active term");
  return out;
}

template Objective<float> combined_loss(const model::Model<float>&, const enc::ComposedBatch&,
                                        std::span<const std::vector<int>>, std::span<const int>, double, double,
                                        const model::ForwardOptions&);
template Objective<double> combined_loss(const model::Model<double>&, const enc::ComposedBatch&,
                                         std::span<const std::vector<int>>, std::span<const int>, double, double,
                                         const model::ForwardOptions&);

BatchSampler::BatchSampler(std::span<const enc::Document> docs, const enc::Vocabulary& vocab,
                           const TrainConfig& cfg, bool l2r, num::Rng rng)
    : vocab_(vocab), cfg_(cfg), l2r_(l2r), rng_(rng) {
  const std::size_t min_len = cfg.strict_intervals ? 2 : 1;
  for (auto& d : docs) {
    if (d.tokens.size() < min_len) continue;
    if (cfg.delimiter >= 0)
      docs_.push_back(enc::split_sentences(d.tokens, cfg.delimiter));
    else
      docs_.push_back({d.tokens});
    styles_.push_back(d.style);
    labelled_ = labelled_ && d.style >= 0;
  }
  if (docs_.empty()) throw DataError("training corpus has no usable document");
  order_.resize(docs_.size());
  for (std::size_t k = 0; k < order_.size(); ++k) order_[k] = k;
  rng_.shuffle(order_);
}

std::vector<int> BatchSampler::window(const std::vector<std::vector<int>>& sentences) {
  const int n = static_cast<int>(sentences.size());
  const int w = std::min(n, rng_.uniform_int(cfg_.window_min, cfg_.window_max));
  const int start = rng_.uniform_int(0, n - w);
  std::vector<int> x;
  for (int s = start; s < start + w; ++s) x.insert(x.end(), sentences[s].begin(), sentences[s].end());
  return x;
}

BatchSampler::Batch BatchSampler::next() {
  Batch b;
  const std::size_t min_len = cfg_.strict_intervals ? 2 : 1;
  while (b.xs.size() < static_cast<std::size_t>(cfg_.batch_size)) {
    if (cursor_ == order_.size()) {
      cursor_ = 0;
      rng_.shuffle(order_);
    }
    const std::size_t d = order_[cursor_++];
    auto x = window(docs_[d]);
    // A short window can fall under the interval minimum; widen to the
    // whole document then.
    if (x.size() < min_len) {
      x.clear();
      for (auto& s : docs_[d]) x.insert(x.end(), s.begin(), s.end());
    }
    auto [i, j] = enc::sample_interval(static_cast<int>(x.size()), rng_, cfg_.strict_intervals);
    enc::ComposeOptions co;
    co.l2r = l2r_;
    co.conditional = cfg_.conditional && styles_[d] >= 0;
    b.rows.rows.push_back(enc::compose({x, i, j, styles_[d]}, vocab_, co));
    if (labelled_) b.styles.push_back(styles_[d]);
    b.xs.push_back(std::move(x));
  }
  return b;
}

Trainer::Trainer(model::Model<float>& model, std::span<const enc::Document> docs, const enc::Vocabulary& vocab,
                 const TrainConfig& cfg)
    : model_(model),
      cfg_(cfg),
      sampler_(docs, vocab, cfg, model.config().l2r, num::Rng(cfg.seed).split("data")),
      dropout_rng_(num::Rng(cfg.seed).split("dropout")) {
  cfg_.validate();
  if (vocab.size() != model.config().vocab_size)
    throw DataError("vocabulary has " + std::to_string(vocab.size()) + " entries but the model expects " +
                    std::to_string(model.config().vocab_size));
  if (cfg.conditional && vocab.num_styles() != model.config().n_styles)
    throw DataError("vocabulary and model disagree on the number of styles");
  model_.params().set_requires_grad(true);
  model_.params_changed();
  params_ = model_.params().all();
  adam_.lr = cfg.lr;
}

LossReport Trainer::step() {
  const auto t0 = std::chrono::steady_clock::now();
  auto batch = sampler_.next();
  model::ForwardOptions fo{true, &dropout_rng_};
  auto obj = combined_loss(model_, batch.rows, batch.xs, batch.styles, cfg_.lambda_ins, cfg_.lambda_cls, fo);
  const double total = obj.total.value()[0];
  if (!std::isfinite(total)) throw DataError("training loss became non-finite at step " + std::to_string(done_));
  auto grads = num::backward(obj.total);
  if (cfg_.clip > 0) num::clip_grad_norm<float>(params_, grads, cfg_.clip);
  adam_.lr = cfg_.lr_at(done_);
  num::adam_step<float>(params_, grads, adam_);
  model_.params_changed();

  LossReport r;
  r.step = done_;
  if (obj.ins.valid()) r.ins_nll = obj.ins.value()[0] * static_cast<double>(batch.rows.rows.size()) / obj.slots;
  if (obj.cls.valid()) r.cls_ce = obj.cls.value()[0];
  if (cfg_.timing) {
    double tokens = 0;
    for (auto& row : batch.rows.rows) tokens += row.length();
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    r.tps = secs > 0 ? tokens / secs : 0.0;
  }
  ++done_;
  return r;
}

model::Params<float> train(std::span<const enc::Document> docs, const enc::Vocabulary& vocab,
                           const TrainConfig& cfg, const model::ModelConfig& mcfg, const TrainHooks& hooks) {
  cfg.validate();
  mcfg.validate();
  num::Rng init_rng = num::Rng(cfg.seed).split("init");
  model::Model<float> model(model::Params<float>::init(mcfg, init_rng));
  Trainer trainer(model, docs, vocab, cfg);
  for (int s = 0; s < cfg.steps; ++s) {
    auto r = trainer.step();
    const bool last = s + 1 == cfg.steps;
    if (hooks.on_report && (s % cfg.report_every == 0 || last)) hooks.on_report(r);
    if (hooks.on_checkpoint && cfg.checkpoint_every > 0 && (s + 1) % cfg.checkpoint_every == 0 && !last)
      hooks.on_checkpoint(s + 1, model.params());
  }
  auto out = model.params().clone();
  out.set_requires_grad(false);
  return out;
}

model::Params<float> train_to_files(std::span<const enc::Document> docs, const enc::Vocabulary& vocab,
                                    const TrainConfig& cfg, const model::ModelConfig& mcfg,
                                    const std::string& checkpoint_path, const std::string& metrics_path,
                                    const std::function<void(const LossReport&)>& on_report) {
  std::ofstream metrics;
  if (!metrics_path.empty()) {
    metrics.open(metrics_path);
    if (!metrics) throw DataError("cannot write metrics file: " + metrics_path);
  }
  TrainHooks hooks;
  hooks.on_report = [&](const LossReport& r) {
    if (!metrics_path.empty()) {
      metrics << r.to_json() << '\n';
      metrics.flush();
      if (!metrics) throw DataError("failed writing metrics file: " + metrics_path);
    }
    if (on_report) on_report(r);
  };
  hooks.on_checkpoint = [&](int, const model::Params<float>& p) { model::save_checkpoint(p, checkpoint_path); };
  auto params = train(docs, vocab, cfg, mcfg, hooks);
  model::save_checkpoint(params, checkpoint_path);
  return params;
}

}  // namespace xledit::obj
