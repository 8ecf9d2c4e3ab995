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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "toy.hpp"
#include "xledit/model/checkpoint.hpp"
#include "xledit/objectives/train.hpp"

using namespace xledit;
using xledit::testing::random_params;
using xledit::testing::toy_config;

namespace {

std::vector<std::string> repetitive_lines() {
  const char* base[] = {"the cat sat on the mat .", "a dog ran in the park .", "the bird sang at dawn ."};
  std::vector<std::string> out;
  for (int k = 0; k < 50; ++k) out.push_back(base[k % 3]);
  return out;
}

// Style 0 sentences use "good", style 1 sentences use "bad".
std::vector<enc::StyledLine> styled_lines() {
  const char* subjects[] = {"the food", "the staff", "the room", "the view", "the price"};
  std::vector<enc::StyledLine> out;
  for (int k = 0; k < 40; ++k) {
    const int s = k % 2;
    out.push_back({s, std::string(subjects[(k / 2) % 5]) + " was " + (s == 0 ? "good" : "bad")});
  }
  return out;
}

model::ModelConfig small_config(int vocab) {
  auto c = toy_config(vocab, 2, 32);
  c.dropout = 0.0;
  return c;
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("xledit_obj_" + name);
}

}  // namespace

TEST_CASE("config validation and warmup schedule") {
  obj::TrainConfig c;
  CHECK_NOTHROW(c.validate());
  c.warmup = 4;
  c.lr = 1.0;
  CHECK(c.lr_at(0) == doctest::Approx(0.25));
  CHECK(c.lr_at(3) == doctest::Approx(1.0));
  CHECK(c.lr_at(100) == doctest::Approx(1.0));
  c.warmup = 0;
  CHECK(c.lr_at(0) == 1.0);

  obj::TrainConfig bad;
  bad.batch_size = 0;
  CHECK_THROWS_AS(bad.validate(), DataError);
  bad = {};
  bad.lambda_cls = -1;
  CHECK_THROWS_AS(bad.validate(), DataError);
  bad = {};
  bad.lambda_ins = 0;
  bad.lambda_cls = 0;
  CHECK_THROWS_AS(bad.validate(), DataError);
  bad = {};
  bad.window_min = 4;
  bad.window_max = 3;
  CHECK_THROWS_AS(bad.validate(), DataError);
}

TEST_CASE("loss report serialises with nulls for absent fields") {
  obj::LossReport r;
  r.step = 3;
  r.ins_nll = 1.5;
  CHECK(r.to_json() == R"({"step":3,"ins_nll":1.5,"cls_ce":null,"tps":null})");
}

TEST_CASE("combined gradient is the weighted sum of the parts") {
  const auto lines = repetitive_lines();
  auto vocab = enc::Vocabulary::build(lines, 1, 2);
  auto cfg = toy_config(vocab.size(), 2, 8);
  auto params = random_params<double>(cfg, 5, 0.3);
  params.set_requires_grad(true);
  model::Model<double> m(params);

  num::Rng rng(2);
  enc::ComposedBatch batch;
  std::vector<std::vector<int>> xs;
  std::vector<int> styles;
  for (int k = 0; k < 3; ++k) {
    auto x = vocab.encode(lines[k]);
    auto [i, j] = enc::sample_interval(static_cast<int>(x.size()), rng);
    batch.rows.push_back(enc::compose({x, i, j}, vocab));
    xs.push_back(x);
    styles.push_back(k % 2);
  }
  const double li = 0.7, lc = 1.9;
  auto both = obj::combined_loss(m, batch, xs, styles, li, lc);
  auto ins = obj::combined_loss(m, batch, xs, styles, 1.0, 0.0);
  auto cls = obj::combined_loss(m, batch, xs, styles, 0.0, 1.0);
  CHECK(!ins.cls.valid());
  CHECK(!cls.ins.valid());
  CHECK(both.total.value()[0] == doctest::Approx(li * ins.total.value()[0] + lc * cls.total.value()[0]).epsilon(1e-12));

  auto g_both = num::backward(both.total);
  auto g_ins = num::backward(ins.total);
  auto g_cls = num::backward(cls.total);
  double worst = 0;
  for (auto& [name, v] : m.params().named()) {
    const auto it = g_both.find(v.id());
    REQUIRE(it != g_both.end());
    const auto a = g_ins.find(v.id());
    const auto b = g_cls.find(v.id());
    for (std::size_t k = 0; k < it->second.size(); ++k) {
      double want = 0;
      if (a != g_ins.end()) want += li * a->second[k];
      if (b != g_cls.end()) want += lc * b->second[k];
      worst = std::max(worst, std::abs(it->second[k] - want) / std::max(1.0, std::abs(want)));
    }
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("the insertion-only objective leaves the classifier head untouched") {
  const auto lines = styled_lines();
  std::vector<std::string> text;
  for (auto& l : lines) text.push_back(l.text);
  auto vocab = enc::Vocabulary::build(text, 1, 2);
  auto docs = enc::encode_documents(lines, vocab);

  auto cfg = small_config(vocab.size());
  num::Rng rng(3);
  model::Model<float> m(model::Params<float>::init(cfg, rng));
  const auto before = m.params().clone();

  obj::TrainConfig tc;
  tc.batch_size = 4;
  tc.lambda_cls = 0.0;
  obj::Trainer trainer(m, docs, vocab, tc);
  for (int s = 0; s < 3; ++s) {
    auto r = trainer.step();
    CHECK(r.ins_nll.has_value());
    CHECK(!r.cls_ce.has_value());
  }
  auto after = m.params().named();
  auto orig = before.named();
  for (std::size_t k = 0; k < after.size(); ++k) {
    const bool head = after[k].first.rfind("cls.", 0) == 0;
    bool same = true;
    for (std::size_t e = 0; e < after[k].second.value().size(); ++e)
      same = same && after[k].second.value()[e] == orig[k].second.value()[e];
    INFO(after[k].first);
    if (head)
      CHECK(same);
    else if (after[k].first == "layer0.attn.q")
      CHECK(!same);
  }

  // And the gradients of the head are exactly zero, not merely small.
  auto params = m.params().clone();
  params.set_requires_grad(true);
  model::Model<float> m2(params);
  obj::BatchSampler sampler(docs, vocab, tc, false, num::Rng(9));
  auto b = sampler.next();
  auto obj = obj::combined_loss(m2, b.rows, b.xs, b.styles, 1.0, 0.0);
  auto g = num::backward(obj.total);
  for (auto& [name, v] : m2.params().named()) {
    if (name.rfind("cls.", 0) != 0) continue;
    auto it = g.find(v.id());
    if (it == g.end()) continue;
    for (std::size_t e = 0; e < it->second.size(); ++e) CHECK(it->second[e] == 0.0f);
  }
}

TEST_CASE("sampler windows are consecutive sentences and reproducible") {
  std::vector<std::string> lines{"a b . c d . e f . g h . i j . k l ."};
  auto vocab = enc::Vocabulary::build(lines, 1, 2);
  auto docs = enc::encode_documents(lines, vocab);
  obj::TrainConfig tc;
  tc.batch_size = 8;
  tc.delimiter = vocab.id(".");
  tc.window_min = 2;
  tc.window_max = 3;
  obj::BatchSampler s1(docs, vocab, tc, false, num::Rng(4));
  obj::BatchSampler s2(docs, vocab, tc, false, num::Rng(4));
  const auto whole = docs[0].tokens;
  for (int step = 0; step < 5; ++step) {
    auto a = s1.next();
    auto b = s2.next();
    REQUIRE(a.xs.size() == 8);
    for (std::size_t r = 0; r < a.xs.size(); ++r) {
      CHECK(a.xs[r] == b.xs[r]);
      CHECK(a.rows.rows[r].tokens == b.rows.rows[r].tokens);
      const auto& x = a.xs[r];
      CHECK((x.size() == 6 || x.size() == 9));
      auto it = std::search(whole.begin(), whole.end(), x.begin(), x.end());
      CHECK(it != whole.end());
      CHECK((it - whole.begin()) % 3 == 0);
    }
    CHECK(a.styles.empty());
  }
}

TEST_CASE("a corpus without usable documents is rejected") {
  enc::Vocabulary vocab(2);
  std::vector<enc::Document> docs{{{}, -1}};
  obj::TrainConfig tc;
  CHECK_THROWS_AS(obj::BatchSampler(docs, vocab, tc, false, num::Rng(1)), DataError);
}

TEST_CASE("training on a repetitive corpus halves the insertion loss") {
  const auto lines = repetitive_lines();
  auto vocab = enc::Vocabulary::build(lines, 1, 2);
  auto docs = enc::encode_documents(lines, vocab);
  obj::TrainConfig tc;
  tc.batch_size = 8;
  tc.steps = 200;
  tc.lr = 3e-3;
  tc.warmup = 20;
  tc.lambda_cls = 0;
  tc.report_every = 1;
  std::vector<obj::LossReport> reports;
  obj::TrainHooks hooks;
  hooks.on_report = [&](const obj::LossReport& r) { reports.push_back(r); };
  obj::train(docs, vocab, tc, small_config(vocab.size()), hooks);
  REQUIRE(reports.size() == 200);
  double first = 0, last = 0;
  for (int k = 0; k < 10; ++k) first += *reports[k].ins_nll / 10, last += *reports[190 + k].ins_nll / 10;
  for (auto& r : reports) CHECK(std::isfinite(*r.ins_nll));
  MESSAGE("initial " << first << " final " << last);
  CHECK(last < 0.5 * first);
}

TEST_CASE("style loss drops on a perfectly style-correlated corpus") {
  const auto lines = styled_lines();
  std::vector<std::string> text;
  for (auto& l : lines) text.push_back(l.text);
  auto vocab = enc::Vocabulary::build(text, 1, 2);
  auto docs = enc::encode_documents(lines, vocab);
  obj::TrainConfig tc;
  tc.batch_size = 8;
  tc.steps = 150;
  tc.lr = 3e-3;
  tc.warmup = 10;
  tc.lambda_ins = 0;
  auto params = obj::train(docs, vocab, tc, small_config(vocab.size()));
  model::Model<float> m(params);
  std::vector<std::vector<int>> xs;
  std::vector<int> ys;
  for (auto& d : docs) xs.push_back(d.tokens), ys.push_back(d.style);
  const double loss = m.style_loss(xs, ys).value()[0];
  MESSAGE("style loss " << loss);
  CHECK(loss < 0.05);
}

TEST_CASE("training is reproducible and writes metrics and a checkpoint") {
  const auto lines = repetitive_lines();
  auto vocab = enc::Vocabulary::build(lines, 1, 2);
  auto docs = enc::encode_documents(lines, vocab);
  obj::TrainConfig tc;
  tc.batch_size = 4;
  tc.steps = 12;
  tc.report_every = 5;
  tc.checkpoint_every = 5;
  auto mc = small_config(vocab.size());
  mc.dropout = 0.1;

  std::string text[2];
  for (int run = 0; run < 2; ++run) {
    const auto ck = temp_path("ck" + std::to_string(run));
    const auto mt = temp_path("metrics" + std::to_string(run));
    obj::train_to_files(docs, vocab, tc, mc, ck.string(), mt.string());
    std::ifstream in(mt);
    std::stringstream ss;
    ss << in.rdbuf();
    text[run] = ss.str();
    auto loaded = model::load_checkpoint(ck.string());
    CHECK(loaded.config == mc);
  }
  CHECK(text[0] == text[1]);
  int lines_out = 0;
  for (char c : text[0]) lines_out += c == '\n';
  CHECK(lines_out == 4);  // steps 0, 5, 10 and the last
  CHECK(text[0].rfind("{\"step\":0,", 0) == 0);

  const auto bad = (std::filesystem::temp_directory_path() / "no_such_dir" / "m.jsonl").string();
  CHECK_THROWS_AS(obj::train_to_files(docs, vocab, tc, mc, temp_path("ck").string(), bad), DataError);
}
