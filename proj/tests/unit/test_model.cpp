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
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

#include "doctest.h"
#include "toy.hpp"
#include "xledit/encoding/compose.hpp"
#include "xledit/model/checkpoint.hpp"
#include "xledit/model/session.hpp"
#include "xledit/model/transformer.hpp"
#include "xledit/numerics/gradcheck.hpp"

using namespace xledit;
using namespace xledit::model;
using xledit::testing::random_params;
using xledit::testing::random_words;
using xledit::testing::toy_config;

namespace {

constexpr int kVocab = 12;  // 4 reserved + 2 styles + 6 words
constexpr int kFirstWord = 6;
const enc::Vocabulary& toy_vocab() {
  static const enc::Vocabulary v = [] {
    std::vector<std::string> lines{"a b c d e f"};
    return enc::Vocabulary::build(lines, 1, 2);
  }();
  return v;
}

template <typename T>
std::vector<T> row_of(const num::Var<T>& m, std::size_t r) {
  const std::size_t n = m.cols();
  return std::vector<T>(m.value().data() + r * n, m.value().data() + (r + 1) * n);
}

double total_variation(const std::vector<double>& lp1, const std::vector<double>& lp2) {
  double tv = 0;
  for (std::size_t k = 0; k < lp1.size(); ++k) tv += std::abs(std::exp(lp1[k]) - std::exp(lp2[k]));
  return tv / 2;
}

enc::ComposedRow compose_insertion(const std::vector<int>& left, const std::vector<int>& y,
                                   const std::vector<int>& right, int style, bool l2r = false) {
  std::vector<int> x = left;
  x.insert(x.end(), y.begin(), y.end());
  x.insert(x.end(), right.begin(), right.end());
  const int i = static_cast<int>(left.size()) + 1;
  const int j = i + static_cast<int>(y.size()) - 1;
  return enc::compose({x, i, j, style}, toy_vocab(), {.conditional = style >= 0, .l2r = l2r});
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("xledit_test_" + name);
}

}  // namespace

TEST_CASE("toy vocabulary layout") {
  CHECK(toy_vocab().size() == kVocab);
  CHECK(toy_vocab().first_word() == kFirstWord);
}

TEST_CASE("zero parameters give uniform distributions over emittable tokens") {
  Model<double> m(Params<double>::zeros(toy_config(kVocab)));
  const int emittable = kVocab - 4;  // no PAD, CLS, two styles
  auto row = compose_insertion({6, 7}, {8, 9, 10}, {11}, 1);
  auto lp = m.slot_log_probs(row);
  CHECK(lp.rows() == 4);
  for (std::size_t s = 0; s < lp.rows(); ++s)
    for (int v = 0; v < kVocab; ++v) {
      const double x = lp.value().at(s, v);
      if (m.emittable()[v]) CHECK(x == doctest::Approx(-std::log(emittable)));
      else CHECK(x == -std::numeric_limits<double>::infinity());
    }
  enc::ComposedBatch batch{{row}};
  CHECK(m.insertion_loss(batch).item() == doctest::Approx(4 * std::log(emittable)));

  Model<double> l2r(Params<double>::zeros(toy_config(kVocab, 2, 16, true)));
  enc::ComposedBatch lb{{compose_insertion({6, 7}, {8, 9, 10}, {11}, 1, true)}};
  CHECK(l2r.insertion_loss(lb).item() == doctest::Approx(3 * std::log(emittable - 1)));
  CHECK_FALSE(l2r.emittable()[enc::kEoi]);

  auto p = m.classify_style(std::vector<int>{6, 7, 8});
  CHECK(p.size() == 2);
  CHECK(p[0] == doctest::Approx(0.5));
  CHECK(p[1] == doctest::Approx(0.5));
}

TEST_CASE("slot distributions do not depend on how many slots remain (64-bit exact)") {
  num::Rng rng(101);
  for (int trial = 0; trial < 10; ++trial) {
    Model<double> m(random_params<double>(toy_config(kVocab), 1000 + trial));
    auto left = random_words(rng, static_cast<int>(rng.below(4)), kVocab, kFirstWord);
    auto right = random_words(rng, static_cast<int>(rng.below(4)), kVocab, kFirstWord);
    auto y = random_words(rng, 4, kVocab, kFirstWord);
    const int style = trial % 3 == 0 ? -1 : trial % 2;
    std::vector<num::Var<double>> by_len;
    for (int k = 0; k <= 4; ++k)
      by_len.push_back(m.slot_log_probs(compose_insertion(left, {y.begin(), y.begin() + k}, right, style)));
    for (int k1 = 0; k1 <= 4; ++k1)
      for (int k2 = k1 + 1; k2 <= 4; ++k2)
        for (int t = 0; t <= k1; ++t) CHECK(row_of(by_len[k1], t) == row_of(by_len[k2], t));
  }
}

TEST_CASE("slot distributions do not depend on remaining slots (32-bit)") {
  num::Rng rng(5);
  Model<float> m(random_params<float>(toy_config(kVocab), 77));
  auto left = random_words(rng, 3, kVocab, kFirstWord);
  auto right = random_words(rng, 2, kVocab, kFirstWord);
  auto y = random_words(rng, 4, kVocab, kFirstWord);
  auto short_span = m.slot_log_probs(compose_insertion(left, {y[0]}, right, 0));
  auto long_span = m.slot_log_probs(compose_insertion(left, y, right, 0));
  for (int t = 0; t <= 1; ++t) {
    auto a = row_of(short_span, t), b = row_of(long_span, t);
    for (std::size_t v = 0; v < a.size(); ++v) {
      if (std::isinf(a[v])) {
        CHECK(std::isinf(b[v]));
        continue;
      }
      CHECK(std::abs(a[v] - b[v]) <= 1e-5f * std::max(1.0f, std::abs(a[v])));
    }
  }
}

TEST_CASE("left-to-right mode sees the span length") {
  num::Rng rng(9);
  int differing = 0;
  for (int trial = 0; trial < 5; ++trial) {
    Model<double> m(random_params<double>(toy_config(kVocab, 2, 16, true), 500 + trial));
    auto left = random_words(rng, 3, kVocab, kFirstWord);
    auto right = random_words(rng, 3, kVocab, kFirstWord);
    auto y = random_words(rng, 4, kVocab, kFirstWord);
    auto one = m.slot_log_probs(compose_insertion(left, {y[0]}, right, 1, true));
    auto four = m.slot_log_probs(compose_insertion(left, y, right, 1, true));
    if (total_variation(row_of(one, 0), row_of(four, 0)) > 1e-3) ++differing;
  }
  CHECK(differing == 5);
}

TEST_CASE("context states ignore the span; span predictions see the right context") {
  Model<double> m(random_params<double>(toy_config(kVocab), 3));
  const std::vector<int> left{6, 7}, right{8, 9};
  auto r1 = compose_insertion(left, {10, 11}, right, 0);
  auto r2 = compose_insertion(left, {7, 7}, right, 0);
  auto c1 = m.content_states(r1), c2 = m.content_states(r2);
  for (int p : {0, 1, 5, 6, 7})  // left, right, style
    CHECK(row_of(c1, p) == row_of(c2, p));

  auto r3 = compose_insertion(left, {10, 11}, {9, 9}, 0);
  auto lp1 = m.slot_log_probs(r1), lp3 = m.slot_log_probs(r3);
  CHECK(total_variation(row_of(lp1, 0), row_of(lp3, 0)) > 1e-6);
}

TEST_CASE("incremental decoding equals the full pass (64-bit exact)") {
  num::Rng rng(2024);
  for (int trial = 0; trial < 25; ++trial) {
    Model<double> m(random_params<double>(toy_config(kVocab), 300 + trial));
    auto left = random_words(rng, static_cast<int>(rng.below(5)), kVocab, kFirstWord);
    auto right = random_words(rng, static_cast<int>(rng.below(5)), kVocab, kFirstWord);
    const int style = static_cast<int>(rng.below(3)) - 1;
    DecodeOptions opts;
    opts.cap = 5;
    auto res = decode(m, left, right, style, opts);
    auto full = m.slot_log_probs(compose_insertion(left, res.tokens, right, style));
    REQUIRE(full.rows() == res.tokens.size() + 1);
    for (std::size_t t = 0; t < full.rows(); ++t) {
      auto r = row_of(full, t);
      const int chosen = t < res.tokens.size() ? res.tokens[t] : enc::kEoi;
      if (t < res.tokens.size() || !res.hit_cap)
        CHECK(argmax_allowed(std::vector<double>(r.begin(), r.end()), m.emittable()) == chosen);
      CHECK(r[chosen] == res.logprobs[t]);
    }
  }
}

TEST_CASE("session distributions equal full-pass columns for any prefix") {
  num::Rng rng(31);
  Model<float> m(random_params<float>(toy_config(kVocab), 8));
  for (int trial = 0; trial < 10; ++trial) {
    auto left = random_words(rng, static_cast<int>(rng.below(4)), kVocab, kFirstWord);
    auto right = random_words(rng, static_cast<int>(rng.below(4)), kVocab, kFirstWord);
    auto y = random_words(rng, 3, kVocab, kFirstWord);
    auto full = m.slot_log_probs(compose_insertion(left, y, right, 1));
    InsertionSession<float> s(m, left, right, 1, 10);
    for (int t = 0; t <= 3; ++t) {
      auto inc = s.next_log_probs();
      auto ref = row_of(full, t);
      for (int v = 0; v < kVocab; ++v) {
        if (std::isinf(ref[v])) CHECK(std::isinf(inc[v]));
        else CHECK(std::abs(inc[v] - ref[v]) <= 1e-5f);
      }
      if (t < 3) s.push(y[t]);
    }
  }
}

TEST_CASE("fixed-length decoding equals the left-to-right full pass") {
  num::Rng rng(17);
  Model<double> m(random_params<double>(toy_config(kVocab, 2, 16, true), 44));
  for (int trial = 0; trial < 10; ++trial) {
    auto left = random_words(rng, 2, kVocab, kFirstWord);
    auto right = random_words(rng, 2, kVocab, kFirstWord);
    const int len = 1 + static_cast<int>(rng.below(4));
    auto res = decode_fixed(m, left, right, 0, len);
    REQUIRE(static_cast<int>(res.tokens.size()) == len);
    auto full = m.slot_log_probs(compose_insertion(left, res.tokens, right, 0, true));
    for (int t = 0; t < len; ++t) CHECK(row_of(full, t)[res.tokens[t]] == res.logprobs[t]);
  }
}

TEST_CASE("decoding caps and first-token control") {
  Model<double> zero(Params<double>::zeros(toy_config(kVocab)));
  DecodeOptions opts;
  opts.cap = 3;
  auto res = decode(zero, std::vector<int>{6}, std::vector<int>{7}, -1, opts);
  // uniform: lowest emittable id (UNK) wins every tie
  CHECK(res.tokens == std::vector<int>{enc::kUnk, enc::kUnk, enc::kUnk});
  CHECK(res.hit_cap);
  CHECK(res.logprobs.size() == 4);

  opts.cap = 0;
  auto empty = decode(zero, std::vector<int>{6}, std::vector<int>{7}, -1, opts);
  CHECK(empty.tokens.empty());
  CHECK(empty.logprobs.size() == 1);
  CHECK(empty.logprobs[0] == doctest::Approx(-std::log(8.0)));

  std::vector<double> scores(kVocab, 0.0);
  scores[9] = 1.0;
  opts.cap = 2;
  opts.first_scores = &scores;
  auto biased = decode(zero, std::vector<int>{6}, std::vector<int>{7}, -1, opts);
  CHECK(biased.tokens.front() == 9);

  InsertionSession<double> s(zero, std::vector<int>{6}, std::vector<int>{}, -1, 2);
  CHECK_THROWS_AS(s.push(enc::kCls), ContractError);
  CHECK_THROWS_AS(s.push(enc::kEoi), ContractError);
  s.push(6);
  CHECK_THROWS_AS(s.push(6), CapReached);
  CHECK_NOTHROW(s.next_log_probs());
}

TEST_CASE("empty contexts still decode") {
  Model<double> m(random_params<double>(toy_config(kVocab), 12));
  DecodeOptions opts;
  opts.cap = 3;
  auto res = decode(m, std::vector<int>{}, std::vector<int>{}, -1, opts);
  auto full = m.slot_log_probs(compose_insertion({}, res.tokens, {}, -1));
  for (std::size_t t = 0; t < res.tokens.size(); ++t) CHECK(row_of(full, t)[res.tokens[t]] == res.logprobs[t]);
}

TEST_CASE("attention output is invariant to key order") {
  auto cfg = toy_config(kVocab);
  Model<double> m(random_params<double>(cfg, 21));
  num::Rng rng(4);
  auto rnd = [&](std::size_t r, std::size_t c) {
    num::Tensor<double> t(num::Shape{r, c});
    for (std::size_t k = 0; k < t.size(); ++k) t[k] = rng.normal();
    return num::Var<double>::constant(std::move(t));
  };
  auto x = rnd(2, 16), k = rnd(5, 16), v = rnd(5, 16);
  std::vector<int> off{3, -2, 0, 1, 5, -1, 2, 4, -3, 0};
  auto keys = m.position_keys(-10, 10);
  auto out = m.attend(m.params().layers[0], x, k, v, keys, 0, off, nullptr, {});
  const std::vector<std::size_t> perm{3, 0, 4, 1, 2};
  std::vector<num::Var<double>> kp, vp;
  std::vector<int> offp(off.size());
  for (std::size_t j = 0; j < perm.size(); ++j) {
    kp.push_back(num::ops::slice_rows(k, perm[j], perm[j] + 1));
    vp.push_back(num::ops::slice_rows(v, perm[j], perm[j] + 1));
    for (std::size_t i = 0; i < 2; ++i) offp[i * 5 + j] = off[i * 5 + perm[j]];
  }
  auto out2 = m.attend(m.params().layers[0], x, num::ops::concat_rows(kp), num::ops::concat_rows(vp), keys, 0, offp,
                       nullptr, {});
  for (std::size_t t = 0; t < out.value().size(); ++t) CHECK(out.value()[t] == doctest::Approx(out2.value()[t]).epsilon(1e-12));

  // a single legal key takes all the weight
  num::Mask one(2, 5, false);
  one.set(0, 2, true);
  one.set(1, 2, true);
  auto single = m.attend(m.params().layers[0], x, k, v, keys, 0, off, &one, {});
  auto only = m.attend(m.params().layers[0], x, num::ops::slice_rows(k, 2, 3), num::ops::slice_rows(v, 2, 3), keys, 0,
                       std::vector<int>{off[2], off[7]}, nullptr, {});
  CHECK(single.value() == only.value());
}

TEST_CASE("training loss passes a finite-difference check") {
  auto cfg = toy_config(kVocab, 2, 8);
  auto params = random_params<double>(cfg, 99, 0.3);
  params.set_requires_grad(true);
  Model<double> m(params);
  enc::ComposedBatch batch;
  batch.rows.push_back(compose_insertion({6, 7}, {8, 9}, {10}, 1));
  batch.rows.push_back(compose_insertion({}, {11}, {6, 8}, 0));
  batch.rows.push_back(compose_insertion({7}, {}, {9, 9}, 1));
  std::vector<std::vector<int>> xs{{6, 7, 8}, {9, 10}};
  std::vector<int> styles{0, 1};
  auto loss = [&] { return num::ops::add(m.insertion_loss(batch), m.style_loss(xs, styles)); };
  std::vector<num::Var<double>> vars;
  std::vector<std::string> names;
  for (auto& [n, v] : m.params().named()) vars.push_back(v), names.push_back(n);
  num::GradCheckOptions opts;
  opts.coords_per_param = 6;
  opts.seed = 3;
  auto res = num::gradcheck(loss, vars, names, opts);
  INFO(res.worst);
  CHECK(res.max_rel_error < 1e-4);
  CHECK(res.coords_checked > 100);
}

TEST_CASE("style head rejects bad labels and normalizes") {
  Model<double> m(random_params<double>(toy_config(kVocab), 5));
  auto p = m.classify_style(std::vector<int>{6, 9, 10});
  CHECK(p[0] + p[1] == doctest::Approx(1.0).epsilon(1e-12));
  std::vector<std::vector<int>> xs{{6}};
  std::vector<int> bad{2};
  CHECK_THROWS_AS(m.style_loss(xs, bad), ContractError);
  Model<double> zero(Params<double>::zeros(toy_config(kVocab)));
  std::vector<int> ok{1};
  CHECK(zero.style_loss(xs, ok).item() == doctest::Approx(std::log(2.0)));
}

TEST_CASE("model config text round trip") {
  auto c = toy_config(kVocab);
  c.dropout = 0.125;
  c.l2r = true;
  CHECK(ModelConfig::from_text(c.to_text()) == c);
  CHECK_THROWS_AS(ModelConfig::from_text("n_layers=2\nbogus=1\n"), DataError);
  CHECK_THROWS_AS(ModelConfig::from_text("n_heads=3\nd_model=16\nvocab_size=12\n"), DataError);
}

TEST_CASE("checkpoint round trip and error kinds") {
  auto cfg = toy_config(kVocab);
  num::Rng rng(1);
  auto params = Params<float>::init(cfg, rng);
  const auto path = temp_path("ckpt.bin").string();
  save_checkpoint(params, path);
  auto back = load_checkpoint(path);
  CHECK(back.config == cfg);
  auto a = params.named(), b = back.named();
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].first == b[k].first);
    CHECK(a[k].second.value() == b[k].second.value());
  }

  auto kind_of = [](auto&& fn) {
    try {
      fn();
    } catch (const CheckpointError& e) {
      return e.kind();
    }
    return CheckpointError::Kind::kIo;
  };

  auto other = cfg;
  other.d_ff = 48;
  try {
    load_checkpoint(path, other);
    FAIL("expected a shape mismatch");
  } catch (const CheckpointError& e) {
    CHECK(e.kind() == CheckpointError::Kind::kShapeMismatch);
    CHECK(std::string(e.what()).find("layer0.ffn.w1") != std::string::npos);
  }

  std::string bytes;
  {
    std::ifstream in(path, std::ios::binary);
    bytes.assign(std::istreambuf_iterator<char>(in), {});
  }
  auto write = [](const std::string& p, const std::string& data) {
    std::ofstream out(p, std::ios::binary);
    out << data;
  };
  const auto bad = temp_path("bad.bin").string();
  auto corrupt = bytes;
  corrupt[0] = 'Y';
  write(bad, corrupt);
  CHECK(kind_of([&] { load_checkpoint(bad); }) == CheckpointError::Kind::kBadMagic);
  corrupt = bytes;
  corrupt[4] = 9;
  write(bad, corrupt);
  CHECK(kind_of([&] { load_checkpoint(bad); }) == CheckpointError::Kind::kBadVersion);
  write(bad, bytes.substr(0, bytes.size() - 3));
  CHECK(kind_of([&] { load_checkpoint(bad); }) == CheckpointError::Kind::kTruncated);
  CHECK_THROWS_AS(load_checkpoint(temp_path("missing.bin").string()), DataError);
  std::filesystem::remove(path);
  std::filesystem::remove(bad);
}

TEST_CASE("initialization is deterministic and within two standard deviations") {
  auto cfg = toy_config(kVocab);
  num::Rng r1(5), r2(5);
  auto p1 = Params<float>::init(cfg, r1), p2 = Params<float>::init(cfg, r2);
  auto n1 = p1.named(), n2 = p2.named();
  for (std::size_t k = 0; k < n1.size(); ++k) CHECK(n1[k].second.value() == n2[k].second.value());
  for (auto v : p1.embed.value().values()) CHECK(std::abs(v) <= 0.04f + 1e-7f);
  for (auto v : p1.layers[0].ln1_gamma.value().values()) CHECK(v == 1.0f);
  for (auto v : p1.pos_u.value().values()) CHECK(v == 0.0f);
}
