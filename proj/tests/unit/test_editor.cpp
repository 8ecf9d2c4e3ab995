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
#include <functional>

#include "doctest.h"
#include "toy.hpp"
#include "xledit/editor/editor.hpp"
#include "xledit/objectives/train.hpp"

using namespace xledit;
using xledit::testing::random_params;
using xledit::testing::random_words;
using xledit::testing::toy_config;

namespace {

const enc::Vocabulary& ab_vocab() {
  static const enc::Vocabulary v = [] {
    std::vector<std::string> lines{"A B"};
    return enc::Vocabulary::build(lines, 1, 2);
  }();
  return v;
}

// Emittable ids of a main-mode model: UNK, EOI and the words.
int emittable_count(const model::Model<double>& m) {
  int n = 0;
  for (auto e : m.emittable()) n += e;
  return n;
}

model::Model<double> zero_model(int vocab, bool l2r = false) {
  return model::Model<double>(model::Params<double>::zeros(toy_config(vocab, 2, 16, l2r)));
}

// log q(y | left, right) from one full forward pass per slot prefix: the
// composed row with the span y is run from scratch and the slot
// distributions are read off directly.
double naive_logprob(const model::Model<double>& m, const std::vector<int>& left, const std::vector<int>& y,
                     const std::vector<int>& right, const enc::Vocabulary& vocab) {
  std::vector<int> x = left;
  x.insert(x.end(), y.begin(), y.end());
  x.insert(x.end(), right.begin(), right.end());
  const int i = static_cast<int>(left.size()) + 1;
  const int j = i + static_cast<int>(y.size()) - 1;
  auto row = enc::compose({x, i, j}, vocab);
  auto lp = m.slot_log_probs(row);
  const int V = static_cast<int>(lp.cols());
  double total = 0;
  for (int s = 0; s < row.num_slots(); ++s) total += lp.value()[s * V + row.target(s)];
  return total;
}

void enumerate(int len, const std::vector<int>& alphabet, std::vector<int>& cur,
               const std::function<void(const std::vector<int>&)>& fn) {
  fn(cur);
  if (static_cast<int>(cur.size()) == len) return;
  for (int t : alphabet) {
    cur.push_back(t);
    enumerate(len, alphabet, cur, fn);
    cur.pop_back();
  }
}

}  // namespace

TEST_CASE("uniform model: estimates, odds and perplexity in closed form") {
  auto m = zero_model(ab_vocab().size());
  const int V = emittable_count(m);
  REQUIRE(V == 4);
  const std::vector<int> x{6, 7, 6};
  auto eps = edit::estimate_insertion(m, x, 2, 1, std::vector<int>{});
  REQUIRE(eps.per_token_logprobs.size() == 1);
  CHECK(eps.total_logprob == doctest::Approx(-std::log(V)).epsilon(1e-12));
  auto two = edit::estimate_insertion(m, x, 2, 1, std::vector<int>{6, 7});
  CHECK(two.total_logprob == doctest::Approx(-3 * std::log(V)).epsilon(1e-12));
  CHECK(edit::perplexity(two) == doctest::Approx(V));
  CHECK(edit::perplexity(eps) == doctest::Approx(1 / std::exp(eps.per_token_logprobs[0])));
  CHECK(edit::replace_odds(m, x, 1, 2, std::vector<int>{}) == doctest::Approx(V * V));
}

TEST_CASE("perplexity of a constant per-token probability") {
  edit::InsertionEstimate e;
  e.per_token_logprobs = {std::log(0.25), std::log(0.25), std::log(0.25)};
  e.total_logprob = 3 * std::log(0.25);
  CHECK(edit::perplexity(e) == doctest::Approx(4.0));
  CHECK_THROWS_AS(edit::perplexity(edit::InsertionEstimate{}), ContractError);
}

TEST_CASE("incremental estimates equal from-scratch forward passes") {
  auto& vocab = ab_vocab();
  num::Rng rng(31);
  for (int trial = 0; trial < 6; ++trial) {
    auto p = random_params<double>(toy_config(vocab.size(), 2, 16), 100 + trial);
    model::Model<double> m(p);
    const auto left = random_words(rng, trial % 3, vocab.size(), vocab.first_word());
    const auto right = random_words(rng, (trial + 1) % 4, vocab.size(), vocab.first_word());
    for (int len = 0; len <= 4; ++len) {
      const auto y = random_words(rng, len, vocab.size(), vocab.first_word());
      const auto est = edit::estimate_between(m, left, right, y);
      CHECK(est.per_token_logprobs.size() == static_cast<std::size_t>(len + 1));
      CHECK(est.total_logprob == doctest::Approx(naive_logprob(m, left, y, right, vocab)).epsilon(1e-10));
      double sum = 0;
      for (double v : est.per_token_logprobs) {
        sum += v;
        CHECK(v <= 0.0);
      }
      CHECK(sum == est.total_logprob);
    }
  }
}

TEST_CASE("insertion probabilities normalise over {UNK, A, B} plus continuation") {
  auto& vocab = ab_vocab();
  const std::vector<int> alphabet{enc::kUnk, vocab.id("A"), vocab.id("B")};
  num::Rng rng(5);
  for (int trial = 0; trial < 3; ++trial) {
    model::Model<double> m(random_params<double>(toy_config(vocab.size(), 2, 16), 40 + trial));
    const auto left = random_words(rng, 2, vocab.size(), vocab.first_word());
    const auto right = random_words(rng, trial, vocab.size(), vocab.first_word());
    for (int n = 1; n <= 3; ++n) {
      double mass = 0;
      std::vector<int> cur;
      enumerate(n, alphabet, cur, [&](const std::vector<int>& y) {
        const auto est = edit::estimate_between(m, left, right, y);
        mass += std::exp(est.total_logprob);
        if (static_cast<int>(y.size()) == n) {
          const double prefix = est.total_logprob - est.per_token_logprobs.back();
          mass += std::exp(prefix) * (1 - std::exp(est.per_token_logprobs.back()));
        }
      });
      CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("replacing a span by itself has odds exactly one") {
  num::Rng rng(8);
  model::Model<double> m(random_params<double>(toy_config(ab_vocab().size()), 3));
  model::Model<float> mf(random_params<float>(toy_config(ab_vocab().size()), 3));
  const auto x = random_words(rng, 6, ab_vocab().size(), ab_vocab().first_word());
  for (int i = 1; i <= 6; ++i)
    for (int j = i; j <= 6; ++j) {
      const std::span<const int> xs(x);
      CHECK(edit::replace_odds(m, xs, i, j, xs.subspan(i - 1, j - i + 1)) == 1.0);
      CHECK(edit::replace_odds(mf, xs, i, j, xs.subspan(i - 1, j - i + 1)) == 1.0);
    }
  CHECK_THROWS_AS(edit::replace_odds(m, std::span<const int>(x), 3, 2, std::vector<int>{6}), DataError);
}

TEST_CASE("bad tokens and spans are rejected") {
  auto m = zero_model(ab_vocab().size());
  const std::vector<int> x{6, 7};
  CHECK_THROWS_AS(edit::estimate_insertion(m, x, 1, 0, std::vector<int>{enc::kEoi}), DataError);
  CHECK_THROWS_AS(edit::estimate_insertion(m, x, 1, 0, std::vector<int>{enc::kCls}), DataError);
  CHECK_THROWS_AS(edit::estimate_insertion(m, x, 1, 0, std::vector<int>{99}), DataError);
  CHECK_THROWS_AS(edit::estimate_insertion(m, x, 2, 3, std::vector<int>{}), DataError);
  CHECK_THROWS_AS(edit::estimate_insertion(m, x, 3, 1, std::vector<int>{}), DataError);
  auto l2r = zero_model(ab_vocab().size(), true);
  CHECK_THROWS_AS(edit::estimate_insertion(l2r, x, 2, 1, std::vector<int>{}), DataError);
}

TEST_CASE("locate: ties, single candidates, restriction") {
  auto u = zero_model(ab_vocab().size());
  const std::vector<int> x{6, 7, 6, 7};
  CHECK(edit::locate(u, std::span<const int>(x)) == 0);
  const std::vector<int> some{3, 1, 4};
  CHECK(edit::locate(u, std::span<const int>(x), some) == 1);
  const std::vector<int> one{2};
  CHECK(edit::locate(u, std::span<const int>(x), one) == 2);
  CHECK_THROWS_AS(edit::locate(u, std::span<const int>(x), std::vector<int>{}), DataError);
  CHECK_THROWS_AS(edit::locate(u, std::span<const int>(x), std::vector<int>{5}), DataError);

  num::Rng rng(4);
  for (int trial = 0; trial < 5; ++trial) {
    model::Model<double> m(random_params<double>(toy_config(ab_vocab().size()), 70 + trial));
    const auto y = random_words(rng, 6, ab_vocab().size(), ab_vocab().first_word());
    const int best = edit::locate(m, std::span<const int>(y));
    std::vector<int> subset{best};
    for (int g = 0; g <= 6; ++g)
      if (rng.below(2) && g != best) subset.push_back(g);
    CHECK(edit::locate(m, std::span<const int>(y), subset) == best);
  }
}

TEST_CASE("left-to-right locate skips the sequence ends") {
  model::Model<double> m(random_params<double>(toy_config(ab_vocab().size(), 2, 16, true), 12));
  const std::vector<int> x{6, 7, 7, 6};
  const std::vector<int> ends{4, 0};
  CHECK(edit::locate(m, std::span<const int>(x), ends) == 0);
  auto s = edit::gap_scores(m, std::span<const int>(x), std::vector<int>{0, 2, 4});
  CHECK(!s[0].has_value());
  CHECK(s[1].has_value());
  CHECK(!s[2].has_value());
  const std::vector<int> mixed{0, 2, 4};
  CHECK(edit::locate(m, std::span<const int>(x), mixed) == 2);
}

TEST_CASE("delete ranking: ties, single candidates, errors") {
  auto u = zero_model(ab_vocab().size());
  const std::vector<int> x{6, 7, 6, 7, 6, 7};
  const std::vector<edit::Span> spans{{3, 4}, {1, 2}, {5, 6}};
  CHECK(edit::delete_rank(u, std::span<const int>(x), spans, edit::DeleteRule::kRatio) == 0);
  CHECK(edit::delete_rank(u, std::span<const int>(x), spans, edit::DeleteRule::kRank) == 0);
  const std::vector<edit::Span> one{{2, 2}};
  CHECK(edit::delete_rank(u, std::span<const int>(x), one, edit::DeleteRule::kRatio) == 0);
  CHECK_THROWS_AS(edit::delete_rank(u, std::span<const int>(x), std::vector<edit::Span>{}, edit::DeleteRule::kRatio),
                  DataError);

  // Rank rule: equals the whole-sequence estimate of what is left.
  model::Model<double> m(random_params<double>(toy_config(ab_vocab().size()), 9));
  auto scores = edit::delete_scores(m, std::span<const int>(x), spans, edit::DeleteRule::kRank);
  const std::vector<int> rest{6, 7, 6, 7};
  CHECK(scores[0] == doctest::Approx(-std::log(edit::perplexity(edit::sequence_estimate(m, std::span<const int>(rest))))));

  model::Model<double> l2r(random_params<double>(toy_config(ab_vocab().size(), 2, 16, true), 9));
  auto ls = edit::delete_scores(l2r, std::span<const int>(x), spans, edit::DeleteRule::kRatio);
  CHECK(ls.size() == 3);
  for (double v : ls) CHECK(std::isfinite(v));
}

TEST_CASE("infill on a uniform model follows the tie-break rule") {
  auto u = zero_model(ab_vocab().size());
  const std::vector<int> x{6, 7};
  auto r = edit::infill(u, std::span<const int>(x), 1, 3);
  CHECK(r.tokens == std::vector<int>{enc::kUnk, enc::kUnk, enc::kUnk});
  CHECK(r.hit_cap);
  CHECK(r.logprobs.size() == 4);
  auto z = edit::infill(u, std::span<const int>(x), 1, 0);
  CHECK(z.tokens.empty());
  REQUIRE(z.logprobs.size() == 1);
  CHECK(z.logprobs[0] == doctest::Approx(-std::log(4.0)));

  auto ul = zero_model(ab_vocab().size(), true);
  auto rl = edit::infill(ul, std::span<const int>(x), 1, 4);
  CHECK(rl.tokens == std::vector<int>{enc::kUnk});
  CHECK(!rl.hit_cap);
}

TEST_CASE("edit ops: kinds, application, validation") {
  const std::vector<int> x{10, 11, 12};
  auto ins = edit::make_edit(2, 1, {7}, 1.0);
  CHECK(ins.kind == edit::EditKind::kInsert);
  CHECK(ins.apply(x) == std::vector<int>{10, 7, 11, 12});
  auto del = edit::make_edit(2, 3, {}, 1.0);
  CHECK(del.kind == edit::EditKind::kDelete);
  CHECK(del.apply(x) == std::vector<int>{10});
  auto rep = edit::make_edit(1, 1, {8, 9}, 1.0);
  CHECK(rep.kind == edit::EditKind::kReplace);
  CHECK(rep.apply(x) == std::vector<int>{8, 9, 11, 12});
  auto end = edit::make_edit(4, 3, {5}, 0.0);
  CHECK(end.apply(x) == std::vector<int>{10, 11, 12, 5});
  CHECK_THROWS_AS(edit::make_edit(2, 1, {}, 0.0), ContractError);
  edit::EditOp bad = rep;
  bad.kind = edit::EditKind::kDelete;
  CHECK_THROWS_AS(bad.check(), ContractError);
  CHECK(edit::to_string(edit::EditKind::kReplace) == "replace");
}

// Runs of consecutive letters with varying start and length: the only
// evidence of a missing token is a broken adjacency.
TEST_CASE("a model trained on letter runs finds, fills and defends gaps") {
  const std::string letters = "abcdefghij";
  std::vector<std::string> lines;
  for (int len = 2; len <= 6; ++len)
    for (int s = 0; s + len <= static_cast<int>(letters.size()); ++s) {
      std::string l;
      for (int k = 0; k < len; ++k) l += std::string(k ? " " : "") + letters[s + k];
      lines.push_back(l);
    }
  auto vocab = enc::Vocabulary::build(lines, 1, 2);
  auto docs = enc::encode_documents(lines, vocab);
  obj::TrainConfig tc;
  tc.batch_size = 16;
  tc.steps = 400;
  tc.lr = 3e-3;
  tc.warmup = 20;
  tc.lambda_cls = 0;
  auto mc = toy_config(vocab.size(), 2, 32);
  model::Model<float> m(obj::train(docs, vocab, tc, mc));

  const auto x = vocab.encode("c d f g");
  // The sequence start is never an EOI slot in training; keep to interior
  // gaps as the locate task does.
  CHECK(edit::locate(m, std::span<const int>(x), std::vector<int>{1, 2, 3}) == 2);
  auto fill = edit::infill(m, std::span<const int>(x), 2, 5);
  CHECK(vocab.decode(fill.tokens) == "e");
  CHECK(!fill.hit_cap);
  auto wide = edit::infill(m, std::span<const int>(vocab.encode("b e")), 1, 5);
  CHECK(vocab.decode(wide.tokens) == "c d");

  const auto full = vocab.encode("c d e f");
  const std::vector<int> noise{vocab.id("j"), vocab.id("a")};
  CHECK(edit::replace_odds(m, std::span<const int>(full), 2, 3, noise) < 1.0);
}
