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
#include <map>

#include "doctest.h"
#include "xledit/numerics/adam.hpp"
#include "xledit/numerics/gradcheck.hpp"
#include "xledit/numerics/ops.hpp"
#include "xledit/numerics/rng.hpp"

using namespace xledit;
using namespace xledit::num;

namespace {

template <typename T>
Tensor<T> random_tensor(Rng& rng, Shape shape, double scale = 1.0) {
  Tensor<T> t(std::move(shape));
  for (auto& v : t.values()) v = static_cast<T>(rng.normal() * scale);
  return t;
}

Var<double> param(Rng& rng, Shape shape, double scale = 1.0) {
  return Var<double>::leaf(random_tensor<double>(rng, std::move(shape), scale), true);
}

}  // namespace

TEST_CASE("backward of sum of squares") {
  auto w = Var<double>::leaf(Tensor<double>(Shape{3}, {1, 2, 3}), true);
  auto grads = backward(ops::sum(ops::mul(w, w)));
  REQUIRE(grads.count(w.id()) == 1);
  CHECK(grads[w.id()].storage() == std::vector<double>{2, 4, 6});
}

TEST_CASE("softmax cross-entropy on uniform logits") {
  const int V = 5;
  auto logits = Var<double>::leaf(Tensor<double>(Shape{1, V}, 0.0), true);
  const int target = 2;
  auto loss = ops::scale(ops::sum(ops::pick(ops::log_softmax(logits), std::vector<int>{target})), -1.0);
  CHECK(loss.item() == doctest::Approx(std::log(5.0)));
  auto grads = backward(loss);
  for (int j = 0; j < V; ++j)
    CHECK(grads[logits.id()][j] == doctest::Approx(1.0 / V - (j == target ? 1.0 : 0.0)));
}

TEST_CASE("non-scalar loss is a contract violation") {
  auto w = Var<double>::leaf(Tensor<double>(Shape{2}, 1.0), true);
  CHECK_THROWS_AS(backward(w), ContractError);
}

TEST_CASE("three-layer MLP matches central differences") {
  Rng rng(11);
  auto x = Var<double>::constant(random_tensor<double>(rng, {4, 6}));
  auto w1 = param(rng, {6, 8}, 0.5), b1 = param(rng, {8}, 0.1);
  auto w2 = param(rng, {8, 8}, 0.5), b2 = param(rng, {8}, 0.1);
  auto w3 = param(rng, {8, 3}, 0.5);
  const std::vector<int> targets{0, 2, 1, 2};
  auto loss_fn = [&] {
    auto h = ops::gelu(ops::add_row(ops::matmul(x, w1), b1));
    h = ops::gelu(ops::add_row(ops::matmul(h, w2), b2));
    auto lp = ops::log_softmax(ops::matmul(h, w3));
    return ops::scale(ops::sum(ops::pick(lp, targets)), -1.0);
  };
  std::vector<Var<double>> params{w1, b1, w2, b2, w3};
  auto r = gradcheck(loss_fn, params, {});
  INFO(r.worst);
  CHECK(r.max_rel_error < 1e-4);
  CHECK(r.coords_checked == 6 * 8 + 8 + 64 + 8 + 24);
}

TEST_CASE("every differentiable op passes gradcheck over 50 seeds") {
  using Apply = std::function<Var<double>(const std::vector<Var<double>>&)>;
  struct OpCase {
    std::vector<Shape> shapes;
    Apply apply;
  };
  Mask mask(3, 4);
  mask.set(0, 1, false);
  mask.set(2, 0, false);
  mask.set(2, 3, false);
  const std::vector<int> gather_idx{0, 2, 2, 1, 4, 3, 0, 0, 1, 4, 2, 3};
  const std::vector<int> ids{2, 0, 2, 1};
  const std::map<std::string, OpCase> cases{
      {"matmul", {{{3, 4}, {4, 5}}, [](auto& p) { return ops::matmul(p[0], p[1]); }}},
      {"matmul_bt", {{{3, 4}, {5, 4}}, [](auto& p) { return ops::matmul_bt(p[0], p[1]); }}},
      {"add", {{{3, 4}, {3, 4}}, [](auto& p) { return ops::add(p[0], p[1]); }}},
      {"add_row", {{{3, 4}, {4}}, [](auto& p) { return ops::add_row(p[0], p[1]); }}},
      {"mul", {{{3, 4}, {3, 4}}, [](auto& p) { return ops::mul(p[0], p[1]); }}},
      {"scale", {{{3, 4}}, [](auto& p) { return ops::scale(p[0], 0.37); }}},
      {"gelu", {{{3, 4}}, [](auto& p) { return ops::gelu(p[0]); }}},
      {"exp", {{{3, 4}}, [](auto& p) { return ops::exp(p[0]); }}},
      {"log", {{{3, 4}}, [](auto& p) { return ops::log(ops::exp(p[0])); }}},
      {"layernorm", {{{3, 6}, {6}, {6}}, [](auto& p) { return ops::layernorm(p[0], p[1], p[2]); }}},
      {"softmax", {{{3, 4}}, [&](auto& p) { return ops::softmax(p[0], &mask); }}},
      {"log_softmax", {{{3, 4}}, [&](auto& p) { return ops::log_softmax(p[0]); }}},
      {"embedding", {{{3, 4}}, [&](auto& p) { return ops::embedding(p[0], std::span<const int>(ids)); }}},
      {"gather_cols", {{{3, 5}}, [&](auto& p) { return ops::gather_cols(p[0], std::span<const int>(gather_idx)); }}},
      {"slice_rows", {{{4, 3}}, [](auto& p) { return ops::slice_rows(p[0], 1, 3); }}},
      {"slice_cols", {{{3, 5}}, [](auto& p) { return ops::slice_cols(p[0], 1, 4); }}},
      {"concat_rows", {{{2, 3}, {1, 3}}, [](auto& p) { return ops::concat_rows(p); }}},
      {"concat_cols", {{{2, 3}, {2, 2}}, [](auto& p) { return ops::concat_cols(p); }}},
      {"repeat_rows", {{{1, 3}}, [](auto& p) { return ops::repeat_rows(p[0], 4); }}},
      {"mean", {{{3, 3}}, [](auto& p) { return ops::mean(p[0]); }}},
  };
  for (const auto& [name, c] : cases) {
    double worst = 0;
    std::string where;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      Rng rng(seed * 7919 + 1);
      std::vector<Var<double>> params;
      for (const auto& s : c.shapes) params.push_back(param(rng, s));
      const auto weights = Var<double>::constant(random_tensor<double>(rng, c.apply(params).shape()));
      auto loss_fn = [&] { return ops::sum(ops::mul(c.apply(params), weights)); };
      auto r = gradcheck(loss_fn, params, {});
      if (r.max_rel_error >= worst) {
        worst = r.max_rel_error;
        where = r.worst;
      }
    }
    INFO(name << ": " << where);
    CHECK(worst < 1e-4);
  }
}

TEST_CASE("softmax rows sum to one") {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    auto x = Var<float>::constant(random_tensor<float>(rng, {5, 17}, 4.0));
    Mask mask(5, 17);
    for (std::size_t j = 0; j < 17; j += 3) mask.set(trial % 5, j, false);
    auto p = ops::softmax(x, &mask);
    for (std::size_t i = 0; i < 5; ++i) {
      double s = 0;
      for (float v : p.value().row(i)) s += v;
      CHECK(std::abs(s - 1.0) < 1e-6);
    }
  }
}

TEST_CASE("fully masked softmax row is all zeros") {
  auto x = Var<double>::constant(Tensor<double>(Shape{2, 3}, 1.0));
  Mask mask(2, 3);
  for (std::size_t j = 0; j < 3; ++j) mask.set(1, j, false);
  auto p = ops::softmax(x, &mask);
  for (double v : p.value().row(1)) CHECK(v == 0.0);
  CHECK(p.value().at(0, 0) == doctest::Approx(1.0 / 3));
}

TEST_CASE("matmul rows do not depend on the other rows") {
  Rng rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t m = 1 + rng.below(9), k = 1 + rng.below(70), n = 1 + rng.below(70);
    auto a = Var<float>::constant(random_tensor<float>(rng, {m, k}));
    auto b = Var<float>::constant(random_tensor<float>(rng, {k, n}));
    auto full = ops::matmul(a, b).value();
    auto fullbt = ops::matmul_bt(a, Var<float>::constant(kernel::transpose(b.value()))).value();
    for (std::size_t i = 0; i < m; ++i) {
      auto one = ops::matmul(ops::slice_rows(a, i, i + 1), b).value();
      for (std::size_t j = 0; j < n; ++j) {
        CHECK(one[j] == full.at(i, j));
        CHECK(fullbt.at(i, j) == full.at(i, j));
      }
    }
  }
}

TEST_CASE("identical inputs give bit-identical outputs") {
  auto run = [] {
    Rng rng(42);
    auto x = Var<float>::leaf(random_tensor<float>(rng, {4, 8}), true);
    auto w = Var<float>::leaf(random_tensor<float>(rng, {8, 8}), true);
    auto loss = ops::sum(ops::softmax(ops::gelu(ops::matmul(x, w))));
    auto g = backward(loss);
    return std::make_pair(loss.item(), g[w.id()]);
  };
  auto a = run();
  auto b = run();
  CHECK(a.first == b.first);
  CHECK(a.second == b.second);
}

TEST_CASE("adam: zero gradient leaves parameters unchanged") {
  auto p = Var<double>::leaf(Tensor<double>(Shape{3}, {1.0, -2.0, 0.5}), true);
  AdamState<double> st;
  GradMap<double> g;
  g.emplace(p.id(), Tensor<double>(Shape{3}, 0.0));
  std::vector<Var<double>> ps{p};
  for (int i = 0; i < 5; ++i) adam_step<double>(ps, g, st);
  CHECK(p.value().storage() == std::vector<double>{1.0, -2.0, 0.5});
  CHECK(st.step == 5);
}

TEST_CASE("adam: first step moves by the learning rate") {
  auto p = Var<double>::leaf(Tensor<double>::scalar(0.0), true);
  AdamState<double> st;
  st.lr = 0.1;
  GradMap<double> g;
  g.emplace(p.id(), Tensor<double>::scalar(1.0));
  std::vector<Var<double>> ps{p};
  adam_step<double>(ps, g, st);
  CHECK(p.item() == doctest::Approx(-0.1).epsilon(1e-6));
}

TEST_CASE("adam: shape mismatch is an error") {
  auto p = Var<double>::leaf(Tensor<double>(Shape{2}, 0.0), true);
  AdamState<double> st;
  GradMap<double> g;
  g.emplace(p.id(), Tensor<double>(Shape{3}, 0.0));
  std::vector<Var<double>> ps{p};
  CHECK_THROWS_AS(adam_step<double>(ps, g, st), ContractError);
}

TEST_CASE("adam: minimizing p^2 shrinks |p| after warm-up") {
  auto p = Var<double>::leaf(Tensor<double>::scalar(1.0), true);
  AdamState<double> st;
  st.lr = 0.01;
  std::vector<Var<double>> ps{p};
  std::vector<double> trace;
  for (int i = 0; i < 100; ++i) {
    auto g = backward(ops::mul(p, p));
    adam_step<double>(ps, g, st);
    trace.push_back(std::abs(p.item()));
  }
  for (std::size_t i = 10; i < trace.size(); ++i) CHECK(trace[i] < trace[i - 1]);
  CHECK(trace.back() < 0.5);
}

TEST_CASE("gradient clipping bounds the global norm") {
  auto a = Var<double>::leaf(Tensor<double>(Shape{2}, 0.0), true);
  GradMap<double> g;
  g.emplace(a.id(), Tensor<double>(Shape{2}, {3.0, 4.0}));
  std::vector<Var<double>> ps{a};
  CHECK(clip_grad_norm<double>(ps, g, 1.0) == doctest::Approx(5.0));
  CHECK(grad_norm<double>(ps, g) == doctest::Approx(1.0));
}

TEST_CASE("rng: reproducible, splittable, and uniform") {
  Rng a(9), b(9);
  for (int i = 0; i < 10; ++i) CHECK(a.next_u64() == b.next_u64());
  Rng parent(9);
  Rng c1 = parent.split(1), c2 = parent.split(2), c1again = parent.split(1);
  CHECK(c1.next_u64() == c1again.next_u64());
  CHECK(c1.next_u64() != c2.next_u64());
  Rng r(123);
  std::vector<int> counts(5, 0);
  for (int i = 0; i < 50000; ++i) counts[r.below(5)]++;
  for (int c : counts) CHECK(std::abs(c / 50000.0 - 0.2) < 0.01);
}
