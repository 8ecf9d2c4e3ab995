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
#include <vector>

#include "doctest.h"
#include "xledit/error.hpp"
#include "xledit/positional/offsets.hpp"
#include "xledit/positional/sinusoid.hpp"

using namespace xledit;
using namespace xledit::pos;

TEST_CASE("piecewise offsets agree with virtual coordinates for every small layout") {
  int layouts = 0, mismatches = 0;
  for (int n = 1; n <= 12; ++n)
    for (int a = 1; a <= n; ++a)
      for (int b = a; b <= n; ++b) {
        ++layouts;
        for (int i = 1; i <= n; ++i)
          for (int j = 1; j <= n; ++j)
            if (effective_offset(a, b, i, j) != oracle_offset(a, b, i, j)) ++mismatches;
      }
  CHECK(layouts == 364);
  CHECK(mismatches == 0);
}

TEST_CASE("query edges of a three-token insertion") {
  // [x_l, y1, y2, y3, EOI, x_r]
  auto m = build_offset_matrix({6, 2, 5});
  auto at = [&](int i, int j) { return m.offset(i - 1, j - 1); };
  CHECK(at(3, 1) == 2);
  CHECK(at(3, 2) == 1);
  CHECK(at(3, 6) == -2);
  CHECK(at(2, 1) == 1);
  CHECK(at(2, 6) == -2);
  CHECK(at(4, 6) == -2);
  CHECK(at(5, 6) == -2);
  CHECK(at(1, 6) == -2);
  CHECK(at(6, 1) == 2);
  CHECK(at(4, 2) == 2);
  CHECK_FALSE(m.is_legal(0, 2));
  CHECK_FALSE(m.is_legal(5, 3));
  CHECK_FALSE(m.is_legal(1, 2));
}

TEST_CASE("query edges of a two-token insertion match the longer one") {
  auto m = build_offset_matrix({5, 2, 4});
  auto at = [&](int i, int j) { return m.offset(i - 1, j - 1); };
  CHECK(at(3, 1) == 2);
  CHECK(at(3, 2) == 1);
  CHECK(at(3, 5) == -2);
  CHECK(at(2, 1) == 1);
  CHECK(at(2, 5) == -2);
}

TEST_CASE("left-to-right scheme keeps raw offsets") {
  // [x_l, y1, y2, y3, x_r]
  auto m = build_offset_matrix({5, 2, 4}, OffsetScheme::kLeftToRight);
  CHECK(m.offset(2, 4) == -2);
  CHECK(m.offset(1, 4) == -3);
  auto m2 = build_offset_matrix({4, 2, 3}, OffsetScheme::kLeftToRight);
  CHECK(m2.offset(2, 3) == -1);
  CHECK(m2.offset(1, 3) == -2);
  CHECK_FALSE(m.is_legal(0, 1));
  CHECK_FALSE(m.is_legal(1, 2));
}

TEST_CASE("empty insertion layout") {
  auto m = build_offset_matrix({3, 2, 2});
  CHECK(m.offset(0, 2) == -2);
  CHECK(m.offset(2, 0) == 2);
  CHECK(m.offset(1, 2) == -2);
  CHECK(m.offset(1, 0) == 1);
  CHECK_FALSE(m.is_legal(0, 1));
  CHECK_FALSE(m.is_legal(2, 1));
}

TEST_CASE("everything inserted leaves a causal triangle") {
  const int n = 5;
  auto m = build_offset_matrix({n, 1, n});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      CHECK(m.is_legal(i, j) == (j <= i));
      if (j <= i) CHECK(m.offset(i, j) == i - j);
    }
}

TEST_CASE("diagonal is zero and contexts never see the span") {
  for (int n = 1; n <= 10; ++n)
    for (int a = 1; a <= n; ++a)
      for (int b = a; b <= n; ++b) {
        SpanLayout l{n, a, b};
        auto m = build_offset_matrix(l);
        for (int i = 1; i <= n; ++i) {
          REQUIRE(m.is_legal(i - 1, i - 1));
          CHECK(m.offset(i - 1, i - 1) == 0);
          for (int j = 1; j <= n; ++j)
            if (l.in_span(j) && !l.in_span(i)) CHECK_FALSE(m.is_legal(i - 1, j - 1));
        }
      }
}

TEST_CASE("span rows do not depend on how many slots remain") {
  // Fixed left context of 3, right context of 4; slot t sees the same
  // offsets whatever the span length.
  const int left = 3, right = 4, a = left + 1;
  for (int t = 1; t <= 6; ++t) {
    std::vector<int> reference;
    for (int len = t; len <= 9; ++len) {
      const int b = a + len - 1;
      const int n = b + right;
      const int i = a + t - 1;
      std::vector<int> row;
      for (int j = 1; j <= n; ++j) {
        if (j >= a && j <= b && j > i) continue;
        auto off = effective_offset(a, b, i, j);
        REQUIRE(off.has_value());
        row.push_back(*off);
      }
      if (reference.empty()) reference = row;
      CHECK(row == reference);
    }
  }
}

TEST_CASE("the left-to-right scheme does depend on remaining slots") {
  const int a = 2, i = 2;
  auto short_span = pair_offset(OffsetScheme::kLeftToRight, {4, a, 3}, i, 4);
  auto long_span = pair_offset(OffsetScheme::kLeftToRight, {7, a, 6}, i, 7);
  CHECK(*short_span != *long_span);
}

TEST_CASE("invalid layouts are rejected") {
  CHECK_THROWS_AS(build_offset_matrix({4, 3, 2}), ContractError);
  CHECK_THROWS_AS(build_offset_matrix({4, 0, 2}), ContractError);
  CHECK_THROWS_AS(build_offset_matrix({4, 2, 5}), ContractError);
}

TEST_CASE("render marks masked pairs and signs offsets") {
  auto text = render(build_offset_matrix({6, 2, 5}));
  CHECK(text.find("  3   +2  +1   0   .   .  -2") != std::string::npos);
  CHECK(text.find("  1    0   .   .   .   .  -2") != std::string::npos);
}

TEST_CASE("sinusoid table") {
  SinusoidTable table(8, 16);
  auto zero = table.row(0);
  for (int k = 0; k < 4; ++k) {
    CHECK(zero[2 * k] == 0.0);
    CHECK(zero[2 * k + 1] == 1.0);
  }
  CHECK(table.row(3)[0] == doctest::Approx(std::sin(3.0)));
  CHECK(table.row(-3)[0] == doctest::Approx(-std::sin(3.0)));
  CHECK(table.row(3)[3] == doctest::Approx(std::cos(3.0 * std::pow(10000.0, -0.25))));
  CHECK(table.row(100)[0] == table.row(16)[0]);
  CHECK(table.row(-100)[1] == table.row(-16)[1]);
  auto block = table.rows<float>(-2, 2);
  CHECK(block.rows() == 5);
  CHECK(block.at(2, 1) == 1.0f);
  CHECK_THROWS_AS(SinusoidTable(7, 4), ContractError);
}
