// Copyright 2026 The toral-decay Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "toral/error.hpp"
#include "toral/tiling.hpp"

using namespace toral;

namespace {

DigitSet Digits(const std::vector<std::vector<long long>>& rows) {
  return MakeDigitSet(ValidateExpanding(IntMatrix::FromRows(rows)));
}

std::vector<double> Sorted1d(const TileApproximation& t) {
  std::vector<double> v = t.points;
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

TEST_SUITE("tiling") {
  TEST_CASE("dyadic subdivision of [0,1]") {
    auto digits = Digits({{2}});
    auto t1 = TilePoints(digits, 1);
    CHECK(Sorted1d(t1) == std::vector<double>{0.0, 0.5});
    auto t2 = TilePoints(digits, 2);
    CHECK(Sorted1d(t2) == std::vector<double>{0.0, 0.25, 0.5, 0.75});
    CHECK(t2.cell_radius <= 0.25 * (1 + 1e-12));
    CHECK(t2.cell_radius >= 0.25 * (1 - 1e-12));
  }

  TEST_CASE("twin dragon cloud") {
    auto digits = Digits({{1, -1}, {1, 1}});
    auto t = TilePoints(digits, 12);
    CHECK(t.size() == 4096);
    CHECK(t.BoundingBoxDiameter() <= 2.4);
    // sum_k 2^{-k/2} = 1 / (sqrt 2 - 1).
    CHECK(t.attractor_radius ==
          doctest::Approx(1.0 / (std::sqrt(2.0) - 1.0)).epsilon(1e-12));
    for (std::size_t i = 0; i < t.size(); ++i) {
      auto p = t.point(i);
      REQUIRE(std::hypot(p[0], p[1]) <= t.attractor_radius);
    }
  }

  TEST_CASE("guard") {
    auto digits = Digits({{2}});
    CHECK_THROWS_AS(TilePoints(digits, 24), Error);
    CHECK_NOTHROW(TilePoints(digits, 20));
    CHECK_THROWS_AS(TilePoints(digits, 0), Error);
  }

  TEST_CASE("cell radius shrinks like lambda^{-n}") {
    for (const auto& rows : std::vector<std::vector<std::vector<long long>>>{
             {{2}}, {{3}}, {{1, -1}, {1, 1}}, {{2, 0}, {0, 2}}, {{1, 2}, {-2, 1}}}) {
      auto digits = Digits(rows);
      const double lambda = digits.matrix.lambda_min();
      double prev = 0.0;
      double first_scaled = 0.0;
      for (unsigned n = 1; n <= 8; ++n) {
        auto t = TilePoints(digits, n);
        if (n > 1) {
          CHECK(t.cell_radius <= prev / lambda * (1 + 1e-6));
        } else {
          first_scaled = t.cell_radius * lambda;
        }
        CHECK(t.cell_radius * std::pow(lambda, n) <= first_scaled * (1 + 1e-9));
        prev = t.cell_radius;
      }
    }
  }

  TEST_CASE("self-affinity mismatch is zero") {
    CHECK(CheckSelfAffinity(TilePoints(Digits({{2}}), 3)) == 0.0);
    CHECK(CheckSelfAffinity(TilePoints(Digits({{1, -1}, {1, 1}}), 10)) == 0.0);
    auto three = Digits({{3}});
    REQUIRE(three.digits[2] == IntVector{Integer(-1)});
    CHECK(CheckSelfAffinity(TilePoints(three, 4)) == 0.0);
    CHECK(CheckSelfAffinity(TilePoints(Digits({{2, 1}, {0, 2}}), 5)) == 0.0);
    CHECK_THROWS_AS(CheckSelfAffinity(TilePoints(three, 1)), Error);
  }

  TEST_CASE("interval tiles the line") {
    auto t = TilePoints(Digits({{2}}), 8);
    auto stats = CheckTiling(t, 10000, 7);
    CHECK(stats.samples == 10000);
    CHECK(stats.FractionWithCount(1) >= 0.99);
    CHECK_FALSE(stats.degenerate);
    auto none = CheckTiling(t, 0, 7);
    CHECK(none.histogram.empty());
  }

  TEST_CASE("twin dragon coverage improves with level") {
    auto digits = Digits({{1, -1}, {1, 1}});
    double prev = 0.0;
    for (unsigned level : {10u, 14u, 18u}) {
      auto stats = CheckTiling(TilePoints(digits, level), 10000, 11);
      const double f = stats.FractionWithCount(1);
      MESSAGE("level " << level << " fraction(count=1) = " << f);
      CHECK(f > prev);
      CHECK(stats.FractionWithCount(0) == 0.0);
      prev = f;
    }
  }

  TEST_CASE("coverage is independent of thread count") {
    auto t = TilePoints(Digits({{1, -1}, {1, 1}}), 10);
    auto one = CheckTiling(t, 3000, 5, 1);
    auto four = CheckTiling(t, 3000, 5, 4);
    CHECK(one.histogram == four.histogram);
  }
}
