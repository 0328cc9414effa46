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

#include <cmath>
#include <complex>

#include "doctest.h"
#include "toral/error.hpp"
#include "toral/lattice.hpp"

using namespace toral;

namespace {

ExpandingMatrix Make(const std::vector<std::vector<long long>>& rows) {
  return ValidateExpanding(IntMatrix::FromRows(rows));
}

IntVector V(std::vector<long long> v) { return ToIntVector(v); }

}  // namespace

TEST_SUITE("lattice") {
  TEST_CASE("validate_expanding on the reference matrices") {
    auto a = Make({{2}});
    CHECK(a.q() == 2);
    CHECK(a.lambda_min() == doctest::Approx(2.0).epsilon(1e-14));

    auto twin = Make({{1, -1}, {1, 1}});
    CHECK(twin.q() == 2);
    // t^2 - 2t + 2 has roots 1 +- i.
    const double quadratic = std::abs(std::complex<double>(1.0, 1.0));
    CHECK(std::abs(twin.lambda_min() - quadratic) <= 1e-12 * quadratic);
    CHECK(twin.IsSimilarity());
  }

  TEST_CASE("rejections") {
    try {
      Make({{1, 1}, {0, 1}});
      FAIL("expected NotExpanding");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kNotExpanding);
    }
    try {
      Make({{1, 2}, {2, 4}});
      FAIL("expected SingularMatrix");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kSingularMatrix);
    }
    // Eigenvalue exactly 1 in one direction.
    CHECK_THROWS_AS(Make({{2, 0}, {0, 1}}), Error);
    CHECK_THROWS_AS(Make({{-1}}), Error);
    CHECK_THROWS_AS(IntMatrix::FromRows({{1, 2}, {3}}), Error);
  }

  TEST_CASE("repeated eigenvalues stay accurate") {
    auto a = Make({{2, 0}, {0, 2}});
    CHECK(std::abs(a.lambda_min() - 2.0) <= 2e-12);
    auto jordan = Make({{2, 1}, {0, 2}});
    CHECK(std::abs(jordan.lambda_min() - 2.0) <= 2e-12);
    CHECK_FALSE(jordan.IsSimilarity());
    auto three = Make({{3, 1, 0}, {0, 3, 1}, {0, 0, 3}});
    CHECK(std::abs(three.lambda_min() - 3.0) <= 3e-12);
    CHECK(three.q() == 27);
  }

  TEST_CASE("characteristic polynomial and adjugate") {
    auto m = IntMatrix::FromRows({{1, -1}, {1, 1}});
    auto chi = m.CharacteristicPolynomial();
    REQUIRE(chi.size() == 3);
    CHECK(chi[0] == 2);
    CHECK(chi[1] == -2);
    CHECK(chi[2] == 1);
    auto m3 = IntMatrix::FromRows({{2, 1, 0}, {-1, 3, 2}, {4, 0, -2}});
    const Integer det = m3.Determinant();
    auto prod = m3 * m3.Adjugate();
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < 3; ++j) {
        CHECK(prod(i, j) == (i == j ? det : Integer(0)));
      }
    }
    CHECK(m3.CharacteristicPolynomial()[0] == -det);
  }

  TEST_CASE("same_coset examples") {
    auto a = Make({{2}});
    CHECK(SameCoset(a, V({0}), V({2})));
    CHECK_FALSE(SameCoset(a, V({0}), V({1})));
    auto twin = Make({{1, -1}, {1, 1}});
    CHECK_FALSE(SameCoset(twin, V({0, 0}), V({1, 0})));
    CHECK(SameCoset(twin, V({0, 0}), V({1, 1})));
    CHECK_THROWS_AS(SameCoset(twin, V({0}), V({1, 0})), Error);
  }

  TEST_CASE("digit_set examples") {
    auto d2 = MakeDigitSet(Make({{2}}));
    REQUIRE(d2.size() == 2);
    CHECK(d2.digits[0] == V({0}));
    CHECK(d2.digits[1] == V({1}));

    auto d3 = MakeDigitSet(Make({{3}}));
    REQUIRE(d3.size() == 3);
    CHECK(d3.digits[0] == V({0}));
    CHECK(d3.digits[1] == V({1}));
    CHECK(d3.digits[2] == V({-1}));

    auto twin = MakeDigitSet(Make({{1, -1}, {1, 1}}));
    REQUIRE(twin.size() == 2);
    CHECK(twin.digits[0] == V({0, 0}));
    CHECK(twin.digits[1] == V({1, 0}));
  }

  TEST_CASE("digit sets partition the integer window") {
    const std::vector<std::vector<std::vector<long long>>> corpus = {
        {{2}},
        {{3}},
        {{-5}},
        {{1, -1}, {1, 1}},
        {{2, 0}, {0, 2}},
        {{2, 1}, {0, 2}},
        {{1, 2}, {-2, 1}},
        {{3, 1}, {1, -2}},
        {{2, 0, 0}, {0, 2, 0}, {0, 0, 2}},
        {{0, 0, 2}, {1, 0, 0}, {0, 1, 0}},
    };
    for (const auto& rows : corpus) {
      auto a = Make(rows);
      auto digits = MakeDigitSet(a);
      const std::size_t d = a.dim();
      CHECK(digits.size() == a.q());
      CHECK(Integer(digits.size()) == abs(a.matrix().Determinant()));
      for (std::size_t i = 0; i < digits.size(); ++i) {
        for (std::size_t j = i + 1; j < digits.size(); ++j) {
          CHECK_FALSE(SameCoset(a, digits.digits[i], digits.digits[j]));
        }
      }
      const long long w = d <= 2 ? 5 : 3;
      std::vector<long long> z(d, -w);
      while (true) {
        int hits = 0;
        for (const auto& g : digits.digits) {
          if (SameCoset(a, ToIntVector(z), g)) ++hits;
        }
        CHECK(hits == 1);
        std::size_t i = 0;
        while (i < d && z[i] == w) z[i++] = -w;
        if (i == d) break;
        ++z[i];
      }
    }
  }

  TEST_CASE("alternative digit sets are validated") {
    auto a = Make({{3}});
    CHECK_NOTHROW(MakeDigitSet(a, {V({0}), V({4}), V({2})}));
    CHECK_THROWS_AS(MakeDigitSet(a, {V({0}), V({3}), V({1})}), Error);
    CHECK_THROWS_AS(MakeDigitSet(a, {V({0}), V({1})}), Error);
  }

  TEST_CASE("spectral consistency of matrix powers") {
    for (const auto& rows : std::vector<std::vector<std::vector<long long>>>{
             {{1, -1}, {1, 1}}, {{2, 0}, {0, 2}}, {{3}}, {{0, -2}, {2, 0}}}) {
      auto a = Make(rows);
      for (unsigned k = 1; k <= 4; ++k) {
        auto ak = ValidateExpanding(a.matrix().Power(k));
        CHECK(ak.lambda_min() >=
              std::pow(a.lambda_min(), k) * (1.0 - 1e-9));
      }
    }
  }

  TEST_CASE("inverse powers") {
    auto twin = Make({{1, -1}, {1, 1}});
    Eigen::MatrixXd inv4 = twin.InversePower(4);
    // A^4 = -4 I.
    CHECK(inv4(0, 0) == doctest::Approx(-0.25));
    CHECK(inv4(0, 1) == doctest::Approx(0.0));
    Eigen::MatrixXd prod = twin.matrix().ToDouble() * twin.InversePower(1);
    CHECK((prod - Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-15);
  }
}
