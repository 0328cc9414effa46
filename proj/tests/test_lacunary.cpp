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
#include <numbers>

#include "corpus.hpp"
#include "doctest.h"
#include "toral/analysis.hpp"
#include "toral/error.hpp"
#include "toral/lacunary.hpp"

using namespace toral;
using namespace toral::testing;

namespace {

constexpr double kPi = std::numbers::pi;

ErrorKind KindOf(auto&& call) {
  try {
    call();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::kInternal;
}

std::vector<double> Targets(int family, int count) {
  std::vector<double> t;
  for (int n = 1; n <= count; ++n) {
    switch (family) {
      case 0:
        t.push_back(std::pow(2.0, -n));
        break;
      case 1:
        t.push_back(1.0 / (n + 1.0));
        break;
      default:
        t.push_back(0.9 / std::log(n + 2.0));
        break;
    }
  }
  return t;
}

}  // namespace

TEST_SUITE("lacunary") {
  TEST_CASE("build examples") {
    auto a = Matrix({{2}});
    auto s = MakeLacunarySpec(a, K({1}), CoefficientFamily::kGeometric, 0.7, 4);
    auto h = LacunaryBuild(s);
    REQUIRE(h.size() == 4);
    CHECK(h.Coefficient(K({2})).real() == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(h.Coefficient(K({4})).real() == doctest::Approx(0.49).epsilon(1e-15));
    CHECK(h.Coefficient(K({8})).real() == doctest::Approx(0.343).epsilon(1e-15));
    CHECK(h.Coefficient(K({16})).real() == doctest::Approx(0.2401).epsilon(1e-15));

    auto twin = Matrix({{1, -1}, {1, 1}});
    auto t = LacunaryBuild(
        MakeLacunarySpec(twin, K({1, 0}), CoefficientFamily::kPower, 2.0, 3));
    REQUIRE(t.size() == 3);
    for (unsigned k = 1; k <= 3; ++k) {
      IntVector freq = twin.adjoint().Power(k) * K({1, 0});
      CHECK(t.Coefficient(freq).real() == doctest::Approx(1.0 / (k * k)));
    }
    CHECK(t.Coefficient(K({1, -1})) != 0.0);
    CHECK(t.Coefficient(K({0, -2})) != 0.0);
    CHECK(t.Coefficient(K({-2, -2})) != 0.0);

    CHECK(LacunaryBuild(MakeLacunarySpec(a, K({1}), CoefficientFamily::kPower,
                                         2.0, 0))
              .empty());
  }

  TEST_CASE("spec validation") {
    auto a = Matrix({{2}});
    CHECK(KindOf([&] {
            MakeLacunarySpec(a, K({0}), CoefficientFamily::kPower, 2.0);
          }) == ErrorKind::kBadInput);
    CHECK(KindOf([&] {
            MakeLacunarySpec(a, K({1}), CoefficientFamily::kPower, 1.0);
          }) == ErrorKind::kBadInput);
    CHECK(KindOf([&] {
            MakeLacunarySpec(a, K({1}), CoefficientFamily::kLogPower, 0.5);
          }) == ErrorKind::kBadInput);
    CHECK(KindOf([&] {
            MakeLacunarySpec(a, K({1}), CoefficientFamily::kGeometric, 0.5);
          }) == ErrorKind::kBadInput);
    CHECK(KindOf([&] {
            MakeLacunarySpec(a, K({1, 1}), CoefficientFamily::kPower, 2.0);
          }) == ErrorKind::kDimensionMismatch);
    CHECK(ParseFamily("logpower") == CoefficientFamily::kLogPower);
    CHECK_THROWS_AS(ParseFamily("zeta"), Error);
  }

  TEST_CASE("tail_norms examples") {
    auto three = Matrix({{3}});
    auto g = MakeLacunarySpec(three, K({1}), CoefficientFamily::kGeometric, 0.5);
    CHECK(LacunaryTailNorms(g, 3).l2 ==
          doctest::Approx(0.0625 / std::sqrt(0.75)).epsilon(1e-15));
    CHECK(LacunaryTailNorms(g, 3).l2 == doctest::Approx(0.072169).epsilon(1e-5));
    CHECK(LacunaryTailNorms(g, 3).l1 == doctest::Approx(0.0625 / 0.5).epsilon(1e-15));

    auto p = MakeLacunarySpec(three, K({1}), CoefficientFamily::kPower, 2.0);
    long double head4 = 0, head2 = 0;
    for (int k = 1; k <= 10; ++k) {
      head4 += std::pow(static_cast<long double>(k), -4.0L);
      head2 += std::pow(static_cast<long double>(k), -2.0L);
    }
    const long double pi = std::numbers::pi_v<long double>;
    const double l2 = static_cast<double>(std::sqrt(pi * pi * pi * pi / 90 - head4));
    const double l1 = static_cast<double>(pi * pi / 6 - head2);
    CHECK(LacunaryTailNorms(p, 10).l2 == doctest::Approx(l2).epsilon(1e-12));
    CHECK(LacunaryTailNorms(p, 10).l1 == doctest::Approx(l1).epsilon(1e-12));

    auto truncated = MakeLacunarySpec(three, K({1}), CoefficientFamily::kPower,
                                      2.0, 7);
    for (std::size_t n = 7; n <= 12; ++n) {
      CHECK(LacunaryTailNorms(truncated, n).l2 == 0.0);
      CHECK(LacunaryTailNorms(truncated, n).l1 == 0.0);
    }
  }

  TEST_CASE("log family tails against long direct sums") {
    auto a = Matrix({{2}});
    for (double beta : {1.5, 2.0, 3.0}) {
      auto s = MakeLacunarySpec(a, K({1}), CoefficientFamily::kLogPower, beta);
      auto tails = LacunaryTailNormsRange(s, 50);
      // Direct sum of 2 * 10^6 terms plus the integral remainder after it.
      const std::size_t end = 2'000'000;
      long double l1 = 0, l2 = 0;
      for (std::size_t k = end; k > 50; --k) {
        const long double c = s.Coefficient(k);
        l1 += c;
        l2 += c * c;
      }
      const long double u = std::log(static_cast<long double>(end) + 1.5L);
      l1 += std::pow(u, 1.0L - beta) / (beta - 1.0L);
      // sum_{k > end} a_k^2 < a_end^2 * end, small against the tail.
      const long double a_end = s.Coefficient(end);
      CHECK(static_cast<double>(l1) ==
            doctest::Approx(tails[50].l1).epsilon(1e-9));
      CHECK(static_cast<double>(std::sqrt(l2)) <= tails[50].l2);
      CHECK(static_cast<double>(std::sqrt(l2 + a_end * a_end * end)) >=
            tails[50].l2);
      for (std::size_t n = 0; n < 50; ++n) {
        CHECK(tails[n].l1 - tails[n + 1].l1 ==
              doctest::Approx(s.Coefficient(n + 1)).epsilon(1e-10));
      }
    }
  }

  TEST_CASE("transfer norms of truncated series are exact tails") {
    // L^n keeps the terms k >= n (the k = n term lands on h itself).
    for (const auto& rows : std::vector<std::vector<std::vector<long long>>>{
             {{2}}, {{3}}, {{1, -1}, {1, 1}}}) {
      auto a = Matrix(rows);
      IntVector h(a.dim(), Integer(0));
      h[0] = 1;
      for (auto family : {CoefficientFamily::kPower, CoefficientFamily::kGeometric,
                          CoefficientFamily::kLogPower}) {
        const double param = family == CoefficientFamily::kGeometric ? 0.8 : 2.0;
        auto s = MakeLacunarySpec(a, h, family, param, 24);
        auto hk = LacunaryBuild(s);
        auto tails = LacunaryTailNormsRange(s, 30);
        for (unsigned n = 0; n <= 26; ++n) {
          auto ln = TransferFourier(hk, a, n);
          const TailNorms expected = tails[n == 0 ? 0 : n - 1];
          CHECK(std::abs(NormL2(ln) - expected.l2) <= 1e-13);
          CHECK(ln.L1Coefficients() == doctest::Approx(expected.l1).epsilon(1e-13));
          if (a.dim() == 1 && ln.MaxFrequency() <= 4096) {
            auto sup = NormSup(ln);
            CHECK(sup.lower <= expected.l1 * (1 + 1e-12));
            CHECK(NormL2(ln) <= sup.lower * (1 + 1e-6));
          }
        }
      }
    }
  }

  TEST_CASE("default truncation") {
    auto a = Matrix({{2}});
    auto g = MakeLacunarySpec(a, K({1}), CoefficientFamily::kGeometric, 0.7);
    const std::size_t k = DefaultTruncation(g);
    CHECK(LacunaryTailNorms(g, k).l1 < 1e-10 * LacunaryTailNorms(g, 0).l1);
    CHECK(LacunaryTailNorms(g, k - 1).l1 >= 1e-10 * LacunaryTailNorms(g, 0).l1);
    auto p = MakeLacunarySpec(a, K({1}), CoefficientFamily::kPower, 2.0);
    CHECK(DefaultTruncation(p) == kMaxDefaultTruncation);
    CHECK(KindOf([&] { LacunaryBuild(p); }) == ErrorKind::kTooLarge);
  }

  TEST_CASE("proposition 2 bounds") {
    auto a = Matrix({{2}});
    auto p = MakeLacunarySpec(a, K({1}), CoefficientFamily::kPower, 2.0);
    CHECK(ModulusBoundsProp2(p, 0).sup_bound ==
          doctest::Approx(kPi * kPi / 6).epsilon(1e-12));
    CHECK(ModulusBoundsProp2(p, 0).constant == doctest::Approx(2 * kPi));
    double lo = 1e300, hi = 0;
    for (std::size_t n = 100; n <= 1000; n += 100) {
      const double r = ModulusBoundsProp2(p, n).sup_bound * n;
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    CHECK(hi / lo <= 1.5);

    auto g = MakeLacunarySpec(a, K({1}), CoefficientFamily::kGeometric, 0.7);
    lo = 1e300, hi = 0;
    for (std::size_t n = 5; n <= 60; n += 5) {
      const auto b = ModulusBoundsProp2(g, n);
      for (double r : {b.sup_bound / std::pow(0.7, n),
                       b.l2_bound / std::pow(0.7, n)}) {
        lo = std::min(lo, r);
        hi = std::max(hi, r);
      }
    }
    CHECK(hi / lo <= 20);
    CHECK(lo > 0);

    auto skew = Matrix({{2, 1}, {0, 3}});
    CHECK(KindOf([&] {
            ModulusBoundsProp2(MakeLacunarySpec(skew, K({1, 0}),
                                                CoefficientFamily::kPower, 2.0),
                               3);
          }) == ErrorKind::kNotSimilarity);
  }

  TEST_CASE("proposition 2 bounds the computed modulus") {
    // The tail bracket of the proposition carries the factor |e^{i t} - 1| <= 2.
    for (const auto& rows : std::vector<std::vector<std::vector<long long>>>{
             {{2}}, {{1, -1}, {1, 1}}}) {
      auto a = Matrix(rows);
      IntVector h(a.dim(), Integer(0));
      h[0] = 1;
      const unsigned top = a.dim() == 1 ? 8 : 5;
      auto s = MakeLacunarySpec(a, h, CoefficientFamily::kPower, 1.5, 8);
      auto hk = LacunaryBuild(s);
      std::vector<double> radii;
      for (unsigned n = 0; n <= top; ++n) radii.push_back(std::pow(a.lambda_min(), -double(n)));
      auto l2 = Modulus(hk, NormKind::kL2, radii);
      auto sup = Modulus(hk, NormKind::kSup, radii);
      for (unsigned n = 0; n <= top; ++n) {
        const auto b = ModulusBoundsProp2(s, n);
        CHECK(l2.values[n] <= 2 * b.l2_bound);
        CHECK(sup.values[n] <= 2 * b.sup_bound);
        // Lower halves of the two-sided estimates: ||L^n H||_r <= Omega.
        CHECK(NormL2(TransferFourier(hk, a, n)) <= l2.values[n] * (1 + 1e-9) + 1e-15);
      }
    }
  }

  TEST_CASE("transfer-norm decay report on lacunary series") {
    auto a = Matrix({{2}});
    auto g = LacunaryBuild(
        MakeLacunarySpec(a, K({1}), CoefficientFamily::kGeometric, 0.7, 40));
    auto r = MakeDecayReport(g, g, a, 24, DecayMode::kTransferNorm);
    double lo = 1e300, hi = 0;
    for (const auto& row : r.rows) {
      if (row.n < 6) continue;
      lo = std::min(lo, row.ratio);
      hi = std::max(hi, row.ratio);
    }
    CHECK(hi <= lo * 1.10);

    // At theta = 1/lambda the modulus picks up a sqrt(n) factor.
    std::vector<double> c;
    for (int k = 1; k <= 36; ++k) c.push_back(std::pow(0.5, k));
    auto e = LacunaryBuild(MakeExplicitSpec(a, K({1}), c));
    auto re = MakeDecayReport(e, e, a, 30, DecayMode::kTransferNorm);
    lo = 1e300, hi = 0;
    for (const auto& row : re.rows) {
      if (row.n < 12) continue;
      lo = std::min(lo, row.ratio * std::sqrt(row.n));
      hi = std::max(hi, row.ratio * std::sqrt(row.n));
    }
    CHECK(hi <= lo * 1.10);
    CHECK(re.rows.back().ratio < 0.7 * re.rows[7].ratio);
  }

  TEST_CASE("design_for_rate examples") {
    auto sup = DesignForRate(Targets(0, 10), DesignNorm::kSup);
    REQUIRE(sup.size() == 11);
    for (int n = 1; n <= 10; ++n) CHECK(sup[n - 1] == std::pow(2.0, -n));
    CHECK(sup[10] == std::pow(2.0, -10));

    auto l2 = DesignForRate(Targets(1, 10), DesignNorm::kL2);
    for (int n = 1; n <= 10; ++n) {
      CHECK(l2[n - 1] == doctest::Approx(std::sqrt(1.0 / (n * n) -
                                                   1.0 / ((n + 1.0) * (n + 1.0))))
                             .epsilon(1e-14));
    }
    auto flat = DesignForRate({0.5, 0.5, 0.25, 0.25}, DesignNorm::kSup);
    CHECK(flat == std::vector<double>{0.5, 0.0, 0.25, 0.0, 0.25});
    CHECK(KindOf([] { DesignForRate({0.5, 0.6}, DesignNorm::kSup); }) ==
          ErrorKind::kNotDecreasing);
    CHECK(KindOf([] { DesignForRate({1.0}, DesignNorm::kSup); }) ==
          ErrorKind::kBadInput);
  }

  TEST_CASE("design round trip") {
    auto a = Matrix({{2}});
    for (int family = 0; family < 3; ++family) {
      const auto targets = Targets(family, 40);
      for (auto norm : {DesignNorm::kSup, DesignNorm::kL2}) {
        auto s = MakeExplicitSpec(a, K({1}), DesignForRate(targets, norm));
        auto tails = LacunaryTailNormsRange(s, 45);
        CHECK(std::abs((norm == DesignNorm::kSup ? tails[0].l1 : tails[0].l2) -
                       1.0) <= 1e-15);
        for (std::size_t n = 1; n <= targets.size(); ++n) {
          const double got = norm == DesignNorm::kSup ? tails[n].l1 : tails[n].l2;
          CHECK(std::abs(got - targets[n - 1]) <= 1e-15);
        }
      }
    }
  }
}
