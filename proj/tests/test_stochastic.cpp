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
#include <numbers>

#include "corpus.hpp"
#include "doctest.h"
#include "toral/analysis.hpp"
#include "toral/error.hpp"
#include "toral/stochastic.hpp"

using namespace toral;
using namespace toral::testing;

namespace {

TrigPolynomial Cosine(long long k, double amplitude = 1.0) {
  TrigPolynomial f(1);
  f.Add(K({k}), amplitude / 2);
  f.Add(K({-k}), amplitude / 2);
  f.MarkReal();
  return f;
}

template <class F>
ErrorKind KindOf(F&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::kInternal;
}

// int f(x) f(2^n x) dx on a 2^16 grid, exact for these frequencies.
double GridAutocorrelation(const TrigPolynomial& f, unsigned n) {
  const std::size_t points = 1 << 16;
  double s = 0;
  for (std::size_t i = 0; i < points; ++i) {
    const double x = static_cast<double>(i) / points;
    const double y = static_cast<double>((i << n) % points) / points;
    s += (f({&x, 1}) * f({&y, 1})).real();
  }
  return s / points;
}

}  // namespace

TEST_SUITE("stochastic") {
  TEST_CASE("sigma_squared examples") {
    auto a = Matrix({{2}});
    CHECK(SigmaSquared(Cosine(1), a) == doctest::Approx(0.5).epsilon(1e-15));
    auto f2 = Cosine(1) + Cosine(2);
    CHECK(SigmaSquared(f2, a) == doctest::Approx(2.0).epsilon(1e-15));
    double grid = -GridAutocorrelation(f2, 0);
    for (unsigned n = 0; n < 8; ++n) grid += 2 * GridAutocorrelation(f2, n);
    CHECK(grid == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(SigmaSquared(TrigPolynomial(1), a) == 0.0);

    auto biased = Cosine(1);
    biased.Add(K({0}), 0.25);
    CHECK(KindOf([&] { SigmaSquared(biased, a); }) == ErrorKind::kNotMeanZero);
  }

  TEST_CASE("variance series matches a long exact sum") {
    int checked = 0;
    for (const auto& rows : ReferenceMatrices()) {
      auto a = Matrix(rows);
      for (int s = 0; s < 6; ++s) {
        auto f = RandomPolynomial(a.dim(), 11, s, 6, 12, true, true);
        const double sigma2 = SigmaSquared(f, a);
        double brute = Correlation(f, f, a, 0).real();
        for (unsigned n = 1; n <= 40; ++n) {
          brute += 2 * Correlation(f, f, a, n).real();
        }
        CHECK(sigma2 == doctest::Approx(brute).epsilon(1e-12));
        CHECK(sigma2 >= 0.0);
        CHECK(Correlation(f, f, a, CorrelationHorizon(f, a)) == 0.0);
        ++checked;
      }
    }
    CHECK(checked == 24);
  }

  TEST_CASE("check_dini") {
    auto a = Matrix({{2}});
    auto r = CheckDini(Cosine(1), a, 20);
    REQUIRE(r.terms.size() == 21);
    for (unsigned n = 0; n <= 20; ++n) {
      const double expect =
          std::sqrt(2.0) * std::sin(std::numbers::pi * std::min(std::pow(2.0, -double(n)), 0.5));
      CHECK(r.terms[n] == doctest::Approx(expect).epsilon(1e-8));
    }
    CHECK(r.partial_sums.back() <= std::sqrt(2.0) * std::numbers::pi * 2);
    CHECK(r.trend == DiniTrend::kGeometric);
    CHECK(r.decay == doctest::Approx(0.5).epsilon(1e-3));

    auto z = CheckDini(TrigPolynomial(1), a, 10);
    CHECK(z.trend == DiniTrend::kZero);
    for (double t : z.terms) CHECK(t == 0.0);

    auto t = Matrix({{1, -1}, {1, 1}});
    auto r2 = CheckDini(RandomPolynomial(2, 5, 0, 4, 3, true, true), t, 16);
    CHECK(r2.trend == DiniTrend::kGeometric);
    CHECK(r2.decay == doctest::Approx(1 / std::sqrt(2.0)).epsilon(0.05));
  }

  TEST_CASE("birkhoff samples: variance and reproducibility") {
    auto a = Matrix({{2}});
    auto e = BirkhoffSamples(Cosine(1), a, 2000, 5000, 42);
    CHECK(e.sigma2 == 0.5);
    CHECK(std::abs(e.SampleVariance() - 0.5) <= 0.05);
    CHECK(std::abs(e.SampleMean()) <= 5 * std::sqrt(e.sigma2 / 5000));
    auto e4 = BirkhoffSamples(Cosine(1), a, 2000, 5000, 42, 4);
    CHECK(e4.samples == e.samples);

    auto one = BirkhoffSamples(Cosine(1), a, 100, 1, 7);
    REQUIRE(one.samples.size() == 1);
    CHECK(std::isfinite(one.samples[0]));
    auto zero = BirkhoffSamples(TrigPolynomial(1), a, 100, 50, 7);
    for (double v : zero.samples) CHECK(v == 0.0);

    CHECK(KindOf([&] { BirkhoffSamples(Cosine(1), a, 100000, 20000, 1); }) ==
          ErrorKind::kTooLarge);
    CHECK(KindOf([&] { BirkhoffSamples(Cosine(1), a, 0, 10, 1); }) ==
          ErrorKind::kBadInput);
  }

  TEST_CASE("empirical variance agrees with the series") {
    auto f2 = Cosine(1) + Cosine(2);
    auto e = BirkhoffSamples(f2, Matrix({{2}}), 2000, 5000, 3);
    CHECK(std::abs(e.SampleVariance() / e.sigma2 - 1) <= 0.10);

    auto t = Matrix({{1, -1}, {1, 1}});
    auto g = RandomPolynomial(2, 8, 1, 5, 4, true, true);
    auto eg = BirkhoffSamples(g, t, 2000, 5000, 3);
    CHECK(eg.sigma2 > 0);
    CHECK(std::abs(eg.SampleVariance() / eg.sigma2 - 1) <= 0.10);
  }

  TEST_CASE("orbit refresh keeps the variance from collapsing") {
    auto a = Matrix({{2}});
    CHECK(OrbitRefreshPeriod(a) == 40);
    CHECK(OrbitRefreshPeriod(Matrix({{3}})) == 25);
    for (std::size_t n : {100, 1000, 10000}) {
      auto e = BirkhoffSamples(Cosine(1), a, n, 2000, 9);
      CHECK(std::abs(e.SampleVariance() - 0.5) <= 0.075);
    }
  }

  TEST_CASE("ks statistic") {
    CounterStream rng(2024, 0);
    std::vector<double> z(10000);
    for (auto& v : z) v = rng.NextNormal();
    CHECK(KsDistance(z) <= 1.63 / std::sqrt(10000.0));
    CHECK(KsDistance(std::vector<double>(100, 0.0)) == doctest::Approx(0.5));
    CHECK(StandardNormalCdf(0) == 0.5);
    CHECK(StandardNormalCdf(1.0) ==
          doctest::Approx(0.8413447460685429).epsilon(1e-14));

    auto e = BirkhoffSamples(Cosine(1), Matrix({{2}}), 2000, 5000, 42);
    CHECK(KsStatistic(e) <= 0.03);

    CltExperiment flat;
    flat.samples = {0.0, 0.0};
    CHECK(KindOf([&] { KsStatistic(flat); }) == ErrorKind::kZeroVariance);
  }

  TEST_CASE("ks distance shrinks with the horizon") {
    auto a = Matrix({{2}});
    auto median = [&](std::size_t n) {
      std::vector<double> d;
      for (std::uint64_t s = 1; s <= 5; ++s) {
        d.push_back(KsStatistic(BirkhoffSamples(Cosine(1), a, n, 5000, s)));
      }
      std::sort(d.begin(), d.end());
      return d[2];
    };
    CHECK(median(4000) <= median(250));
  }
}
