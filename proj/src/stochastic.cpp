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

#include "toral/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/SVD>

#include "toral/analysis.hpp"
#include "toral/error.hpp"
#include "toral/parallel.hpp"
#include "toral/rng.hpp"

namespace toral {
namespace {

constexpr unsigned kMaxHorizon = 100000;

std::uint64_t Mod64(const Integer& k) {
  static const Integer kTwo64 = Integer(1) << 64;
  Integer m = k % kTwo64;
  if (m < 0) m += kTwo64;
  return m.convert_to<std::uint64_t>();
}

double SpectralNorm(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()(0);
}

double SupportRadius(const TrigPolynomial& f) {
  double r = 0;
  for (const auto& [k, c] : f.coeffs()) {
    double s = 0;
    for (const auto& e : k) {
      const double v = e.convert_to<double>();
      s += v * v;
    }
    r = std::max(r, std::sqrt(s));
  }
  return r;
}

}  // namespace

unsigned CorrelationHorizon(const TrigPolynomial& f, const ExpandingMatrix& a) {
  if (f.dim() != a.dim()) {
    throw Error(ErrorKind::kDimensionMismatch,
                "polynomial and matrix dimensions differ");
  }
  const double radius = SupportRadius(f);
  if (radius == 0) return 1;
  const Eigen::MatrixXd inv = a.InversePower(1).transpose();
  // Some power of A*^{-1} is a strict contraction; call it B^p.
  Eigen::MatrixXd b = inv;
  unsigned period = 1;
  while (SpectralNorm(b) >= 1.0) {
    b = b * inv;
    if (++period > kMaxHorizon) {
      throw Error(ErrorKind::kInternal, "no contracting power of A*^{-1}");
    }
  }
  // Terms vanish for all n >= N once |B^j| R < 1 on a window of p exponents.
  constexpr double kMargin = 1.0 - 1e-9;
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(a.dim(), a.dim());
  unsigned run = 0;
  for (unsigned j = 1; j <= kMaxHorizon; ++j) {
    power = power * inv;
    if (SpectralNorm(power) * radius < kMargin) {
      if (++run == period) return j - period + 1;
    } else {
      run = 0;
    }
  }
  throw Error(ErrorKind::kTooLarge, "autocorrelation support does not collapse");
}

double SigmaSquared(const TrigPolynomial& f, const ExpandingMatrix& a) {
  if (f.dim() != a.dim()) {
    throw Error(ErrorKind::kDimensionMismatch,
                "polynomial and matrix dimensions differ");
  }
  if (std::abs(f.Mean()) > 1e-12 * (1.0 + f.L1Coefficients())) {
    throw Error(ErrorKind::kNotMeanZero, "sigma^2 needs a mean-zero function");
  }
  if (!f.SatisfiesRealSymmetry()) {
    throw Error(ErrorKind::kBadInput, "sigma^2 needs a real-valued function");
  }
  const TrigPolynomial fc = f.Centered();
  const unsigned horizon = CorrelationHorizon(fc, a);
  double sum = Correlation(fc, fc, a, 0).real();
  for (unsigned n = 1; n < horizon; ++n) {
    sum += 2.0 * Correlation(fc, fc, a, n).real();
  }
  const double scale = NormL2(fc) * NormL2(fc);
  if (sum < -1e-10 * std::max(1.0, scale)) {
    throw Error(ErrorKind::kInternal,
                "variance series is negative: " + std::to_string(sum));
  }
  return std::max(sum, 0.0);
}

std::string DiniTrendName(DiniTrend t) {
  switch (t) {
    case DiniTrend::kZero:
      return "zero";
    case DiniTrend::kGeometric:
      return "geometric";
    case DiniTrend::kPowerSummable:
      return "power-summable";
    case DiniTrend::kInconclusive:
      return "inconclusive";
  }
  return "unknown";
}

DiniReport CheckDini(const TrigPolynomial& f, const ExpandingMatrix& a,
                     unsigned n_max, unsigned threads) {
  std::vector<double> radii;
  for (unsigned n = 0; n <= n_max; ++n) {
    radii.push_back(std::pow(a.lambda_min(), -static_cast<double>(n)));
  }
  DiniReport report;
  report.terms = Modulus(f, NormKind::kL2, radii, threads).values;
  report.partial_sums.resize(report.terms.size());
  std::partial_sum(report.terms.begin(), report.terms.end(),
                   report.partial_sums.begin());
  const double last = report.terms.back();
  if (report.partial_sums.back() == 0.0) return report;

  // Judge the trend on the second half of the scales.
  const std::size_t from = report.terms.size() / 2;
  std::vector<std::pair<double, double>> tail;
  for (std::size_t n = std::max<std::size_t>(from, 1); n < report.terms.size();
       ++n) {
    if (report.terms[n] > 0) tail.emplace_back(n, report.terms[n]);
  }
  report.trend = DiniTrend::kInconclusive;
  report.tail_estimate = std::numeric_limits<double>::infinity();
  if (tail.size() < 3) return report;
  double worst = -std::numeric_limits<double>::infinity(), log_ratio = 0;
  for (std::size_t i = 1; i < tail.size(); ++i) {
    const double r = std::log(tail[i].second / tail[i - 1].second) /
                     (tail[i].first - tail[i - 1].first);
    worst = std::max(worst, r);
    log_ratio += r;
  }
  if (worst <= std::log(0.95)) {
    const double r = std::exp(log_ratio / static_cast<double>(tail.size() - 1));
    report.trend = DiniTrend::kGeometric;
    report.decay = r;
    report.tail_estimate = last * r / (1.0 - r);
    return report;
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto [n, v] : tail) {
    sx += std::log(n);
    sy += std::log(v);
  }
  const double k = static_cast<double>(tail.size());
  for (auto [n, v] : tail) {
    sxx += (std::log(n) - sx / k) * (std::log(n) - sx / k);
    sxy += (std::log(n) - sx / k) * (std::log(v) - sy / k);
  }
  const double exponent = -sxy / sxx;
  if (exponent > 1.0) {
    report.trend = DiniTrend::kPowerSummable;
    report.decay = exponent;
    report.tail_estimate = last * tail.back().first / (exponent - 1.0);
  }
  return report;
}

double CltExperiment::SampleMean() const {
  if (samples.empty()) return 0.0;
  long double s = 0;
  for (double v : samples) s += v;
  return static_cast<double>(s / samples.size());
}

double CltExperiment::SampleVariance() const {
  if (samples.size() < 2) return 0.0;
  const double m = SampleMean();
  long double s = 0;
  for (double v : samples) s += (v - m) * (v - m);
  return static_cast<double>(s / (samples.size() - 1));
}

unsigned OrbitRefreshPeriod(const ExpandingMatrix& a) {
  double row_max = 0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    double row = 0;
    for (std::size_t j = 0; j < a.dim(); ++j) {
      row += std::abs(a.matrix()(i, j).convert_to<double>());
    }
    row_max = std::max(row_max, row);
  }
  const double bits = std::log2(std::max(2.0, row_max));
  return std::max(1u, static_cast<unsigned>(std::floor(kRefreshBits / bits)));
}

CltExperiment BirkhoffSamples(const TrigPolynomial& f, const ExpandingMatrix& a,
                              std::size_t horizon, std::size_t samples,
                              std::uint64_t seed, unsigned threads) {
  if (horizon == 0 || samples == 0) {
    throw Error(ErrorKind::kBadInput, "horizon and sample count must be >= 1");
  }
  if (static_cast<double>(horizon) * static_cast<double>(samples) >
      kMaxOrbitSteps) {
    throw Error(ErrorKind::kTooLarge,
                "horizon * samples exceeds 10^9");
  }
  CltExperiment out;
  out.horizon = horizon;
  out.sample_count = samples;
  out.seed = seed;
  out.sigma2 = SigmaSquared(f, a);
  out.samples.assign(samples, 0.0);

  const std::size_t d = a.dim();
  std::vector<std::uint64_t> m(d * d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) m[i * d + j] = Mod64(a.matrix()(i, j));
  }
  const unsigned period = OrbitRefreshPeriod(a);
  constexpr std::uint64_t kLow = (std::uint64_t{1} << kRefreshBits) - 1;
  const Evaluator ef(f);
  const double norm = 1.0 / std::sqrt(static_cast<double>(horizon));
  ParallelFor(samples, threads, [&](std::size_t s) {
    CounterStream rng(seed, s);
    std::vector<std::uint64_t> x(d), y(d);
    for (auto& c : x) c = rng.NextU64();
    double sum = 0;
    for (std::size_t j = 0; j < horizon; ++j) {
      sum += ef.AtFixed(x).real();
      for (std::size_t r = 0; r < d; ++r) {
        std::uint64_t acc = 0;
        for (std::size_t c = 0; c < d; ++c) acc += m[r * d + c] * x[c];
        y[r] = acc;
      }
      x.swap(y);
      if ((j + 1) % period == 0) {
        for (auto& c : x) c = (c & ~kLow) | (rng.NextU64() & kLow);
      }
    }
    out.samples[s] = sum * norm;
  });
  return out;
}

double StandardNormalCdf(double z) {
  return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

double KsDistance(std::vector<double> z) {
  if (z.empty()) throw Error(ErrorKind::kBadInput, "no samples");
  std::sort(z.begin(), z.end());
  const double m = static_cast<double>(z.size());
  double d = 0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double p = StandardNormalCdf(z[i]);
    d = std::max({d, (i + 1) / m - p, p - i / m});
  }
  return d;
}

double KsStatistic(const CltExperiment& experiment) {
  if (!(experiment.sigma2 > 0)) {
    throw Error(ErrorKind::kZeroVariance,
                "sigma^2 = 0: the limit law is degenerate");
  }
  const double sigma = std::sqrt(experiment.sigma2);
  std::vector<double> z(experiment.samples);
  for (auto& v : z) v /= sigma;
  return KsDistance(std::move(z));
}

}  // namespace toral
