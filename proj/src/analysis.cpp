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


#include "toral/analysis.hpp"

#include <cmath>

#include "toral/error.hpp"
#include "toral/parallel.hpp"
#include "toral/rng.hpp"

namespace toral {
namespace {

using Complex = std::complex<double>;

std::uint64_t Mod64(const Integer& k) {
  static const Integer kTwo64 = Integer(1) << 64;
  Integer m = k % kTwo64;
  if (m < 0) m += kTwo64;
  return m.convert_to<std::uint64_t>();
}

void CheckDims(const TrigPolynomial& f, const TrigPolynomial& g,
               const ExpandingMatrix& a) {
  if (f.dim() != a.dim() || g.dim() != a.dim()) {
    throw Error(ErrorKind::kDimensionMismatch,
                "polynomial and matrix dimensions differ");
  }
}

ModelFit LeastSquares(RateModel model,
                      const std::vector<std::pair<double, double>>& xy) {
  const double m = static_cast<double>(xy.size());
  double sx = 0, sy = 0;
  for (auto [x, y] : xy) {
    sx += x;
    sy += y;
  }
  const double mx = sx / m, my = sy / m;
  double sxx = 0, sxy = 0;
  for (auto [x, y] : xy) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  const double slope = sxx > 0 ? sxy / sxx : 0.0;
  const double intercept = my - slope * mx;
  double rss = 0;
  for (auto [x, y] : xy) {
    const double r = y - (intercept + slope * x);
    rss += r * r;
  }
  ModelFit fit;
  fit.model = model;
  fit.parameter = model == RateModel::kExponential ? std::exp(slope) : -slope;
  fit.amplitude = std::exp(intercept);
  fit.residual = std::sqrt(rss / m);
  fit.rows = xy.size();
  return fit;
}

}  // namespace

Complex Correlation(const TrigPolynomial& f, const TrigPolynomial& g,
                    const ExpandingMatrix& a, unsigned n) {
  CheckDims(f, g, a);
  const IntMatrix power = a.adjoint().Power(n);
  Complex rho{};
  for (const auto& [m, c] : g.coeffs()) {
    IntVector k = power * m;
    bool zero = true;
    for (auto& e : k) {
      e = -e;
      zero = zero && e == 0;
    }
    if (zero) continue;
    rho += c * f.Coefficient(k);
  }
  return rho;
}

MonteCarloEstimate CorrelationMonteCarlo(const TrigPolynomial& f,
                                         const TrigPolynomial& g,
                                         const ExpandingMatrix& a, unsigned n,
                                         std::size_t samples,
                                         std::uint64_t seed, unsigned threads) {
  CheckDims(f, g, a);
  const std::size_t d = a.dim();
  const IntMatrix power = a.matrix().Power(n);
  std::vector<std::uint64_t> pm(d * d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) pm[i * d + j] = Mod64(power(i, j));
  }
  const Evaluator ef(f), eg(g);
  std::vector<Complex> values(samples);
  ParallelFor(samples, threads, [&](std::size_t s) {
    CounterStream rng(seed, s);
    std::vector<std::uint64_t> x(d), y(d, 0);
    for (auto& c : x) c = rng.NextU64();
    // A^n x mod 1 is exact in fixed point.
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) y[i] += pm[i * d + j] * x[j];
    }
    values[s] = ef.AtFixed(x) * eg.AtFixed(y);
  });
  MonteCarloEstimate out;
  out.samples = samples;
  if (samples == 0) return out;
  Complex sum{};
  for (const auto& v : values) sum += v;
  const Complex mean = sum / static_cast<double>(samples);
  double var = 0;
  for (const auto& v : values) var += std::norm(v - mean);
  if (samples > 1) var /= static_cast<double>(samples - 1);
  out.value = mean - f.Mean() * g.Mean();
  out.standard_error = std::sqrt(var / static_cast<double>(samples));
  return out;
}

std::string RateModelName(RateModel m) {
  switch (m) {
    case RateModel::kPower:
      return "power";
    case RateModel::kLog:
      return "log";
    case RateModel::kExponential:
      return "exponential";
  }
  return "unknown";
}

std::size_t DecayReport::BoundViolations(double tolerance) const {
  std::size_t count = 0;
  for (const auto& row : rows) {
    if (row.ratio > fitted_constant * (1.0 + tolerance)) ++count;
  }
  return count;
}

DecayReport MakeDecayReport(const TrigPolynomial& f, const TrigPolynomial& g,
                            const ExpandingMatrix& a, unsigned n_max,
                            DecayMode mode, NormKind norm, unsigned threads) {
  CheckDims(f, g, a);
  DecayReport report;
  report.mode = mode;
  report.norm = mode == DecayMode::kCorrelation ? NormKind::kL2 : norm;
  TrigPolynomial fc = f;
  if (f.Mean() != Complex{}) {
    fc = f.Centered();
    report.centered = true;
  }
  std::vector<double> radii;
  for (unsigned n = 1; n <= n_max; ++n) {
    radii.push_back(std::pow(a.lambda_min(), -static_cast<double>(n)));
  }
  const ModulusCurve curve = Modulus(fc, report.norm, radii, threads);
  const double g_norm = NormL2(g.Centered());
  for (unsigned n = 1; n <= n_max; ++n) {
    DecayRow row;
    row.n = n;
    if (mode == DecayMode::kCorrelation) {
      row.raw = Correlation(fc, g, a, n);
      row.value = std::abs(row.raw);
      row.bound = g_norm * curve.values[n - 1];
    } else {
      const TrigPolynomial ln = TransferFourier(fc, a, n);
      row.value = report.norm == NormKind::kL2 ? NormL2(ln)
                                               : NormSup(ln, threads).lower;
      row.raw = row.value;
      row.bound = curve.values[n - 1];
    }
    if (row.bound > 0) {
      row.ratio = row.value / row.bound;
    } else if (row.value > 0) {
      throw Error(ErrorKind::kDegenerateBound,
                  "modulus estimate is 0 at n = " + std::to_string(n) +
                      " while the value is " + std::to_string(row.value));
    }
    report.rows.push_back(row);
  }
  if (!report.rows.empty()) report.fitted_constant = report.rows[0].ratio;
  return report;
}

RateFit FitRate(const std::vector<std::pair<double, double>>& points) {
  std::vector<std::pair<double, double>> power, log, expo;
  bool any_finite = false;
  for (auto [n, v] : points) {
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::kBadInput, "non-finite value in decay rows");
    }
    any_finite = true;
    if (v <= 0) continue;
    const double y = std::log(v);
    if (n > 0) power.emplace_back(std::log(n), y);
    if (n >= kLogModelStart) log.emplace_back(std::log(std::log(n)), y);
    expo.emplace_back(n, y);
  }
  if (any_finite && expo.empty()) {
    throw Error(ErrorKind::kAllZero, "every value is 0; nothing to fit");
  }
  if (expo.size() < 8) {
    throw Error(ErrorKind::kBadInput,
                "rate fitting needs at least 8 nonzero rows, got " +
                    std::to_string(expo.size()));
  }
  RateFit fit;
  if (power.size() >= 3) {
    fit.candidates.push_back(LeastSquares(RateModel::kPower, power));
  }
  if (log.size() >= 3) {
    fit.candidates.push_back(LeastSquares(RateModel::kLog, log));
  }
  fit.candidates.push_back(LeastSquares(RateModel::kExponential, expo));
  fit.best = fit.candidates[0];
  for (const auto& c : fit.candidates) {
    if (c.residual < fit.best.residual) fit.best = c;
  }
  return fit;
}

RateFit FitRate(const DecayReport& report) {
  std::vector<std::pair<double, double>> points;
  for (const auto& row : report.rows) {
    points.emplace_back(static_cast<double>(row.n), row.value);
  }
  return FitRate(points);
}

}  // namespace toral
