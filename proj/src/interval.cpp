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

#include "toral/interval.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include "toral/error.hpp"
#include "toral/parallel.hpp"
#include "toral/rng.hpp"
#include "toral/stochastic.hpp"

namespace toral {
namespace {

using std::numbers::pi;

void Accumulate(CosineSeries::Terms& terms, std::uint64_t k, double c) {
  if (c == 0.0) return;
  if (!std::isfinite(c)) {
    throw Error(ErrorKind::kBadInput, "non-finite cosine coefficient");
  }
  auto [it, inserted] = terms.try_emplace(k, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0.0) terms.erase(it);
  }
}

double Lookup(const CosineSeries::Terms& terms, std::uint64_t k) {
  auto it = terms.find(k);
  return it == terms.end() ? 0.0 : it->second;
}

long double HalfSquares(const CosineSeries::Terms& terms, bool skip_zero) {
  long double s = 0;
  for (const auto& [k, c] : terms) {
    if (skip_zero && k == 0) continue;
    s += static_cast<long double>(c) * c;
  }
  return s / 2;
}

void CheckOrbitGuard(std::size_t horizon, std::size_t samples) {
  if (horizon == 0 || samples == 0) {
    throw Error(ErrorKind::kBadInput, "horizon and sample count must be >= 1");
  }
  if (static_cast<double>(horizon) * static_cast<double>(samples) >
      kMaxOrbitSteps) {
    throw Error(ErrorKind::kTooLarge,
                "horizon * samples exceeds 10^9");
  }
}

}  // namespace

CosineSeries CosineSeries::Constant(double c) {
  CosineSeries f;
  f.AddCosine(0, c);
  return f;
}

void CosineSeries::AddCosine(std::uint64_t k, double c) { Accumulate(cos_, k, c); }

void CosineSeries::AddSine(std::uint64_t m, double s) {
  if (m % 2 == 0) {
    throw Error(ErrorKind::kBadInput,
                "sine terms sin(pi m x/2) need odd m, got " + std::to_string(m));
  }
  Accumulate(sin_, m, s);
}

double CosineSeries::Cosine(std::uint64_t k) const { return Lookup(cos_, k); }

double CosineSeries::Sine(std::uint64_t m) const { return Lookup(sin_, m); }

double CosineSeries::NormSquared() const {
  const long double c0 = Mean();
  return static_cast<double>(c0 * c0 + HalfSquares(cos_, true) +
                             HalfSquares(sin_, false));
}

double CosineSeries::Norm() const { return std::sqrt(NormSquared()); }

double CosineSeries::operator()(double x) const {
  double s = 0;
  for (const auto& [k, c] : cos_) s += c * std::cos(pi * static_cast<double>(k) * x);
  for (const auto& [m, c] : sin_) {
    s += c * std::sin(pi * static_cast<double>(m) * x / 2);
  }
  return s;
}

double Inner(const CosineSeries& u, const CosineSeries& v) {
  auto half = [](const CosineSeries::Terms& a, const CosineSeries::Terms& b,
                 bool cosine) {
    const auto& small = a.size() <= b.size() ? a : b;
    const auto& large = a.size() <= b.size() ? b : a;
    long double s = 0;
    for (const auto& [k, c] : small) {
      const double w = Lookup(large, k);
      s += static_cast<long double>(c) * w * (cosine && k == 0 ? 2 : 1);
    }
    return s / 2;
  };
  return static_cast<double>(half(u.cosines(), v.cosines(), true) +
                             half(u.sine_part(), v.sine_part(), false));
}

CosineSeries TentTransfer(const CosineSeries& f, unsigned n) {
  CosineSeries g = f;
  for (unsigned step = 0; step < n; ++step) {
    if (g.cosines().empty() && g.sine_part().empty()) break;
    CosineSeries next;
    for (const auto& [k, c] : g.cosines()) {
      if (k % 2 == 0) {
        // cos(pi k z) at z = +-(1-x)/2 gives (-1)^{k/2} cos(pi (k/2) x).
        next.AddCosine(k / 2, (k / 2) % 2 == 0 ? c : -c);
      } else {
        next.AddSine(k, (k / 2) % 2 == 0 ? c : -c);
      }
    }
    g = std::move(next);
  }
  return g;
}

CosineSeries UvnPullbackLog(std::size_t truncation) {
  if (truncation == 0) throw Error(ErrorKind::kBadInput, "truncation must be >= 1");
  CosineSeries f;
  for (std::size_t k = 1; k <= truncation; ++k) {
    f.AddCosine(k, -1.0 / static_cast<double>(k));
  }
  return f;
}

double LogAbsMeanQuadrature() {
  boost::math::quadrature::tanh_sinh<double> integrator;
  return integrator.integrate(
      [](double x) { return std::log(std::sin(pi * x / 2)); }, 0.0, 1.0);
}

DecayReport UvnDecayNorms(unsigned n_max, std::size_t truncation) {
  if (n_max > 60) throw Error(ErrorKind::kTooLarge, "n_max above 60");
  const double needed = std::ldexp(1.0, static_cast<int>(n_max) + 4);
  if (static_cast<double>(truncation) < needed) {
    throw Error(ErrorKind::kTruncationTooSmall,
                "truncation " + std::to_string(truncation) + " < 2^(N+4) = " +
                    std::to_string(static_cast<unsigned long long>(needed)));
  }
  using boost::math::trigamma;
  DecayReport report;
  report.mode = DecayMode::kTransferNorm;
  report.norm = NormKind::kL2;
  CosineSeries g = UvnPullbackLog(truncation);
  const long double big_k = static_cast<long double>(truncation);
  for (unsigned n = 0; n <= n_max; ++n) {
    if (n > 0) g = TentTransfer(g, 1);
    long double tail;
    if (n == 0) {
      tail = trigamma(big_k + 1) / 2;
    } else {
      const long double scale = std::ldexp(1.0L, -2 * static_cast<int>(n));
      const long double j = std::floor(std::ldexp(big_k, -static_cast<int>(n)));
      const long double m = std::floor(std::ldexp(big_k, 1 - static_cast<int>(n)));
      const long double first_odd = std::fmod(m, 2.0L) == 0 ? m + 1 : m + 2;
      tail = scale * trigamma(j + 1) / 2 + 4 * scale * trigamma(first_odd / 2) / 8;
    }
    DecayRow row;
    row.n = n;
    row.value = std::sqrt(static_cast<double>(g.NormSquared() + tail));
    row.bound = std::ldexp(1.0, -static_cast<int>(n));
    row.ratio = row.value / row.bound;
    row.raw = row.value;
    report.rows.push_back(row);
  }
  if (report.rows.size() > 1) report.fitted_constant = report.rows[1].ratio;
  return report;
}

double UvnShiftEnergy(double u) {
  u = std::abs(u);
  if (u == 0.0) return 0.0;
  const double theta = pi * u / 2;
  const std::size_t terms = static_cast<std::size_t>(
      std::min(std::ldexp(1.0, 24), std::max(std::ldexp(1.0, 18), std::ceil(100 / u))));
  const double cs = std::cos(theta), sn = std::sin(theta);
  long double sum = 0;
  double s = 0, c = 1;
  for (std::size_t n = 1; n <= terms; ++n) {
    if (n % 1024 == 1) {
      s = std::sin(theta * static_cast<double>(n));
      c = std::cos(theta * static_cast<double>(n));
    } else {
      const double s2 = s * cs + c * sn;
      c = c * cs - s * sn;
      s = s2;
    }
    const double nd = static_cast<double>(n);
    sum += 2.0L * s * s / (nd * nd);
  }
  // Past the cutoff sin^2 averages to 1/2.
  return static_cast<double>(sum) +
         boost::math::trigamma(static_cast<double>(terms) + 1);
}

SqrtDeltaModulus UvnModulusSqrtDelta(const std::vector<double>& deltas) {
  constexpr unsigned kScan = 32;
  SqrtDeltaModulus out;
  out.curve.norm = NormKind::kL2;
  out.curve.direction_count = 1;
  out.curve.radius_count = kScan;
  for (double delta : deltas) {
    if (!(delta > 0 && delta <= 0.5)) {
      throw Error(ErrorKind::kBadInput,
                  "delta must lie in (0, 1/2], got " + std::to_string(delta));
    }
    double best = 0;
    for (unsigned i = 1; i <= kScan; ++i) {
      best = std::max(best, UvnShiftEnergy(delta * i / kScan));
    }
    out.curve.radii.push_back(delta);
    out.curve.values.push_back(std::sqrt(best));
  }
  if (deltas.size() >= 2) {
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < deltas.size(); ++i) {
      sx += std::log(deltas[i]);
      sy += std::log(out.curve.values[i]);
    }
    const double m = static_cast<double>(deltas.size());
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < deltas.size(); ++i) {
      const double dx = std::log(deltas[i]) - sx / m;
      sxx += dx * dx;
      sxy += dx * (std::log(out.curve.values[i]) - sy / m);
    }
    if (sxx > 0) out.exponent = sxy / sxx;
  }
  return out;
}

std::vector<double> UlamBirkhoffSums(const std::function<double(double)>& phi,
                                     std::size_t horizon, std::size_t samples,
                                     std::uint64_t seed, unsigned threads) {
  CheckOrbitGuard(horizon, samples);
  constexpr std::uint64_t kLow = (std::uint64_t{1} << kRefreshBits) - 1;
  constexpr std::uint64_t kHalf = std::uint64_t{1} << 63;
  std::vector<double> sums(samples, 0.0);
  ParallelFor(samples, threads, [&](std::size_t s) {
    CounterStream rng(seed, s);
    // u in [0,1) is (x+1)/2; the tent map acts as u -> 1 - |2u - 1|.
    std::uint64_t u = rng.NextU64();
    long double sum = 0;
    for (std::size_t j = 0; j < horizon; ++j) {
      std::int64_t centered = static_cast<std::int64_t>(u - kHalf);
      if (centered == 0) centered = 1;
      const double x = std::ldexp(static_cast<double>(centered), -63);
      sum += phi(std::sin(pi * x / 2));
      u = u < kHalf ? u << 1 : (0 - u) << 1;
      if ((j + 1) % kRefreshBits == 0) u = (u & ~kLow) | (rng.NextU64() & kLow);
    }
    sums[s] = static_cast<double>(sum);
  });
  return sums;
}

double TentSigmaSquared(const CosineSeries& f) {
  const double scale = f.NormSquared();
  if (std::abs(f.Mean()) > 1e-12 * (1.0 + std::sqrt(scale))) {
    throw Error(ErrorKind::kNotMeanZero, "sigma^2 needs a mean-zero function");
  }
  long double sum = scale;
  CosineSeries g = f;
  for (unsigned n = 1; n <= 200; ++n) {
    g = TentTransfer(g, 1);
    if (g.cosines().empty() && g.sine_part().empty()) break;
    const double term = Inner(g, f);
    sum += 2.0L * term;
    if (std::abs(term) < 1e-12) break;
  }
  return static_cast<double>(sum);
}

LyapunovReport LyapunovClt(std::size_t horizon, std::size_t samples,
                           std::uint64_t seed, unsigned threads,
                           std::size_t truncation) {
  CheckOrbitGuard(horizon, samples);
  LyapunovReport out;
  out.horizon = horizon;
  out.sample_count = samples;
  out.seed = seed;
  out.sigma2_series = TentSigmaSquared(UvnPullbackLog(truncation));
  out.sigma2_tolerance = 10.0 / static_cast<double>(truncation);
  out.sigma2 = std::abs(out.sigma2_series) <= out.sigma2_tolerance
                   ? 0.0
                   : out.sigma2_series;

  const auto sums = UlamBirkhoffSums(
      [](double y) { return std::log(4 * std::abs(y)); }, horizon, samples,
      seed, threads);
  const double n = static_cast<double>(horizon);
  long double rate = 0;
  out.fluctuations.reserve(samples);
  for (double s : sums) {
    rate += s / n;
    out.fluctuations.push_back((s - n * std::numbers::ln2) / std::sqrt(n));
  }
  out.mean_rate = static_cast<double>(rate / samples);
  if (out.sigma2 > 0) {
    std::vector<double> z = out.fluctuations;
    for (auto& v : z) v /= std::sqrt(out.sigma2);
    out.ks = KsDistance(std::move(z));
  }
  return out;
}

}  // namespace toral
