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

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "toral/lattice.hpp"
#include "toral/spectral.hpp"

namespace toral {

// -int f^2 + 2 sum_{n>=0} int f . f o A^n. The sum stops once A^{-n} maps the
// support of f strictly inside the unit ball, after which every term is 0.
double SigmaSquared(const TrigPolynomial& f, const ExpandingMatrix& a);

// Number of autocorrelation terms SigmaSquared needs (n = 0..count-1).
unsigned CorrelationHorizon(const TrigPolynomial& f, const ExpandingMatrix& a);

enum class DiniTrend { kZero, kGeometric, kPowerSummable, kInconclusive };

std::string DiniTrendName(DiniTrend t);

struct DiniReport {
  std::vector<double> terms;         // Omega_{f,2}(lambda^{-n}), n = 0..N
  std::vector<double> partial_sums;  // running sums of terms
  DiniTrend trend = DiniTrend::kZero;
  double decay = 0.0;  // fitted ratio (geometric) or exponent (power)
  double tail_estimate = 0.0;
};

DiniReport CheckDini(const TrigPolynomial& f, const ExpandingMatrix& a,
                     unsigned n_max, unsigned threads = 1);

struct CltExperiment {
  std::size_t horizon = 0;
  std::size_t sample_count = 0;
  std::uint64_t seed = 0;
  double sigma2 = 0.0;
  std::vector<double> samples;  // S_n / sqrt(n)

  double SampleMean() const;
  double SampleVariance() const;
};

inline constexpr double kMaxOrbitSteps = 1e9;

// Fresh bits are written below 2^-40 every OrbitRefreshPeriod(A) steps.
inline constexpr unsigned kRefreshBits = 40;
unsigned OrbitRefreshPeriod(const ExpandingMatrix& a);

// Orbits run in 64-bit fixed point, so x -> Ax mod 1 is exact between
// refreshes. Sample s draws from substream s.
CltExperiment BirkhoffSamples(const TrigPolynomial& f, const ExpandingMatrix& a,
                              std::size_t horizon, std::size_t samples,
                              std::uint64_t seed, unsigned threads = 1);

double StandardNormalCdf(double z);

// sup_z |F_M(z) - Phi(z)| for the given values (already standardized).
double KsDistance(std::vector<double> z);

// KS distance of samples / sigma against N(0,1); ZeroVariance if sigma2 <= 0.
double KsStatistic(const CltExperiment& experiment);

}  // namespace toral
