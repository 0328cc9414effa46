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
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "toral/analysis.hpp"
#include "toral/spectral.hpp"

namespace toral {

// f(x) = c_0 + sum_k c_k cos(pi k x) + sum_{m odd} s_m sin(pi m x / 2) on
// [-1,1] with the probability measure dx/2.
class CosineSeries {
 public:
  using Terms = std::map<std::uint64_t, double>;

  CosineSeries() = default;
  static CosineSeries Constant(double c);

  void AddCosine(std::uint64_t k, double c);
  void AddSine(std::uint64_t m, double s);  // m odd

  double Cosine(std::uint64_t k) const;
  double Sine(std::uint64_t m) const;
  const Terms& cosines() const { return cos_; }
  const Terms& sine_part() const { return sin_; }

  double Mean() const { return Cosine(0); }
  double NormSquared() const;
  double Norm() const;
  double operator()(double x) const;

 private:
  Terms cos_;
  Terms sin_;
};

// int u v dx/2 through the orthogonal basis.
double Inner(const CosineSeries& u, const CosineSeries& v);

// n applications of the tent transfer operator, (f(z+) + f(z-)) / 2 with
// z+- = +-(1 - x)/2.
CosineSeries TentTransfer(const CosineSeries& f, unsigned n);

inline constexpr std::size_t kDefaultLogTruncation = 100000;

// log|sin(pi x/2)| + log 2 = -sum_{k<=K} cos(pi k x) / k.
CosineSeries UvnPullbackLog(std::size_t truncation = kDefaultLogTruncation);

// int log|y| dmu by adaptive quadrature in x (split at the singularity).
double LogAbsMeanQuadrature();

// ||L_T^n (g o h)||_2 for n = 0..N from the surviving coefficients of the
// K-term series plus the closed-form contribution of k > K. bound = 2^-n.
DecayReport UvnDecayNorms(unsigned n_max, std::size_t truncation);

// 2 sum_{n>=1} sin^2(pi n u / 2) / n^2.
double UvnShiftEnergy(double u);

struct SqrtDeltaModulus {
  ModulusCurve curve;
  double exponent = 0.0;  // least squares slope of log Omega on log delta
};

SqrtDeltaModulus UvnModulusSqrtDelta(const std::vector<double>& deltas);

// Birkhoff sums of phi along U-orbits, y_0 ~ mu. Orbits run through the tent
// map in 64-bit fixed point with the low-bit refresh of the stochastic module.
std::vector<double> UlamBirkhoffSums(const std::function<double(double)>& phi,
                                     std::size_t horizon, std::size_t samples,
                                     std::uint64_t seed, unsigned threads = 1);

struct LyapunovReport {
  std::size_t horizon = 0;
  std::size_t sample_count = 0;
  std::uint64_t seed = 0;
  double mean_rate = 0.0;     // average of log|(U^n)'(y)| / n
  double sigma2_series = 0.0; // raw series value under truncation
  double sigma2 = 0.0;        // 0 when the series is within truncation error
  double sigma2_tolerance = 0.0;
  std::vector<double> fluctuations;  // (log|(U^n)'| - n log 2) / sqrt(n)
  std::optional<double> ks;          // absent when sigma2 = 0
};

// Variance series of the centered observable under the tent map, summed with
// TentTransfer until terms fall below 1e-12.
double TentSigmaSquared(const CosineSeries& f);

LyapunovReport LyapunovClt(std::size_t horizon, std::size_t samples,
                           std::uint64_t seed, unsigned threads = 1,
                           std::size_t truncation = kDefaultLogTruncation);

}  // namespace toral
