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

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "toral/lattice.hpp"
#include "toral/spectral.hpp"

namespace toral {

// rho(n) = int f . g o A^n - int f int g, exactly on the Fourier side.
std::complex<double> Correlation(const TrigPolynomial& f,
                                 const TrigPolynomial& g,
                                 const ExpandingMatrix& a, unsigned n);

struct MonteCarloEstimate {
  std::complex<double> value;
  double standard_error = 0.0;
  std::size_t samples = 0;
};

// Same quantity from M uniform samples; sample i uses substream i.
MonteCarloEstimate CorrelationMonteCarlo(const TrigPolynomial& f,
                                         const TrigPolynomial& g,
                                         const ExpandingMatrix& a, unsigned n,
                                         std::size_t samples,
                                         std::uint64_t seed,
                                         unsigned threads = 1);

enum class RateModel { kPower, kLog, kExponential };

std::string RateModelName(RateModel m);

struct ModelFit {
  RateModel model = RateModel::kPower;
  // Power: p in n^{-p}; log: p in (log n)^{-p}; exponential: theta.
  double parameter = 0.0;
  double amplitude = 0.0;
  double residual = 0.0;  // RMS in log value
  std::size_t rows = 0;
};

struct RateFit {
  ModelFit best;
  std::vector<ModelFit> candidates;
};

enum class DecayMode { kCorrelation, kTransferNorm };

struct DecayRow {
  unsigned n = 0;
  double value = 0.0;
  double bound = 0.0;
  double ratio = 0.0;
  std::complex<double> raw;  // signed correlation, or the norm
};

struct DecayReport {
  DecayMode mode = DecayMode::kCorrelation;
  NormKind norm = NormKind::kL2;
  std::vector<DecayRow> rows;
  bool centered = false;  // f had a nonzero mean that was removed
  double fitted_constant = 0.0;  // ratio at n = 1
  std::optional<RateFit> fit;

  // Rows whose ratio exceeds fitted_constant * (1 + tolerance).
  std::size_t BoundViolations(double tolerance = 0.05) const;
};

// Rows n = 1..n_max. Correlation mode compares |rho(n)| with
// ||g||_2 Omega_{f,2}(lambda^{-n}); transfer mode compares ||L^n f||_r with
// Omega_{f,r}(lambda^{-n}).
DecayReport MakeDecayReport(const TrigPolynomial& f, const TrigPolynomial& g,
                            const ExpandingMatrix& a, unsigned n_max,
                            DecayMode mode, NormKind norm = NormKind::kL2,
                            unsigned threads = 1);

inline constexpr unsigned kLogModelStart = 10;

// Least squares on (log n, log v), (log log n, log v) for n >= 10, and
// (n, log v); the smallest RMS residual wins. Zero rows are skipped.
RateFit FitRate(const DecayReport& report);
RateFit FitRate(const std::vector<std::pair<double, double>>& points);

}  // namespace toral
