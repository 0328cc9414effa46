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
#include <map>
#include <span>
#include <string>
#include <vector>

#include "toral/lattice.hpp"

namespace toral {

enum class NormKind { kL2, kSup };

// f(x) = sum_k c_k e^{2 pi i <k, x>} on the d-torus, with exact integer
// frequencies. Zero coefficients are never stored.
class TrigPolynomial {
 public:
  using Coefficients = std::map<IntVector, std::complex<double>>;

  static constexpr double kPruneThreshold = 1e-300;

  explicit TrigPolynomial(std::size_t dim = 1) : dim_(dim) {}

  static TrigPolynomial Constant(std::size_t dim, std::complex<double> c);

  std::size_t dim() const { return dim_; }
  const Coefficients& coeffs() const { return coeffs_; }
  std::size_t size() const { return coeffs_.size(); }
  bool empty() const { return coeffs_.empty(); }

  // Adds c to the coefficient at k.
  void Add(const IntVector& k, std::complex<double> c);
  void Set(const IntVector& k, std::complex<double> c);
  std::complex<double> Coefficient(const IntVector& k) const;
  std::complex<double> Mean() const;
  // f minus its mean.
  TrigPolynomial Centered() const;

  // Real-valued flag: c_{-k} = conj(c_k) for every stored k.
  bool real() const { return real_; }
  bool SatisfiesRealSymmetry(double tol = 1e-12) const;
  // Sets the flag; throws kBadInput when the symmetry fails.
  void MarkReal(double tol = 1e-12);

  // max_k |k|_inf over the support (0 for an empty or constant f).
  Integer MaxFrequency() const;
  // sum |c_k|, an upper bound for the sup norm.
  double L1Coefficients() const;

  std::complex<double> operator()(std::span<const double> x) const;

  // JSON list of {"k": [...], "re": .., "im": ..}. Frequency entries beyond
  // the int64 range are written as decimal strings.
  std::string ToJson() const;
  // dim = 0 infers the dimension from the first entry.
  static TrigPolynomial FromJson(const std::string& text, std::size_t dim = 0);

  friend TrigPolynomial operator+(const TrigPolynomial& a,
                                  const TrigPolynomial& b);
  friend TrigPolynomial operator*(std::complex<double> s,
                                  const TrigPolynomial& f);

 private:
  std::size_t dim_;
  Coefficients coeffs_;
  bool real_ = false;
};

// Phases <k, x> mod 1 are computed in 64-bit fixed point: x is rounded to the
// grid 2^-64 Z^d and k is reduced mod 2^64, so the phase is exact for the
// rounded point however large k is.
std::uint64_t ToFixedPoint(double x);
double FixedToSignedUnit(std::uint64_t phase);  // in [-1/2, 1/2)

class Evaluator {
 public:
  explicit Evaluator(const TrigPolynomial& f);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return coeffs_.size(); }
  std::complex<double> operator()(std::span<const double> x) const;
  std::complex<double> AtFixed(std::span<const std::uint64_t> x) const;
  // <k_t, x> mod 1 for term t, in fixed point.
  std::uint64_t Phase(std::size_t t, std::span<const std::uint64_t> x) const;
  // Coordinate i of frequency t, reduced mod 2^64.
  std::uint64_t frequency(std::size_t t, std::size_t i) const {
    return freq_[t * dim_ + i];
  }
  const std::complex<double>& coefficient(std::size_t t) const {
    return coeffs_[t];
  }
  // Same frequencies with coefficient t replaced by coeff(t).
  template <typename F>
  Evaluator WithCoefficients(F&& coeff) const {
    Evaluator e = *this;
    for (std::size_t t = 0; t < e.coeffs_.size(); ++t) e.coeffs_[t] = coeff(t);
    return e;
  }

 private:
  std::size_t dim_;
  std::vector<std::uint64_t> freq_;  // size() x dim, reduced mod 2^64
  std::vector<std::complex<double>> coeffs_;
};

// L^n f via the Fourier side: coefficient at k is c_{A*^n k}, solved exactly.
TrigPolynomial TransferFourier(const TrigPolynomial& f,
                               const ExpandingMatrix& a, unsigned n);

inline constexpr std::size_t kMaxSpatialTerms = 1'000'000;

// L^n f(x) = q^{-n} sum over the q^n preimages A^{-n} x + b_g.
std::complex<double> TransferSpatialEval(const TrigPolynomial& f,
                                         const DigitSet& digits, unsigned n,
                                         std::span<const double> x);

double NormL2(const TrigPolynomial& f);

struct SupNormBracket {
  double lower = 0.0;  // attained |f| at a computed point
  double upper = 0.0;  // sum |c_k|
  std::size_t grid_per_dim = 0;
  std::vector<double> argmax;
};

inline constexpr double kMaxGridWork = 1e9;

SupNormBracket NormSup(const TrigPolynomial& f, unsigned threads = 1);

// sqrt(4 sum |c_k|^2 sin^2(pi <k, v>)) = ||f(. + v) - f||_2.
double ShiftL2(const TrigPolynomial& f, std::span<const double> v);

struct ModulusCurve {
  std::vector<double> radii;
  std::vector<double> values;
  NormKind norm = NormKind::kL2;
  std::size_t direction_count = 0;
  std::size_t radius_count = 0;
  std::size_t refinement_steps = 0;
};

// Lower bound on sup_{|v| <= delta} ||f(. + v) - f||_r for each radius,
// made non-decreasing in delta.
ModulusCurve Modulus(const TrigPolynomial& f, NormKind norm,
                     const std::vector<double>& radii, unsigned threads = 1);

}  // namespace toral
