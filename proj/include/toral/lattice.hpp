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

// Exact integer and rational linear algebra for expanding integer matrices:
// determinants, adjugates, characteristic polynomials, eigenvalue moduli,
// coset arithmetic in Z^d / A Z^d and digit-set construction.

#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_int.hpp>

namespace toral {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;
using IntVector = std::vector<Integer>;

// Square matrix of arbitrary-precision integers, row-major.
class IntMatrix {
 public:
  IntMatrix() = default;
  IntMatrix(std::size_t dim, std::vector<Integer> entries);

  static IntMatrix Identity(std::size_t dim);
  static IntMatrix FromRows(const std::vector<std::vector<long long>>& rows);

  std::size_t dim() const { return dim_; }
  const Integer& operator()(std::size_t i, std::size_t j) const {
    return entries_[i * dim_ + j];
  }
  Integer& operator()(std::size_t i, std::size_t j) {
    return entries_[i * dim_ + j];
  }
  const std::vector<Integer>& entries() const { return entries_; }

  IntMatrix Transpose() const;
  IntMatrix Power(unsigned exponent) const;
  // Fraction-free Gaussian elimination (Bareiss).
  Integer Determinant() const;
  // adj(A) with A * adj(A) = det(A) * I.
  IntMatrix Adjugate() const;
  // Coefficients c_0..c_d (low to high) of det(tI - A); c_d = 1.
  std::vector<Integer> CharacteristicPolynomial() const;
  Integer Trace() const;
  // Max absolute row sum.
  Integer InfinityNorm() const;
  Eigen::MatrixXd ToDouble() const;
  std::string ToString() const;

  friend IntMatrix operator*(const IntMatrix& a, const IntMatrix& b);
  friend IntVector operator*(const IntMatrix& a, const IntVector& v);
  friend bool operator==(const IntMatrix& a, const IntMatrix& b) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<Integer> entries_;
};

// All complex eigenvalues of an integer matrix, with multiplicity collapsed:
// roots of the squarefree part of the exact characteristic polynomial,
// Newton-polished to ~1e-15 relative accuracy.
std::vector<std::complex<double>> DistinctEigenvalues(const IntMatrix& m);

// Solves m * k = rhs over Z^d for a fixed nonsingular m using the adjugate,
// so integrality is decided exactly.
class IntegralSolver {
 public:
  explicit IntegralSolver(const IntMatrix& m);

  std::optional<IntVector> Solve(const IntVector& rhs) const;
  bool IsInLattice(const IntVector& v) const;  // v in m Z^d

 private:
  IntMatrix adjugate_;
  Integer det_;
};

// An integer matrix validated to be expanding: every eigenvalue has modulus
// strictly above 1 + kExpandingTolerance.
class ExpandingMatrix {
 public:
  static constexpr double kExpandingTolerance = 1e-9;
  static constexpr double kLambdaTolerance = 1e-12;

  std::size_t dim() const { return matrix_.dim(); }
  const IntMatrix& matrix() const { return matrix_; }
  // A* (the transpose), which drives the Fourier-side action.
  const IntMatrix& adjoint() const { return adjoint_; }
  // q = |det A|.
  const Integer& det_abs() const { return det_abs_; }
  unsigned long long q() const;
  // lambda = min |eigenvalue|.
  double lambda_min() const { return lambda_min_; }
  double lambda_tol() const { return kLambdaTolerance; }
  const std::vector<std::complex<double>>& eigenvalues() const {
    return eigenvalues_;
  }
  // True iff A^T A = c I exactly.
  bool IsSimilarity() const;
  // A^{-n} rounded to double.
  Eigen::MatrixXd InversePower(unsigned n) const;

  friend ExpandingMatrix ValidateExpanding(const IntMatrix& m);

 private:
  IntMatrix matrix_;
  IntMatrix adjoint_;
  Integer det_abs_;
  double lambda_min_ = 0.0;
  std::vector<std::complex<double>> eigenvalues_;
};

// Throws Error{kSingularMatrix} for det = 0 and Error{kNotExpanding} when some
// eigenvalue modulus is <= 1 + 1e-9.
ExpandingMatrix ValidateExpanding(const IntMatrix& m);

// true iff A^{-1}(u - v) is an integer vector.
bool SameCoset(const ExpandingMatrix& a, const IntVector& u,
               const IntVector& v);

// Canonical label of the coset of z in Z^d / A Z^d: adj(A) z reduced mod q.
IntVector CosetKey(const ExpandingMatrix& a, const IntVector& z);

struct DigitSet {
  ExpandingMatrix matrix;
  std::vector<IntVector> digits;

  std::size_t size() const { return digits.size(); }
  // Largest Euclidean length of a digit.
  double MaxNorm() const;
  // Largest Euclidean distance between two digits.
  double Diameter() const;
};

// One representative per coset, containing 0, scanned by increasing sup-norm
// shell and descending lexicographic order inside each shell.
DigitSet MakeDigitSet(const ExpandingMatrix& a);

// Validates a user-supplied complete residue system for A.
DigitSet MakeDigitSet(const ExpandingMatrix& a, std::vector<IntVector> digits);

IntVector ToIntVector(const std::vector<long long>& v);
std::vector<double> ToDouble(const IntVector& v);

}  // namespace toral
