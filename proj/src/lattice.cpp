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

#include "toral/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "toral/error.hpp"

namespace toral {
namespace {

using Poly = std::vector<Rational>;  // low to high

void Trim(Poly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

Poly Derivative(const Poly& p) {
  Poly d;
  for (std::size_t i = 1; i < p.size(); ++i) d.push_back(p[i] * Rational(i));
  Trim(d);
  return d;
}

// Returns (quotient, remainder) of a / b; b nonzero.
std::pair<Poly, Poly> DivMod(Poly a, const Poly& b) {
  Trim(a);
  Poly q;
  if (a.size() < b.size()) return {q, a};
  q.assign(a.size() - b.size() + 1, Rational(0));
  while (!a.empty() && a.size() >= b.size()) {
    const std::size_t shift = a.size() - b.size();
    const Rational factor = a.back() / b.back();
    q[shift] = factor;
    for (std::size_t i = 0; i < b.size(); ++i) a[i + shift] -= factor * b[i];
    a.pop_back();
    Trim(a);
  }
  Trim(q);
  return {q, a};
}

Poly Monic(Poly p) {
  Trim(p);
  const Rational lead = p.back();
  for (auto& c : p) c /= lead;
  return p;
}

Poly Gcd(Poly a, Poly b) {
  Trim(a);
  Trim(b);
  while (!b.empty()) {
    Poly r = DivMod(a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  return Monic(a);
}

std::vector<std::complex<double>> PolishedRoots(const Poly& monic) {
  const std::size_t m = monic.size() - 1;
  std::vector<long double> coeffs(monic.size());
  for (std::size_t i = 0; i < monic.size(); ++i) {
    coeffs[i] = static_cast<long double>(static_cast<double>(monic[i]));
  }
  std::vector<std::complex<long double>> seeds;
  if (m == 1) {
    seeds.emplace_back(-coeffs[0], 0.0L);
  } else {
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(m, m);
    for (std::size_t i = 1; i < m; ++i) companion(i, i - 1) = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
      companion(i, m - 1) = -static_cast<double>(coeffs[i]);
    }
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    if (solver.info() != Eigen::Success) {
      throw Error(ErrorKind::kInternal, "companion eigenvalue solve failed");
    }
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
      const auto z = solver.eigenvalues()[i];
      seeds.emplace_back(z.real(), z.imag());
    }
  }
  std::vector<std::complex<double>> roots;
  for (auto z : seeds) {
    for (int iter = 0; iter < 8; ++iter) {
      std::complex<long double> value = coeffs[m];
      std::complex<long double> slope = 0.0L;
      for (std::size_t i = m; i-- > 0;) {
        slope = slope * z + value;
        value = value * z + coeffs[i];
      }
      if (std::abs(slope) == 0.0L) break;
      const auto step = value / slope;
      z -= step;
      if (std::abs(step) <= 1e-19L * std::max(1.0L, std::abs(z))) break;
    }
    roots.emplace_back(static_cast<double>(z.real()),
                       static_cast<double>(z.imag()));
  }
  return roots;
}

Integer FloorMod(const Integer& a, const Integer& m) {
  Integer r = a % m;
  if (r < 0) r += m;
  return r;
}

}  // namespace

IntMatrix::IntMatrix(std::size_t dim, std::vector<Integer> entries)
    : dim_(dim), entries_(std::move(entries)) {
  if (dim_ == 0 || entries_.size() != dim_ * dim_) {
    throw Error(ErrorKind::kDimensionMismatch,
                "matrix needs dim*dim entries with dim >= 1");
  }
}

IntMatrix IntMatrix::Identity(std::size_t dim) {
  std::vector<Integer> e(dim * dim, Integer(0));
  for (std::size_t i = 0; i < dim; ++i) e[i * dim + i] = 1;
  return IntMatrix(dim, std::move(e));
}

IntMatrix IntMatrix::FromRows(const std::vector<std::vector<long long>>& rows) {
  const std::size_t d = rows.size();
  std::vector<Integer> e;
  e.reserve(d * d);
  for (const auto& row : rows) {
    if (row.size() != d) {
      throw Error(ErrorKind::kDimensionMismatch, "matrix must be square");
    }
    for (long long v : row) e.emplace_back(v);
  }
  return IntMatrix(d, std::move(e));
}

IntMatrix IntMatrix::Transpose() const {
  IntMatrix t = *this;
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t j = 0; j < dim_; ++j) t(i, j) = (*this)(j, i);
  }
  return t;
}

IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
  if (a.dim_ != b.dim_) {
    throw Error(ErrorKind::kDimensionMismatch, "matrix product");
  }
  const std::size_t d = a.dim_;
  std::vector<Integer> e(d * d, Integer(0));
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t k = 0; k < d; ++k) {
      if (a(i, k) == 0) continue;
      for (std::size_t j = 0; j < d; ++j) e[i * d + j] += a(i, k) * b(k, j);
    }
  }
  return IntMatrix(d, std::move(e));
}

IntVector operator*(const IntMatrix& a, const IntVector& v) {
  if (a.dim_ != v.size()) {
    throw Error(ErrorKind::kDimensionMismatch, "matrix-vector product");
  }
  IntVector out(a.dim_, Integer(0));
  for (std::size_t i = 0; i < a.dim_; ++i) {
    for (std::size_t j = 0; j < a.dim_; ++j) out[i] += a(i, j) * v[j];
  }
  return out;
}

IntMatrix IntMatrix::Power(unsigned exponent) const {
  IntMatrix result = Identity(dim_);
  IntMatrix base = *this;
  while (exponent > 0) {
    if (exponent & 1u) result = result * base;
    exponent >>= 1;
    if (exponent > 0) base = base * base;
  }
  return result;
}

Integer IntMatrix::Determinant() const {
  const std::size_t n = dim_;
  std::vector<Integer> m = entries_;
  auto at = [&](std::size_t i, std::size_t j) -> Integer& {
    return m[i * n + j];
  };
  Integer sign = 1;
  Integer prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (at(k, k) == 0) {
      std::size_t swap = k + 1;
      while (swap < n && at(swap, k) == 0) ++swap;
      if (swap == n) return 0;
      for (std::size_t j = 0; j < n; ++j) std::swap(at(k, j), at(swap, j));
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        at(i, j) = (at(i, j) * at(k, k) - at(i, k) * at(k, j)) / prev;
      }
    }
    prev = at(k, k);
  }
  return sign * at(n - 1, n - 1);
}

IntMatrix IntMatrix::Adjugate() const {
  const std::size_t n = dim_;
  if (n == 1) return Identity(1);
  std::vector<Integer> adj(n * n);
  std::vector<Integer> minor((n - 1) * (n - 1));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      std::size_t idx = 0;
      for (std::size_t r = 0; r < n; ++r) {
        if (r == i) continue;
        for (std::size_t c = 0; c < n; ++c) {
          if (c == j) continue;
          minor[idx++] = (*this)(r, c);
        }
      }
      Integer cofactor = IntMatrix(n - 1, minor).Determinant();
      if ((i + j) % 2 == 1) cofactor = -cofactor;
      adj[j * n + i] = cofactor;  // transpose of the cofactor matrix
    }
  }
  return IntMatrix(n, std::move(adj));
}

Integer IntMatrix::Trace() const {
  Integer t = 0;
  for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
  return t;
}

std::vector<Integer> IntMatrix::CharacteristicPolynomial() const {
  // Faddeev-LeVerrier; every division below is exact over Z.
  const std::size_t n = dim_;
  std::vector<Integer> c(n + 1, Integer(0));
  c[n] = 1;
  IntMatrix m(n, std::vector<Integer>(n * n, Integer(0)));
  for (std::size_t k = 1; k <= n; ++k) {
    IntMatrix next = *this * m;
    for (std::size_t i = 0; i < n; ++i) next(i, i) += c[n - k + 1];
    m = std::move(next);
    c[n - k] = -(*this * m).Trace() / Integer(k);
  }
  return c;
}

Integer IntMatrix::InfinityNorm() const {
  Integer best = 0;
  for (std::size_t i = 0; i < dim_; ++i) {
    Integer row = 0;
    for (std::size_t j = 0; j < dim_; ++j) row += abs((*this)(i, j));
    best = std::max(best, row);
  }
  return best;
}

Eigen::MatrixXd IntMatrix::ToDouble() const {
  Eigen::MatrixXd out(dim_, dim_);
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t j = 0; j < dim_; ++j) {
      out(i, j) = static_cast<double>((*this)(i, j));
    }
  }
  return out;
}

std::string IntMatrix::ToString() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < dim_; ++i) {
    if (i > 0) os << ';';
    for (std::size_t j = 0; j < dim_; ++j) {
      if (j > 0) os << ',';
      os << (*this)(i, j);
    }
  }
  return os.str();
}

std::vector<std::complex<double>> DistinctEigenvalues(const IntMatrix& m) {
  const auto chi = m.CharacteristicPolynomial();
  Poly p(chi.begin(), chi.end());
  const Poly g = Gcd(p, Derivative(p));
  const Poly squarefree = Monic(DivMod(p, g).first);
  return PolishedRoots(squarefree);
}

IntegralSolver::IntegralSolver(const IntMatrix& m)
    : adjugate_(m.Adjugate()), det_(m.Determinant()) {
  if (det_ == 0) throw Error(ErrorKind::kSingularMatrix, "det = 0");
}

std::optional<IntVector> IntegralSolver::Solve(const IntVector& rhs) const {
  IntVector k = adjugate_ * rhs;
  for (auto& c : k) {
    if (c % det_ != 0) return std::nullopt;
    c /= det_;
  }
  return k;
}

bool IntegralSolver::IsInLattice(const IntVector& v) const {
  const IntVector k = adjugate_ * v;
  return std::all_of(k.begin(), k.end(),
                     [&](const Integer& c) { return c % det_ == 0; });
}

unsigned long long ExpandingMatrix::q() const {
  return det_abs_.convert_to<unsigned long long>();
}

bool ExpandingMatrix::IsSimilarity() const {
  const IntMatrix gram = adjoint_ * matrix_;
  const Integer scale = gram(0, 0);
  for (std::size_t i = 0; i < dim(); ++i) {
    for (std::size_t j = 0; j < dim(); ++j) {
      if (gram(i, j) != (i == j ? scale : Integer(0))) return false;
    }
  }
  return true;
}

Eigen::MatrixXd ExpandingMatrix::InversePower(unsigned n) const {
  const IntMatrix p = matrix_.Power(n);
  const IntMatrix adj = p.Adjugate();
  const Integer det = p.Determinant();
  Eigen::MatrixXd out(dim(), dim());
  for (std::size_t i = 0; i < dim(); ++i) {
    for (std::size_t j = 0; j < dim(); ++j) {
      out(i, j) = static_cast<double>(Rational(adj(i, j), det));
    }
  }
  return out;
}

ExpandingMatrix ValidateExpanding(const IntMatrix& m) {
  ExpandingMatrix a;
  a.matrix_ = m;
  a.adjoint_ = m.Transpose();
  const Integer det = m.Determinant();
  if (det == 0) {
    throw Error(ErrorKind::kSingularMatrix,
                "matrix " + m.ToString() + " has determinant 0");
  }
  a.det_abs_ = abs(det);
  a.eigenvalues_ = DistinctEigenvalues(m);
  double lambda = std::numeric_limits<double>::infinity();
  for (const auto& z : a.eigenvalues_) lambda = std::min(lambda, std::abs(z));
  a.lambda_min_ = lambda;
  if (!(lambda > 1.0 + ExpandingMatrix::kExpandingTolerance)) {
    std::ostringstream os;
    os.precision(17);
    os << "matrix " << m.ToString() << " has an eigenvalue of modulus "
       << lambda << " <= 1 + 1e-9";
    throw Error(ErrorKind::kNotExpanding, os.str());
  }
  if (a.det_abs_ < 2) {
    throw Error(ErrorKind::kInternal, "expanding matrix with |det| < 2");
  }
  return a;
}

bool SameCoset(const ExpandingMatrix& a, const IntVector& u,
               const IntVector& v) {
  if (u.size() != a.dim() || v.size() != a.dim()) {
    throw Error(ErrorKind::kDimensionMismatch, "coset test");
  }
  IntVector diff(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) diff[i] = u[i] - v[i];
  return IntegralSolver(a.matrix()).IsInLattice(diff);
}

IntVector CosetKey(const ExpandingMatrix& a, const IntVector& z) {
  IntVector key = a.matrix().Adjugate() * z;
  for (auto& c : key) c = FloorMod(c, a.det_abs());
  return key;
}

double DigitSet::MaxNorm() const {
  double best = 0.0;
  for (const auto& g : digits) {
    double s = 0.0;
    for (const auto& c : g) s += std::pow(static_cast<double>(c), 2);
    best = std::max(best, std::sqrt(s));
  }
  return best;
}

double DigitSet::Diameter() const {
  double best = 0.0;
  for (const auto& g : digits) {
    for (const auto& h : digits) {
      double s = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) {
        s += std::pow(static_cast<double>(g[i] - h[i]), 2);
      }
      best = std::max(best, std::sqrt(s));
    }
  }
  return best;
}

DigitSet MakeDigitSet(const ExpandingMatrix& a) {
  const std::size_t d = a.dim();
  const IntMatrix adj = a.matrix().Adjugate();
  const Integer& q = a.det_abs();
  const std::size_t want = a.q();
  // A[0,1)^d is a fundamental domain of A Z^d, so every coset has a
  // representative with sup-norm at most the max absolute row sum of A.
  const long long bound = a.matrix().InfinityNorm().convert_to<long long>();

  DigitSet out{a, {}};
  std::set<IntVector> seen;
  auto consider = [&](const std::vector<long long>& z) {
    IntVector v = ToIntVector(z);
    IntVector key = adj * v;
    for (auto& c : key) c = FloorMod(c, q);
    if (seen.insert(key).second) out.digits.push_back(std::move(v));
  };

  for (long long r = 0; r <= bound && out.digits.size() < want; ++r) {
    // Odometer over [-r, r]^d in descending lexicographic order, keeping only
    // the shell |z|_inf == r.
    std::vector<long long> z(d, r);
    while (true) {
      long long sup = 0;
      for (long long c : z) sup = std::max(sup, c < 0 ? -c : c);
      if (sup == r) consider(z);
      if (out.digits.size() == want) break;
      std::size_t i = d;
      while (i > 0 && z[i - 1] == -r) {
        z[i - 1] = r;
        --i;
      }
      if (i == 0) break;
      --z[i - 1];
    }
  }
  if (out.digits.size() != want) {
    throw Error(ErrorKind::kInternal,
                "digit scan found " + std::to_string(out.digits.size()) +
                    " cosets, expected " + std::to_string(want));
  }
  return out;
}

DigitSet MakeDigitSet(const ExpandingMatrix& a, std::vector<IntVector> digits) {
  if (digits.size() != a.q()) {
    throw Error(ErrorKind::kBadInput, "digit set must have exactly q members");
  }
  std::set<IntVector> seen;
  for (const auto& g : digits) {
    if (g.size() != a.dim()) {
      throw Error(ErrorKind::kDimensionMismatch, "digit dimension");
    }
    if (!seen.insert(CosetKey(a, g)).second) {
      throw Error(ErrorKind::kBadInput, "two digits share a coset");
    }
  }
  return DigitSet{a, std::move(digits)};
}

IntVector ToIntVector(const std::vector<long long>& v) {
  return IntVector(v.begin(), v.end());
}

std::vector<double> ToDouble(const IntVector& v) {
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& c : v) out.push_back(static_cast<double>(c));
  return out;
}

}  // namespace toral
