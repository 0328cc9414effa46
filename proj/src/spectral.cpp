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


#include "toral/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/distributions/normal.hpp>

#include "json.hpp"
#include "toral/error.hpp"
#include "toral/parallel.hpp"
#include "toral/tiling.hpp"

namespace toral {
namespace {

using Complex = std::complex<double>;

const Integer& TwoTo64() {
  static const Integer value = Integer(1) << 64;
  return value;
}

std::uint64_t Mod64(const Integer& k) {
  Integer m = k % TwoTo64();
  if (m < 0) m += TwoTo64();
  return m.convert_to<std::uint64_t>();
}

IntVector Negated(const IntVector& k) {
  IntVector out(k.size());
  for (std::size_t i = 0; i < k.size(); ++i) out[i] = -k[i];
  return out;
}

Complex UnitPhase(std::uint64_t phase) {
  const double t = 2.0 * std::numbers::pi * FixedToSignedUnit(phase);
  return {std::cos(t), std::sin(t)};
}

// Maximizes g on [lo, hi] by golden-section search; returns the best point
// seen (including the bracket ends).
template <typename G>
double GoldenMax(G&& g, double lo, double hi, int iterations, double* best) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double x1 = b - r * (b - a), x2 = a + r * (b - a);
  double f1 = g(x1), f2 = g(x2);
  double arg = x1;
  *best = f1;
  auto consider = [&](double x, double v) {
    if (v > *best) {
      *best = v;
      arg = x;
    }
  };
  consider(x2, f2);
  for (int i = 0; i < iterations; ++i) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + r * (b - a);
      f2 = g(x2);
      consider(x2, f2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - r * (b - a);
      f1 = g(x1);
      consider(x1, f1);
    }
  }
  return arg;
}

SupNormBracket GridSup(const Evaluator& e, double max_frequency,
                       double l1_upper, unsigned threads) {
  SupNormBracket out;
  out.upper = l1_upper;
  const std::size_t d = e.dim();
  out.argmax.assign(d, 0.0);
  if (e.size() == 0) return out;
  // A power-of-two grid turns every phase <k, j/n> into the exact index
  // <k mod n, j> mod n of an n-th root of unity.
  double per_dim = 16.0;
  while (per_dim < 8.0 * max_frequency) per_dim *= 2.0;
  const double total = std::pow(per_dim, static_cast<double>(d));
  if (total * static_cast<double>(e.size()) > kMaxGridWork) {
    throw Error(ErrorKind::kTooLarge,
                "sup-norm grid of " + std::to_string(total) + " points x " +
                    std::to_string(e.size()) + " terms exceeds the work guard");
  }
  const std::size_t n = static_cast<std::size_t>(per_dim);
  const std::size_t mask = n - 1;
  out.grid_per_dim = n;
  std::vector<Complex> roots(n);
  for (std::size_t m = 0; m < n; ++m) {
    const double t = 2.0 * std::numbers::pi * static_cast<double>(m) / per_dim;
    roots[m] = {std::cos(t), std::sin(t)};
  }
  std::vector<std::size_t> kmod(e.size() * d);
  for (std::size_t t = 0; t < e.size(); ++t) {
    for (std::size_t i = 0; i < d; ++i) {
      kmod[t * d + i] = static_cast<std::size_t>(e.frequency(t, i)) & mask;
    }
  }
  const std::size_t points = static_cast<std::size_t>(total);
  // Rows along the first coordinate are independent work units.
  const std::size_t rows = n;
  const std::size_t row_len = points / rows;
  std::vector<double> row_best(rows, -1.0);
  std::vector<std::size_t> row_arg(rows, 0);
  ParallelFor(rows, threads, [&](std::size_t r) {
    std::vector<std::size_t> j(d);
    for (std::size_t c = 0; c < row_len; ++c) {
      std::size_t idx = r * row_len + c;
      for (std::size_t i = d; i-- > 0;) {
        j[i] = idx & mask;
        idx /= n;
      }
      Complex s{};
      for (std::size_t t = 0; t < e.size(); ++t) {
        std::size_t p = 0;
        for (std::size_t i = 0; i < d; ++i) p += kmod[t * d + i] * j[i];
        s += e.coefficient(t) * roots[p & mask];
      }
      const double v = std::abs(s);
      if (v > row_best[r]) {
        row_best[r] = v;
        row_arg[r] = r * row_len + c;
      }
    }
  });
  std::size_t best_row = 0;
  for (std::size_t r = 1; r < rows; ++r) {
    if (row_best[r] > row_best[best_row]) best_row = r;
  }
  std::vector<double> arg(d);
  {
    std::size_t idx = row_arg[best_row];
    for (std::size_t c = d; c-- > 0;) {
      arg[c] = static_cast<double>(idx % n) / per_dim;
      idx /= n;
    }
  }
  double best = row_best[best_row];
  const double h = 1.0 / per_dim;
  for (int sweep = 0; sweep < 3; ++sweep) {
    for (std::size_t c = 0; c < d; ++c) {
      std::vector<double> y = arg;
      auto g = [&](double t) {
        y[c] = t;
        return std::abs(e(y));
      };
      double v = 0.0;
      const double t = GoldenMax(g, arg[c] - h, arg[c] + h, 50, &v);
      if (v > best) {
        best = v;
        arg[c] = t;
      }
    }
  }
  out.lower = std::min(best, l1_upper);
  out.argmax = arg;
  return out;
}

std::vector<std::vector<double>> SphereDirections(std::size_t d,
                                                  std::size_t count) {
  std::vector<std::vector<double>> dirs;
  if (d == 2) {
    for (std::size_t j = 0; j < count; ++j) {
      const double t = 2.0 * std::numbers::pi * static_cast<double>(j) /
                       static_cast<double>(count);
      dirs.push_back({std::cos(t), std::sin(t)});
    }
    return dirs;
  }
  for (std::size_t i = 0; i < d && dirs.size() < count; ++i) {
    for (double s : {1.0, -1.0}) {
      std::vector<double> u(d, 0.0);
      u[i] = s;
      dirs.push_back(u);
    }
  }
  static constexpr double kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19};
  const boost::math::normal normal;
  for (std::size_t j = 1; dirs.size() < count; ++j) {
    std::vector<double> u(d);
    double len = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      const double alpha = std::sqrt(kPrimes[i % 8]) + static_cast<double>(i / 8);
      double t = static_cast<double>(j) * alpha;
      t -= std::floor(t);
      u[i] = boost::math::quantile(normal, std::clamp(t, 1e-12, 1.0 - 1e-12));
      len += u[i] * u[i];
    }
    len = std::sqrt(len);
    for (double& c : u) c /= len;
    dirs.push_back(u);
  }
  return dirs;
}

class ShiftObjective {
 public:
  ShiftObjective(const TrigPolynomial& f, NormKind norm)
      : evaluator_(f), norm_(norm) {
    max_frequency_ = f.MaxFrequency().convert_to<double>();
    for (std::size_t t = 0; t < evaluator_.size(); ++t) {
      weights_.push_back(4.0 * std::norm(evaluator_.coefficient(t)));
    }
  }

  double max_frequency() const { return max_frequency_; }

  double operator()(std::span<const double> v) const {
    std::vector<std::uint64_t> fv(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) fv[i] = ToFixedPoint(v[i]);
    if (norm_ == NormKind::kL2) {
      double s = 0.0;
      for (std::size_t t = 0; t < weights_.size(); ++t) {
        const double sn =
            std::sin(std::numbers::pi *
                     FixedToSignedUnit(evaluator_.Phase(t, fv)));
        s += weights_[t] * sn * sn;
      }
      return std::sqrt(s);
    }
    double l1 = 0.0;
    // Difference polynomial f(. + v) - f, built on the evaluator's terms.
    Evaluator shifted = evaluator_.WithCoefficients([&](std::size_t t) {
      const Complex c =
          evaluator_.coefficient(t) * (UnitPhase(evaluator_.Phase(t, fv)) -
                                       Complex(1.0, 0.0));
      l1 += std::abs(c);
      return c;
    });
    return GridSup(shifted, max_frequency_, l1, 1).lower;
  }

 private:
  Evaluator evaluator_;
  NormKind norm_;
  double max_frequency_ = 0.0;
  std::vector<double> weights_;
};

}  // namespace

TrigPolynomial TrigPolynomial::Constant(std::size_t dim, Complex c) {
  TrigPolynomial f(dim);
  f.Set(IntVector(dim, Integer(0)), c);
  if (c.imag() == 0.0) f.real_ = true;
  return f;
}

void TrigPolynomial::Add(const IntVector& k, Complex c) {
  if (k.size() != dim_) {
    throw Error(ErrorKind::kDimensionMismatch,
                "frequency has " + std::to_string(k.size()) +
                    " entries, polynomial dimension is " +
                    std::to_string(dim_));
  }
  Set(k, Coefficient(k) + c);
}

void TrigPolynomial::Set(const IntVector& k, Complex c) {
  if (k.size() != dim_) {
    throw Error(ErrorKind::kDimensionMismatch,
                "frequency has " + std::to_string(k.size()) +
                    " entries, polynomial dimension is " +
                    std::to_string(dim_));
  }
  if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
    throw Error(ErrorKind::kBadInput, "non-finite coefficient");
  }
  real_ = false;
  if (std::abs(c) < kPruneThreshold) {
    coeffs_.erase(k);
  } else {
    coeffs_[k] = c;
  }
}

Complex TrigPolynomial::Coefficient(const IntVector& k) const {
  auto it = coeffs_.find(k);
  return it == coeffs_.end() ? Complex{} : it->second;
}

Complex TrigPolynomial::Mean() const {
  return Coefficient(IntVector(dim_, Integer(0)));
}

TrigPolynomial TrigPolynomial::Centered() const {
  TrigPolynomial g = *this;
  g.coeffs_.erase(IntVector(dim_, Integer(0)));
  return g;
}

bool TrigPolynomial::SatisfiesRealSymmetry(double tol) const {
  double scale = 0.0;
  for (const auto& [k, c] : coeffs_) scale = std::max(scale, std::abs(c));
  for (const auto& [k, c] : coeffs_) {
    if (std::abs(Coefficient(Negated(k)) - std::conj(c)) > tol * scale) {
      return false;
    }
  }
  return true;
}

void TrigPolynomial::MarkReal(double tol) {
  if (!SatisfiesRealSymmetry(tol)) {
    throw Error(ErrorKind::kBadInput,
                "coefficients are not conjugate-symmetric");
  }
  real_ = true;
}

Integer TrigPolynomial::MaxFrequency() const {
  Integer m = 0;
  for (const auto& [k, c] : coeffs_) {
    for (const auto& e : k) m = std::max<Integer>(m, abs(e));
  }
  return m;
}

double TrigPolynomial::L1Coefficients() const {
  double s = 0.0;
  for (const auto& [k, c] : coeffs_) s += std::abs(c);
  return s;
}

Complex TrigPolynomial::operator()(std::span<const double> x) const {
  return Evaluator(*this)(x);
}

std::string TrigPolynomial::ToJson() const {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const auto& [k, c] : coeffs_) {
    nlohmann::ordered_json freq = nlohmann::ordered_json::array();
    for (const auto& e : k) {
      if (e >= std::numeric_limits<long long>::min() &&
          e <= std::numeric_limits<long long>::max()) {
        freq.push_back(e.convert_to<long long>());
      } else {
        freq.push_back(e.str());
      }
    }
    out.push_back({{"k", freq}, {"re", c.real()}, {"im", c.imag()}});
  }
  return out.dump();
}

TrigPolynomial TrigPolynomial::FromJson(const std::string& text,
                                        std::size_t dim) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kBadInput,
                std::string("malformed polynomial JSON: ") + e.what());
  }
  if (!doc.is_array()) {
    throw Error(ErrorKind::kBadInput, "polynomial JSON must be a list");
  }
  if (dim == 0) {
    if (doc.empty() || !doc[0].contains("k") || !doc[0]["k"].is_array()) {
      throw Error(ErrorKind::kBadInput,
                  "cannot infer dimension from polynomial JSON");
    }
    dim = doc[0]["k"].size();
  }
  TrigPolynomial f(dim);
  for (const auto& entry : doc) {
    if (!entry.is_object() || !entry.contains("k") || !entry["k"].is_array()) {
      throw Error(ErrorKind::kBadInput, "polynomial entry needs a \"k\" list");
    }
    IntVector k;
    for (const auto& e : entry["k"]) {
      if (e.is_number_integer()) {
        k.push_back(e.is_number_unsigned()
                        ? Integer(e.get<std::uint64_t>())
                        : Integer(e.get<std::int64_t>()));
      } else if (e.is_string()) {
        try {
          k.push_back(Integer(e.get<std::string>()));
        } catch (const std::exception&) {
          throw Error(ErrorKind::kBadInput,
                      "bad frequency entry " + e.get<std::string>());
        }
      } else {
        throw Error(ErrorKind::kBadInput, "frequency entries must be integers");
      }
    }
    auto number = [&](const char* key) {
      if (!entry.contains(key)) return 0.0;
      if (!entry[key].is_number()) {
        throw Error(ErrorKind::kBadInput,
                    std::string("\"") + key + "\" must be a number");
      }
      return entry[key].get<double>();
    };
    f.Add(k, Complex(number("re"), number("im")));
  }
  if (f.SatisfiesRealSymmetry()) f.real_ = true;
  return f;
}

TrigPolynomial operator+(const TrigPolynomial& a, const TrigPolynomial& b) {
  TrigPolynomial out = a;
  for (const auto& [k, c] : b.coeffs_) out.Add(k, c);
  out.real_ = a.real_ && b.real_;
  return out;
}

TrigPolynomial operator*(Complex s, const TrigPolynomial& f) {
  TrigPolynomial out(f.dim_);
  for (const auto& [k, c] : f.coeffs_) out.Set(k, s * c);
  out.real_ = f.real_ && s.imag() == 0.0;
  return out;
}

std::uint64_t ToFixedPoint(double x) {
  const long double t = static_cast<long double>(x) - std::floor(
                                                          static_cast<long double>(x));
  const long double s = std::ldexp(t, 64);
  if (!(s < 0x1p64L)) return 0;
  return static_cast<std::uint64_t>(s);
}

double FixedToSignedUnit(std::uint64_t phase) {
  return std::ldexp(static_cast<double>(static_cast<std::int64_t>(phase)), -64);
}

Evaluator::Evaluator(const TrigPolynomial& f) : dim_(f.dim()) {
  freq_.reserve(f.size() * dim_);
  coeffs_.reserve(f.size());
  for (const auto& [k, c] : f.coeffs()) {
    for (const auto& e : k) freq_.push_back(Mod64(e));
    coeffs_.push_back(c);
  }
}

std::uint64_t Evaluator::Phase(std::size_t t,
                               std::span<const std::uint64_t> x) const {
  std::uint64_t p = 0;
  const std::uint64_t* k = freq_.data() + t * dim_;
  for (std::size_t i = 0; i < dim_; ++i) p += k[i] * x[i];
  return p;
}

Complex Evaluator::AtFixed(std::span<const std::uint64_t> x) const {
  Complex s{};
  for (std::size_t t = 0; t < coeffs_.size(); ++t) {
    s += coeffs_[t] * UnitPhase(Phase(t, x));
  }
  return s;
}

Complex Evaluator::operator()(std::span<const double> x) const {
  if (x.size() != dim_) {
    throw Error(ErrorKind::kDimensionMismatch,
                "point has " + std::to_string(x.size()) +
                    " coordinates, polynomial dimension is " +
                    std::to_string(dim_));
  }
  std::vector<std::uint64_t> fx(dim_);
  for (std::size_t i = 0; i < dim_; ++i) fx[i] = ToFixedPoint(x[i]);
  return AtFixed(fx);
}

TrigPolynomial TransferFourier(const TrigPolynomial& f,
                               const ExpandingMatrix& a, unsigned n) {
  if (f.dim() != a.dim()) {
    throw Error(ErrorKind::kDimensionMismatch,
                "polynomial and matrix dimensions differ");
  }
  if (n == 0) return f;
  const IntegralSolver solver(a.adjoint().Power(n));
  TrigPolynomial g(f.dim());
  for (const auto& [j, c] : f.coeffs()) {
    if (auto k = solver.Solve(j)) g.Set(*k, c);
  }
  if (f.real()) g.MarkReal();
  return g;
}

Complex TransferSpatialEval(const TrigPolynomial& f, const DigitSet& digits,
                            unsigned n, std::span<const double> x) {
  const std::size_t d = digits.matrix.dim();
  if (f.dim() != d || x.size() != d) {
    throw Error(ErrorKind::kDimensionMismatch,
                "polynomial, point and matrix dimensions differ");
  }
  const Evaluator e(f);
  if (n == 0) return e(x);
  const Integer branches = pow(Integer(digits.size()), n);
  if (branches > kMaxSpatialTerms) {
    throw Error(ErrorKind::kTooLarge,
                "q^n = " + branches.str() + " preimages exceed the guard of " +
                    std::to_string(kMaxSpatialTerms));
  }
  const TileApproximation tile = TilePoints(digits, n);
  const Eigen::MatrixXd inv = digits.matrix.InversePower(n);
  const Eigen::VectorXd base =
      inv * Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<long>(d));
  std::vector<double> y(d);
  Complex s{};
  for (std::size_t i = 0; i < tile.size(); ++i) {
    auto b = tile.point(i);
    for (std::size_t c = 0; c < d; ++c) y[c] = base[static_cast<long>(c)] + b[c];
    s += e(y);
  }
  return s / static_cast<double>(tile.size());
}

double NormL2(const TrigPolynomial& f) {
  double s = 0.0;
  for (const auto& [k, c] : f.coeffs()) s += std::norm(c);
  return std::sqrt(s);
}

SupNormBracket NormSup(const TrigPolynomial& f, unsigned threads) {
  return GridSup(Evaluator(f), f.MaxFrequency().convert_to<double>(),
                 f.L1Coefficients(), threads);
}

double ShiftL2(const TrigPolynomial& f, std::span<const double> v) {
  if (v.size() != f.dim()) {
    throw Error(ErrorKind::kDimensionMismatch, "shift dimension differs");
  }
  return ShiftObjective(f, NormKind::kL2)(v);
}

ModulusCurve Modulus(const TrigPolynomial& f, NormKind norm,
                     const std::vector<double>& radii, unsigned threads) {
  for (double r : radii) {
    if (!(r > 0.0) || !std::isfinite(r)) {
      throw Error(ErrorKind::kBadInput, "modulus radii must be positive");
    }
  }
  const std::size_t d = f.dim();
  ModulusCurve curve;
  curve.radii = radii;
  curve.values.assign(radii.size(), 0.0);
  curve.norm = norm;
  const ShiftObjective objective(f.Centered(), norm);
  if (f.Centered().empty()) return curve;

  if (d == 1) {
    curve.direction_count = 1;
    for (std::size_t i = 0; i < radii.size(); ++i) {
      const double reach = std::min(radii[i], 0.5);
      const std::size_t steps = static_cast<std::size_t>(std::clamp(
          std::ceil(8.0 * objective.max_frequency() * reach), 64.0,
          static_cast<double>(1 << 20)));
      curve.radius_count = std::max(curve.radius_count, steps);
      std::vector<double> vals(steps);
      ParallelFor(steps, threads, [&](std::size_t s) {
        const double v = reach * static_cast<double>(s + 1) /
                         static_cast<double>(steps);
        vals[s] = objective(std::span<const double>(&v, 1));
      });
      const std::size_t best = static_cast<std::size_t>(
          std::max_element(vals.begin(), vals.end()) - vals.begin());
      const double h = reach / static_cast<double>(steps);
      const double centre = reach * static_cast<double>(best + 1) /
                            static_cast<double>(steps);
      double refined = 0.0;
      GoldenMax(
          [&](double v) { return objective(std::span<const double>(&v, 1)); },
          std::max(0.0, centre - h), std::min(reach, centre + h), 60,
          &refined);
      curve.refinement_steps = 60;
      curve.values[i] = std::max(vals[best], refined);
    }
  } else {
    constexpr std::size_t kDirections = 64;
    constexpr std::size_t kRadii = 32;
    curve.direction_count = kDirections;
    curve.radius_count = kRadii;
    const auto dirs = SphereDirections(d, kDirections);
    for (std::size_t i = 0; i < radii.size(); ++i) {
      const double delta = radii[i];
      std::vector<double> vals(kDirections * kRadii);
      ParallelFor(vals.size(), threads, [&](std::size_t c) {
        const double r = delta * static_cast<double>(c % kRadii + 1) /
                         static_cast<double>(kRadii);
        std::vector<double> v(d);
        for (std::size_t j = 0; j < d; ++j) v[j] = r * dirs[c / kRadii][j];
        vals[c] = objective(v);
      });
      const std::size_t best = static_cast<std::size_t>(
          std::max_element(vals.begin(), vals.end()) - vals.begin());
      std::vector<double> v(d);
      for (std::size_t j = 0; j < d; ++j) {
        v[j] = delta * static_cast<double>(best % kRadii + 1) /
               static_cast<double>(kRadii) * dirs[best / kRadii][j];
      }
      double value = vals[best];
      double step = delta / static_cast<double>(kRadii);
      std::size_t iterations = 0;
      while (step > delta * 1e-7 && iterations < 200) {
        ++iterations;
        bool moved = false;
        for (std::size_t j = 0; j < d && !moved; ++j) {
          for (double s : {step, -step}) {
            std::vector<double> w = v;
            w[j] += s;
            double len = 0.0;
            for (double c : w) len += c * c;
            len = std::sqrt(len);
            if (len > delta) {
              for (double& c : w) c *= delta / len;
            }
            const double val = objective(w);
            if (val > value) {
              value = val;
              v = w;
              moved = true;
              break;
            }
          }
        }
        if (!moved) step /= 2.0;
      }
      curve.refinement_steps = std::max(curve.refinement_steps, iterations);
      curve.values[i] = value;
    }
  }

  std::vector<std::size_t> order(radii.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return radii[a] < radii[b]; });
  double running = 0.0;
  for (std::size_t i : order) {
    running = std::max(running, curve.values[i]);
    curve.values[i] = running;
  }
  return curve;
}

}  // namespace toral
