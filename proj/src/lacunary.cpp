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


#include "toral/lacunary.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "toral/error.hpp"

namespace toral {
namespace {

// Terms summed directly past the last requested index before the
// Euler-Maclaurin remainder takes over.
constexpr std::size_t kDirectTerms = 20000;

class CompensatedSum {
 public:
  void Add(long double x) {
    const long double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  long double value() const { return sum_ + carry_; }

 private:
  long double sum_ = 0.0L;
  long double carry_ = 0.0L;
};

// sum_{k > N} phi(k) with phi = a^p, by the midpoint Euler-Maclaurin rule
// int_{N+1/2}^inf phi + phi'(N+1/2)/24.
long double InfiniteRemainder(const LacunarySpec& spec, std::size_t last,
                              int p) {
  const long double a = static_cast<long double>(last) + 0.5L;
  if (spec.family == CoefficientFamily::kPower) {
    const long double s = p * static_cast<long double>(spec.parameter);
    return std::pow(a, 1.0L - s) / (s - 1.0L) -
           s * std::pow(a, -s - 1.0L) / 24.0L;
  }
  const long double beta = spec.parameter;
  const long double u0 = std::log(a + 1.0L);
  long double integral = 0.0L;
  if (p == 1) {
    integral = std::pow(u0, 1.0L - beta) / (beta - 1.0L);
  } else {
    // u = log(t + 1): int_{u0}^inf e^{-u} u^{-2 beta} du.
    boost::math::quadrature::exp_sinh<double> integrator;
    const double b = static_cast<double>(beta);
    const double lo = static_cast<double>(u0);
    const double scaled = integrator.integrate(
        [&](double s) { return std::exp(-s) * std::pow(1.0 + s / lo, -2.0 * b); },
        0.0, std::numeric_limits<double>::infinity());
    integral = std::exp(-u0) * std::pow(u0, -2.0L * beta) * scaled;
  }
  const long double derivative = -p * std::pow(a + 1.0L, -p - 1.0L) *
                                 std::pow(u0, -p * beta) * (1.0L + beta / u0);
  return integral + derivative / 24.0L;
}

}  // namespace

CoefficientFamily ParseFamily(const std::string& name) {
  if (name == "power") return CoefficientFamily::kPower;
  if (name == "logpower") return CoefficientFamily::kLogPower;
  if (name == "geometric") return CoefficientFamily::kGeometric;
  if (name == "explicit") return CoefficientFamily::kExplicit;
  throw Error(ErrorKind::kBadInput, "unknown coefficient family '" + name +
                                        "' (power, logpower, geometric, explicit)");
}

std::string FamilyName(CoefficientFamily family) {
  switch (family) {
    case CoefficientFamily::kPower:
      return "power";
    case CoefficientFamily::kLogPower:
      return "logpower";
    case CoefficientFamily::kGeometric:
      return "geometric";
    case CoefficientFamily::kExplicit:
      return "explicit";
  }
  return "unknown";
}

double LacunarySpec::Coefficient(std::size_t k) const {
  if (k == 0 || (truncation && k > *truncation)) return 0.0;
  const double x = static_cast<double>(k);
  switch (family) {
    case CoefficientFamily::kPower:
      return std::pow(x, -parameter);
    case CoefficientFamily::kLogPower:
      // Shifted by one so that a_1 is finite.
      return 1.0 / ((x + 1.0) * std::pow(std::log(x + 1.0), parameter));
    case CoefficientFamily::kGeometric:
      return std::pow(parameter, x);
    case CoefficientFamily::kExplicit:
      return k <= coefficients.size() ? coefficients[k - 1] : 0.0;
  }
  return 0.0;
}

std::optional<std::size_t> LacunarySpec::LastTerm() const {
  if (family == CoefficientFamily::kExplicit) {
    return truncation ? std::min(*truncation, coefficients.size())
                      : coefficients.size();
  }
  return truncation;
}

LacunarySpec MakeLacunarySpec(const ExpandingMatrix& matrix, IntVector h,
                              CoefficientFamily family, double parameter,
                              std::optional<std::size_t> truncation) {
  if (h.size() != matrix.dim()) {
    throw Error(ErrorKind::kDimensionMismatch,
                "h has " + std::to_string(h.size()) + " entries, matrix is " +
                    std::to_string(matrix.dim()) + "x" +
                    std::to_string(matrix.dim()));
  }
  bool zero = true;
  for (const auto& e : h) zero = zero && e == 0;
  if (zero) throw Error(ErrorKind::kBadInput, "h must be nonzero");
  const std::string p = std::to_string(parameter);
  switch (family) {
    case CoefficientFamily::kPower:
      if (!(parameter > 1.0)) {
        throw Error(ErrorKind::kBadInput, "power family needs alpha > 1, got " + p);
      }
      break;
    case CoefficientFamily::kLogPower:
      if (!(parameter > 1.0)) {
        throw Error(ErrorKind::kBadInput,
                    "logpower family needs beta > 1, got " + p);
      }
      break;
    case CoefficientFamily::kGeometric:
      if (!(parameter > 1.0 / matrix.lambda_min() && parameter < 1.0)) {
        throw Error(ErrorKind::kBadInput,
                    "geometric family needs 1/lambda < theta < 1, got " + p +
                        " with 1/lambda = " +
                        std::to_string(1.0 / matrix.lambda_min()));
      }
      break;
    case CoefficientFamily::kExplicit:
      break;
  }
  LacunarySpec spec;
  spec.matrix = matrix;
  spec.h = std::move(h);
  spec.family = family;
  spec.parameter = parameter;
  spec.truncation = truncation;
  return spec;
}

LacunarySpec MakeExplicitSpec(const ExpandingMatrix& matrix, IntVector h,
                              std::vector<double> coefficients) {
  for (double a : coefficients) {
    if (!(a >= 0.0) || !std::isfinite(a)) {
      throw Error(ErrorKind::kBadInput,
                  "explicit coefficients must be finite and non-negative");
    }
  }
  LacunarySpec spec =
      MakeLacunarySpec(matrix, std::move(h), CoefficientFamily::kExplicit, 0.0);
  spec.coefficients = std::move(coefficients);
  return spec;
}

std::vector<TailNorms> LacunaryTailNormsRange(const LacunarySpec& spec,
                                              std::size_t n_max) {
  std::vector<TailNorms> out(n_max + 1);
  const auto last = spec.LastTerm();
  if (!last && spec.family == CoefficientFamily::kGeometric) {
    const double t = spec.parameter;
    for (std::size_t n = 0; n <= n_max; ++n) {
      const double head = std::pow(t, static_cast<double>(n + 1));
      out[n] = {head / std::sqrt(1.0 - t * t), head / (1.0 - t)};
    }
    return out;
  }
  const std::size_t end = last ? *last : n_max + kDirectTerms;
  CompensatedSum s1, s2;
  if (!last) {
    s1.Add(InfiniteRemainder(spec, end, 1));
    s2.Add(InfiniteRemainder(spec, end, 2));
  }
  // After the step for k the sums hold sum_{j >= k}, the tail after k - 1.
  for (std::size_t k = std::max(end, n_max + 1); k >= 1; --k) {
    if (k <= end) {
      const long double a = spec.Coefficient(k);
      s1.Add(a);
      s2.Add(a * a);
    }
    if (k - 1 <= n_max) {
      out[k - 1] = {static_cast<double>(std::sqrt(std::max(0.0L, s2.value()))),
                    static_cast<double>(s1.value())};
    }
  }
  return out;
}

TailNorms LacunaryTailNorms(const LacunarySpec& spec, std::size_t n) {
  return LacunaryTailNormsRange(spec, n)[n];
}

std::size_t DefaultTruncation(const LacunarySpec& spec) {
  if (auto last = spec.LastTerm()) return *last;
  if (spec.family == CoefficientFamily::kGeometric) {
    std::size_t k = 0;
    while (k < kMaxDefaultTruncation &&
           !(std::pow(spec.parameter, static_cast<double>(k)) <
             kTruncationRelativeTail)) {
      ++k;
    }
    return k;
  }
  const auto tails = LacunaryTailNormsRange(spec, kMaxDefaultTruncation);
  const double total = tails[0].l1;
  for (std::size_t k = 0; k < tails.size(); ++k) {
    if (tails[k].l1 < kTruncationRelativeTail * total) return k;
  }
  return kMaxDefaultTruncation;
}

TrigPolynomial LacunaryBuild(const LacunarySpec& spec) {
  const std::size_t terms =
      spec.truncation ? *spec.truncation : DefaultTruncation(spec);
  TrigPolynomial out(spec.matrix.dim());
  IntVector freq = spec.h;
  double bits = 0.0;
  for (std::size_t k = 1; k <= terms; ++k) {
    freq = spec.matrix.adjoint() * freq;
    for (const auto& e : freq) {
      if (e != 0) bits += static_cast<double>(msb(abs(e)) + 1);
    }
    if (bits > kMaxFrequencyBits) {
      throw Error(ErrorKind::kTooLarge,
                  "frequencies of " + std::to_string(terms) +
                      " lacunary terms exceed the storage guard; pass a "
                      "smaller truncation");
    }
    out.Add(freq, spec.Coefficient(k));
  }
  return out;
}

Prop2Bounds ModulusBoundsProp2(const LacunarySpec& spec, std::size_t n) {
  if (!spec.matrix.IsSimilarity()) {
    throw Error(ErrorKind::kNotSimilarity,
                "the modulus bound needs A^T A = c I; got " +
                    spec.matrix.matrix().ToString());
  }
  double h2 = 0.0;
  for (const auto& e : spec.h) {
    const double x = e.convert_to<double>();
    h2 += x * x;
  }
  Prop2Bounds b;
  b.constant = 2.0 * std::numbers::pi * std::sqrt(h2);
  const double lambda = spec.matrix.lambda_min();
  CompensatedSum head1, head2;
  for (std::size_t k = 1; k <= n; ++k) {
    const long double a = spec.Coefficient(k);
    const long double w = std::pow(static_cast<long double>(lambda),
                                   static_cast<long double>(k) -
                                       static_cast<long double>(n));
    head1.Add(a * w);
    head2.Add(a * a * w * w);
  }
  const TailNorms tail = LacunaryTailNorms(spec, n);
  b.sup_bound = b.constant * static_cast<double>(head1.value()) + tail.l1;
  b.l2_bound_squared = b.constant * b.constant *
                           static_cast<double>(head2.value()) +
                       tail.l2 * tail.l2;
  b.l2_bound = std::sqrt(b.l2_bound_squared);
  return b;
}

std::vector<double> DesignForRate(const std::vector<double>& targets,
                                  DesignNorm norm) {
  if (targets.empty()) {
    throw Error(ErrorKind::kBadInput, "design needs at least one target");
  }
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (!(targets[i] > 0.0 && targets[i] < 1.0)) {
      throw Error(ErrorKind::kBadInput,
                  "target " + std::to_string(i + 1) + " = " +
                      std::to_string(targets[i]) + " is outside (0, 1)");
    }
    if (i > 0 && targets[i] > targets[i - 1]) {
      throw Error(ErrorKind::kNotDecreasing,
                  "target " + std::to_string(i + 1) + " exceeds target " +
                      std::to_string(i));
    }
  }
  std::vector<double> a;
  a.reserve(targets.size() + 1);
  long double previous = 1.0L;
  for (double t : targets) {
    const long double d = t;
    a.push_back(static_cast<double>(
        norm == DesignNorm::kSup
            ? previous - d
            : std::sqrt((previous - d) * (previous + d))));
    previous = d;
  }
  a.push_back(targets.back());
  return a;
}

}  // namespace toral
