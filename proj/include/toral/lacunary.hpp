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
#include <optional>
#include <string>
#include <vector>

#include "toral/lattice.hpp"
#include "toral/spectral.hpp"

namespace toral {

enum class CoefficientFamily { kPower, kLogPower, kGeometric, kExplicit };

CoefficientFamily ParseFamily(const std::string& name);
std::string FamilyName(CoefficientFamily family);

// H(x) = sum_{k >= 1} a_k e^{2 pi i <A*^k h, x>}.
struct LacunarySpec {
  ExpandingMatrix matrix;
  IntVector h;
  CoefficientFamily family = CoefficientFamily::kGeometric;
  // alpha (power), beta (logpower) or theta (geometric).
  double parameter = 0.0;
  // a_1, a_2, ... for the explicit family.
  std::vector<double> coefficients;
  // Number of terms; unset means the infinite series.
  std::optional<std::size_t> truncation;

  // a_k for k >= 1; zero past the truncation or the explicit list.
  double Coefficient(std::size_t k) const;
  // Index of the last possibly nonzero term, if finite.
  std::optional<std::size_t> LastTerm() const;
};

// Checks h != 0 and the family's summability range; throws kBadInput.
LacunarySpec MakeLacunarySpec(const ExpandingMatrix& matrix, IntVector h,
                              CoefficientFamily family, double parameter,
                              std::optional<std::size_t> truncation = {});
LacunarySpec MakeExplicitSpec(const ExpandingMatrix& matrix, IntVector h,
                              std::vector<double> coefficients);

inline constexpr std::size_t kMaxDefaultTruncation = 100'000;
inline constexpr double kTruncationRelativeTail = 1e-10;

// Smallest K with sum_{k>K} a_k < 1e-10 sum_k a_k, capped at 10^5.
std::size_t DefaultTruncation(const LacunarySpec& spec);

inline constexpr double kMaxFrequencyBits = 1u << 28;

// The truncated series (truncation or DefaultTruncation terms).
TrigPolynomial LacunaryBuild(const LacunarySpec& spec);

struct TailNorms {
  double l2 = 0.0;  // sqrt(sum_{k>n} a_k^2)
  double l1 = 0.0;  // sum_{k>n} a_k
};

TailNorms LacunaryTailNorms(const LacunarySpec& spec, std::size_t n);
// Entries n = 0..n_max.
std::vector<TailNorms> LacunaryTailNormsRange(const LacunarySpec& spec,
                                              std::size_t n_max);

struct Prop2Bounds {
  double constant = 0.0;  // 2 pi |h|
  double sup_bound = 0.0;
  double l2_bound_squared = 0.0;
  double l2_bound = 0.0;
};

// C lambda^{-n} sum_{k<=n} a_k lambda^k + sum_{k>n} a_k, and the squared
// analogue for the L2 modulus. Requires a similarity matrix.
Prop2Bounds ModulusBoundsProp2(const LacunarySpec& spec, std::size_t n);

enum class DesignNorm { kSup, kL2 };

// Coefficients a_1..a_{N+1} whose tails after n equal targets[n-1]
// (delta_0 = 1); the final coefficient carries the remaining mass delta_N.
std::vector<double> DesignForRate(const std::vector<double>& targets,
                                  DesignNorm norm);

}  // namespace toral
