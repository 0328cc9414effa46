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

// Approximation of the self-affine tile T = U_{g in D} A^{-1}(T + g) by the
// level-n point cloud {b_g = S_g 0 : g in D^n}, with checks of the
// subdivision identity and of the Z^d tiling property.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "toral/lattice.hpp"

namespace toral {

// Largest singular value.
double OperatorNorm(const Eigen::MatrixXd& m);

// Upper bound on sum_{k>=1} ||A^{-k}||, including a rigorous tail estimate.
double InverseNormSeries(const ExpandingMatrix& a);

struct TileApproximation {
  DigitSet digits;
  unsigned level = 0;
  // q^level points, row-major with dim() coordinates each.
  std::vector<double> points;
  // Upper bound on diam(A^{-level} T); every point of the cell T_g lies
  // within this distance of b_g.
  double cell_radius = 0.0;
  // T lies in the ball of this radius around 0.
  double attractor_radius = 0.0;
  // Upper bound on diam T.
  double diameter_bound = 0.0;

  std::size_t dim() const { return digits.matrix.dim(); }
  std::size_t size() const { return points.size() / dim(); }
  std::span<const double> point(std::size_t i) const {
    return {points.data() + i * dim(), dim()};
  }
  // Euclidean diameter of the axis-aligned bounding box of the cloud.
  double BoundingBoxDiameter() const;
};

inline constexpr std::size_t kMaxTilePoints = 10'000'000;

// Throws Error{kTooLarge} when q^level exceeds kMaxTilePoints.
TileApproximation TilePoints(const DigitSet& digits, unsigned level);

struct CoverageStats {
  std::size_t samples = 0;
  // histogram[c] = number of samples covered by exactly c lattice translates.
  std::vector<std::size_t> histogram;
  long long window = 0;  // translates k with |k|_inf <= window were tested
  bool degenerate = false;

  double FractionWithCount(std::size_t count) const;
};

// Monte Carlo estimate of sum_k 1_T(x - k) for uniform x in [0,1)^d, with
// approximate membership "within cell_radius of some b_g". Sample i draws
// from substream i of `seed`, so the histogram does not depend on `threads`.
CoverageStats CheckTiling(const TileApproximation& tile, std::size_t samples,
                          std::uint64_t seed, unsigned threads = 1);

// Fraction of level-n points not reproduced (to 1e-12 per coordinate) by
// applying every S_g to an independently computed level-(n-1) cloud.
double CheckSelfAffinity(const TileApproximation& tile);

}  // namespace toral
