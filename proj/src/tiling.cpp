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

#include "toral/tiling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "toral/error.hpp"
#include "toral/parallel.hpp"
#include "toral/rng.hpp"

namespace toral {
namespace {

std::uint64_t MixCell(const std::vector<long long>& cell) {
  std::uint64_t h = 0x9E3779B97F4A7C15ull;
  for (long long c : cell) {
    h ^= static_cast<std::uint64_t>(c) + 0x9E3779B97F4A7C15ull + (h << 6) +
         (h >> 2);
    h *= 0xBF58476D1CE4E5B9ull;
  }
  return h;
}

class PointIndex {
 public:
  PointIndex(const TileApproximation& tile, double cell)
      : tile_(tile), cell_(cell) {
    std::vector<long long> key(tile.dim());
    for (std::size_t i = 0; i < tile.size(); ++i) {
      auto p = tile.point(i);
      for (std::size_t j = 0; j < key.size(); ++j) {
        key[j] = static_cast<long long>(std::floor(p[j] / cell_));
      }
      buckets_[MixCell(key)].push_back(static_cast<std::uint32_t>(i));
    }
  }

  bool AnyWithin(std::span<const double> x, double radius) const {
    const std::size_t d = x.size();
    std::vector<long long> base(d), key(d);
    for (std::size_t j = 0; j < d; ++j) {
      base[j] = static_cast<long long>(std::floor(x[j] / cell_));
    }
    const double r2 = radius * radius;
    std::vector<int> offset(d, -1);
    while (true) {
      for (std::size_t j = 0; j < d; ++j) key[j] = base[j] + offset[j];
      if (auto it = buckets_.find(MixCell(key)); it != buckets_.end()) {
        for (std::uint32_t idx : it->second) {
          auto p = tile_.point(idx);
          double s = 0.0;
          for (std::size_t j = 0; j < d; ++j) s += (p[j] - x[j]) * (p[j] - x[j]);
          if (s <= r2) return true;
        }
      }
      std::size_t j = 0;
      while (j < d && offset[j] == 1) offset[j++] = -1;
      if (j == d) return false;
      ++offset[j];
    }
  }

 private:
  const TileApproximation& tile_;
  double cell_;
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> buckets_;
};

}  // namespace

double OperatorNorm(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()(0);
}

double InverseNormSeries(const ExpandingMatrix& a) {
  const Eigen::MatrixXd inv = a.InversePower(1);
  Eigen::MatrixXd power = inv;
  std::vector<double> norms;
  double sum = 0.0;
  // Find m with ||A^{-m}|| < 1, then bound the tail beyond K by
  // (sum_{r=1..m} ||A^{-(K+r)}||) / (1 - ||A^{-m}||).
  std::size_t contracting = 0;
  for (std::size_t k = 1; k <= 20000; ++k) {
    const double norm = OperatorNorm(power);
    norms.push_back(norm);
    if (contracting == 0 && norm < 0.5) contracting = k;
    if (contracting > 0 && k >= 2 * contracting && k >= 8 &&
        norm < 1e-18 * (sum + norm)) {
      break;
    }
    sum += norm;
    power = inv * power;
  }
  if (contracting == 0) {
    throw Error(ErrorKind::kTooLarge, "inverse powers contract too slowly");
  }
  const std::size_t k_last = norms.size();
  double window = 0.0;
  for (std::size_t r = 0; r < contracting && r < k_last; ++r) {
    window += norms[k_last - 1 - r];
  }
  return sum + window / (1.0 - norms[contracting - 1]);
}

double TileApproximation::BoundingBoxDiameter() const {
  double s = 0.0;
  for (std::size_t j = 0; j < dim(); ++j) {
    double lo = points[j], hi = points[j];
    for (std::size_t i = 0; i < size(); ++i) {
      lo = std::min(lo, point(i)[j]);
      hi = std::max(hi, point(i)[j]);
    }
    s += (hi - lo) * (hi - lo);
  }
  return std::sqrt(s);
}

TileApproximation TilePoints(const DigitSet& digits, unsigned level) {
  if (level < 1) throw Error(ErrorKind::kBadInput, "tile level must be >= 1");
  const ExpandingMatrix& a = digits.matrix;
  const std::size_t d = a.dim();
  const std::size_t q = digits.size();
  double count = std::pow(static_cast<double>(q), level);
  if (count > static_cast<double>(kMaxTilePoints)) {
    throw Error(ErrorKind::kTooLarge,
                "q^level = " + std::to_string(count) + " exceeds 1e7 points");
  }
  const std::size_t n_points = static_cast<std::size_t>(std::llround(count));

  // contribution[k][g] = A^{-(k+1)} digit_g
  std::vector<std::vector<Eigen::VectorXd>> contribution(level);
  for (unsigned k = 0; k < level; ++k) {
    const Eigen::MatrixXd inv = a.InversePower(k + 1);
    for (const auto& g : digits.digits) {
      const auto gd = ToDouble(g);
      contribution[k].push_back(
          inv * Eigen::Map<const Eigen::VectorXd>(gd.data(), d));
    }
  }

  TileApproximation tile{digits, level, {}, 0.0, 0.0, 0.0};
  tile.points.assign(n_points * d, 0.0);
  // gamma = (g_1, ..., g_n) has index sum_j g_j q^{j-1};
  // b_gamma = A^{-n} g_1 + ... + A^{-1} g_n.
  for (std::size_t idx = 0; idx < n_points; ++idx) {
    std::size_t rest = idx;
    double* out = tile.points.data() + idx * d;
    for (unsigned j = 0; j < level; ++j) {
      const std::size_t g = rest % q;
      rest /= q;
      const Eigen::VectorXd& c = contribution[level - 1 - j][g];
      for (std::size_t i = 0; i < d; ++i) out[i] += c[i];
    }
  }

  const double series = InverseNormSeries(a);
  tile.attractor_radius = series * digits.MaxNorm();
  tile.diameter_bound = series * digits.Diameter();
  tile.cell_radius = OperatorNorm(a.InversePower(level)) * tile.diameter_bound;
  return tile;
}

double CoverageStats::FractionWithCount(std::size_t count) const {
  if (samples == 0 || count >= histogram.size()) return 0.0;
  return static_cast<double>(histogram[count]) / static_cast<double>(samples);
}

CoverageStats CheckTiling(const TileApproximation& tile, std::size_t samples,
                          std::uint64_t seed, unsigned threads) {
  CoverageStats stats;
  stats.samples = samples;
  stats.window =
      static_cast<long long>(std::ceil(tile.attractor_radius)) + 1;
  if (samples == 0) return stats;

  const std::size_t d = tile.dim();
  const double radius = tile.cell_radius;
  const double reach = tile.attractor_radius + radius;
  const PointIndex index(tile, std::max(radius, 1e-300));
  const long long w = stats.window;

  std::vector<std::uint32_t> counts(samples, 0);
  ParallelFor(samples, threads, [&](std::size_t s) {
    CounterStream rng(seed, s);
    std::vector<double> x(d), y(d);
    for (auto& c : x) c = rng.NextUniform();
    std::vector<long long> k(d, -w);
    std::uint32_t hits = 0;
    while (true) {
      double norm2 = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        y[j] = x[j] - static_cast<double>(k[j]);
        norm2 += y[j] * y[j];
      }
      if (norm2 <= reach * reach && index.AnyWithin(y, radius)) ++hits;
      std::size_t j = 0;
      while (j < d && k[j] == w) k[j++] = -w;
      if (j == d) break;
      ++k[j];
    }
    counts[s] = hits;
  });

  const std::uint32_t top = *std::max_element(counts.begin(), counts.end());
  stats.histogram.assign(top + 1, 0);
  for (auto c : counts) ++stats.histogram[c];
  // A tile covers almost every point exactly once; flag clouds where that
  // fails for most samples.
  stats.degenerate = stats.FractionWithCount(1) < 0.5;
  return stats;
}

double CheckSelfAffinity(const TileApproximation& tile) {
  if (tile.level < 2) {
    throw Error(ErrorKind::kBadInput, "self-affinity check needs level >= 2");
  }
  constexpr double kTol = 1e-12;
  const std::size_t d = tile.dim();
  const TileApproximation coarse = TilePoints(tile.digits, tile.level - 1);
  const Eigen::MatrixXd inv = tile.digits.matrix.InversePower(1);

  std::vector<std::size_t> order(tile.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return tile.point(a)[0] < tile.point(b)[0];
  });
  std::vector<double> first(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    first[i] = tile.point(order[i])[0];
  }
  std::vector<char> used(tile.size(), 0);

  std::size_t unmatched = 0;
  Eigen::VectorXd shifted(d);
  for (const auto& g : tile.digits.digits) {
    const auto gd = ToDouble(g);
    for (std::size_t i = 0; i < coarse.size(); ++i) {
      auto p = coarse.point(i);
      for (std::size_t j = 0; j < d; ++j) shifted[j] = p[j] + gd[j];
      const Eigen::VectorXd image = inv * shifted;
      auto it = std::lower_bound(first.begin(), first.end(), image[0] - kTol);
      bool found = false;
      for (; it != first.end() && *it <= image[0] + kTol; ++it) {
        const std::size_t cand = order[it - first.begin()];
        if (used[cand]) continue;
        auto c = tile.point(cand);
        bool close = true;
        for (std::size_t j = 0; j < d && close; ++j) {
          close = std::abs(c[j] - image[j]) <= kTol;
        }
        if (close) {
          used[cand] = 1;
          found = true;
          break;
        }
      }
      if (!found) ++unmatched;
    }
  }
  const std::size_t unused =
      static_cast<std::size_t>(std::count(used.begin(), used.end(), 0));
  return static_cast<double>(std::max(unmatched, unused)) /
         static_cast<double>(tile.size());
}

}  // namespace toral
