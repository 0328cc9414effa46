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

#include <atomic>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "toral/parallel.hpp"
#include "toral/rng.hpp"

using namespace toral;

TEST_SUITE("rng") {
  TEST_CASE("philox known-answer vectors") {
    // Random123 kat_vectors, philox4x32 with 10 rounds.
    auto zero = Philox4x32::Encrypt({0, 0, 0, 0}, {0, 0});
    CHECK(zero == Philox4x32::Counter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c,
                                      0x9b00dbd8});
    auto ones = Philox4x32::Encrypt(
        {0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
        {0xffffffff, 0xffffffff});
    CHECK(ones == Philox4x32::Counter{0x408f276d, 0x41c83b0e, 0xa20bc7c6,
                                      0x6d5451fd});
    auto pi = Philox4x32::Encrypt(
        {0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
        {0xa4093822, 0x299f31d0});
    CHECK(pi == Philox4x32::Counter{0xd16cfe09, 0x94fdcceb, 0x5001e420,
                                    0x24126ea1});
  }

  TEST_CASE("streams are reproducible and distinct") {
    CounterStream a(42, 7), b(42, 7), c(42, 8), d(43, 7);
    for (int i = 0; i < 10; ++i) {
      const auto x = a.NextU64();
      CHECK(x == b.NextU64());
      CHECK(x != c.NextU64());
      CHECK(x != d.NextU64());
    }
  }

  TEST_CASE("uniform moments") {
    CounterStream s(1, 0);
    const int n = 200000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double u = s.NextUniform();
      REQUIRE(u >= 0.0);
      REQUIRE(u < 1.0);
      sum += u;
      sum2 += u * u;
    }
    CHECK(std::abs(sum / n - 0.5) < 5.0 * std::sqrt(1.0 / 12.0 / n));
    CHECK(std::abs(sum2 / n - 1.0 / 3.0) < 0.005);
  }

  TEST_CASE("parallel_for covers every index once") {
    for (unsigned threads : {1u, 3u, 8u}) {
      std::vector<std::atomic<int>> hits(1000);
      ParallelFor(hits.size(), threads, [&](std::size_t i) { ++hits[i]; });
      for (auto& h : hits) CHECK(h.load() == 1);
    }
    CHECK_THROWS(ParallelFor(10, 4, [](std::size_t i) {
      if (i == 5) throw std::runtime_error("boom");
    }));
  }
}
