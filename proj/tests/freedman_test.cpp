// Copyright 2026 The hpbandit Authors.
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

#include <cmath>

#include "gtest/gtest.h"
#include "hpb/errors.hpp"
#include "hpb/freedman.hpp"

namespace hpb {
namespace {

TEST(FreedmanBoundTest, HandExample) {
  EXPECT_EQ(freedman_c(2, 2), 3.0);
  const double expect = 3 * (std::sqrt(8 * std::log(6.0)) + 2 * std::log(6.0));
  EXPECT_DOUBLE_EQ(freedman_bound({1, 1, 2, 2, 0.5}), expect);
}

TEST(FreedmanBoundTest, Monotone) {
  double prev_v = 0;
  for (double v = 1; v < 1e4; v *= 1.7) {
    const double cur = freedman_bound({v, 3, 8, 100, 0.1});
    EXPECT_GT(cur, prev_v);
    prev_v = cur;
  }
  double prev_b = 0;
  for (double bs = 1; bs <= 8; bs += 0.5) {
    const double cur = freedman_bound({10, bs, 8, 100, 0.1});
    EXPECT_GT(cur, prev_b);
    prev_b = cur;
  }
}

TEST(FreedmanBoundTest, ClampsAtUnitRange) {
  EXPECT_EQ(freedman_c(1, 1000), 1.0);
  const double l = std::log(1 / 0.1);
  EXPECT_DOUBLE_EQ(freedman_bound({4, 1, 1, 1000, 0.1}),
                   std::sqrt(32 * l) + 2 * l);
  EXPECT_THROW(freedman_bound({1, 1, 1, 10, 1.0}), std::invalid_argument);
  EXPECT_THROW(freedman_bound({1, 2, 1, 10, 0.1}), std::invalid_argument);
}

TEST(FreedmanBoundTest, FixedRangeShape) {
  // With b = B* the bound is the classical Freedman shape times C.
  const double c = freedman_c(4, 50);
  const double l = std::log(c / 0.05);
  EXPECT_DOUBLE_EQ(freedman_bound({9, 4, 4, 50, 0.05}),
                   c * (std::sqrt(72 * l) + 8 * l));
}

TEST(FreedmanMcTest, ZeroProcess) {
  const FreedmanReport r = mc_validate_freedman(zero_process(100), 0.05, 200, 1);
  EXPECT_EQ(r.violations, 0);
}

TEST(FreedmanMcTest, BernoulliDoubling) {
  const MartingaleProcess p = bernoulli_doubling_process(500, 0.1, 64);
  const FreedmanReport r = mc_validate_freedman(p, 0.05, 2000, 2);
  EXPECT_LE(r.frequency, 0.05);
}

TEST(FreedmanMcTest, MabReplay) {
  const MartingaleProcess p =
      mab_replay_process(3, 200, 0.2, {0.2, 0.5, 0.5});
  const FreedmanReport r = mc_validate_freedman(p, 0.2, 200, 3);
  EXPECT_LE(r.frequency, 0.2);
}

TEST(FreedmanMcTest, RejectsBrokenGenerator) {
  MartingaleProcess p = zero_process(10);
  p.sample = [](Rng&) {
    return std::vector<MartingaleStep>{{2.0, 1.0, 0.0}};
  };
  EXPECT_THROW(mc_validate_freedman(p, 0.1, 1, 0), InvariantViolation);
}

}  // namespace
}  // namespace hpb
