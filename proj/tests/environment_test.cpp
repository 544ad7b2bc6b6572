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

#include "hpb/environment.hpp"

#include <cmath>

#include "gtest/gtest.h"

namespace hpb {
namespace {

AdversarySpec gap_spec(std::uint64_t seed) {
  AdversarySpec s;
  s.seed = seed;
  return s;
}

TEST(AdversaryKindTest, NamesRoundTrip) {
  for (AdversaryKind k : {AdversaryKind::kStochasticGap, AdversaryKind::kFixedSequence,
                          AdversaryKind::kFollowTheLearner})
    EXPECT_EQ(parse_adversary_kind(adversary_kind_name(k)), k);
  EXPECT_THROW(parse_adversary_kind("greedy"), std::invalid_argument);
}

TEST(MabAdversaryTest, GapMeans) {
  const MabAdversary adv(gap_spec(11), 3);
  const int n = 20000;
  Vector sum = Vector::Zero(3);
  for (int t = 1; t <= n; ++t) sum += adv.next_loss(t, {});
  EXPECT_NEAR(sum(0) / n, 0.1, 4 * std::sqrt(0.09 / n));
  EXPECT_NEAR(sum(1) / n, 0.3, 4 * std::sqrt(0.21 / n));
  EXPECT_NEAR(sum(2) / n, 0.3, 4 * std::sqrt(0.21 / n));
}

TEST(MabAdversaryTest, SmallLossBestArmIsZero) {
  AdversarySpec s = gap_spec(12);
  s.small_loss = true;
  s.best = 2;
  const MabAdversary adv(s, 4);
  for (int t = 1; t <= 1000; ++t) EXPECT_EQ(adv.next_loss(t, {})(2), 0.0);
}

TEST(MabAdversaryTest, ObliviousIgnoresHistory) {
  const MabAdversary adv(gap_spec(13), 5);
  for (int t = 1; t <= 200; ++t)
    EXPECT_EQ(adv.next_loss(t, {0, 1, 2}), adv.next_loss(t, {4, 4}));
}

TEST(MabAdversaryTest, FollowTheLearner) {
  AdversarySpec s;
  s.kind = AdversaryKind::kFollowTheLearner;
  s.neighborhood = 1;
  s.low = 0.05;
  const MabAdversary adv(s, 5);
  EXPECT_EQ(adv.next_loss(1, {}), Vector::Constant(5, 0.05));
  const Vector l = adv.next_loss(2, {0});
  EXPECT_EQ(l(0), 1.0);
  EXPECT_EQ(l(1), 1.0);
  EXPECT_EQ(l(4), 1.0);
  EXPECT_EQ(l(2), 0.05);
}

TEST(MabAdversaryTest, FixedSequenceCyclesAndValidates) {
  AdversarySpec s;
  s.kind = AdversaryKind::kFixedSequence;
  s.sequence = Matrix(2, 2);
  s.sequence << 1, 0, 0, 1;
  const MabAdversary adv(s, 2);
  EXPECT_EQ(adv.next_loss(3, {}), adv.next_loss(1, {}));
  EXPECT_EQ(adv.next_loss(2, {})(1), 1.0);
  s.sequence(0, 0) = 1.5;
  EXPECT_THROW(MabAdversary(s, 2), std::invalid_argument);
  EXPECT_THROW(MabAdversary(gap_spec(0), 0), std::invalid_argument);
}

TEST(LinearAdversaryTest, BallNormalization) {
  const ConvexBody ball = ConvexBody::ball(Vector::Zero(3), 1.0);
  AdversarySpec s;
  s.kind = AdversaryKind::kFixedSequence;
  s.sequence = Matrix::Zero(1, 3);
  s.sequence(0, 0) = 0.8;
  const LinearAdversary adv(s, ball);
  const LinearLoss l = adv.next_loss(1, {});
  EXPECT_FALSE(l.rescaled);
  EXPECT_DOUBLE_EQ(body_abs_max(ball, l.loss), 0.8);
  s.sequence(0, 1) = 3.0;
  const LinearLoss big = LinearAdversary(s, ball).next_loss(1, {});
  EXPECT_TRUE(big.rescaled);
  EXPECT_NEAR(body_abs_max(ball, big.loss), 1.0, 1e-15);
}

TEST(LinearAdversaryTest, GeneratedLossesAreNormalized) {
  Rng rng(14);
  const std::vector<ConvexBody> bodies = {ConvexBody::ball(Vector::Zero(3), 1.0),
                                          random_polytope(3, 7, rng)};
  for (const ConvexBody& body : bodies) {
    AdversarySpec s = gap_spec(15);
    s.theta = Vector::Constant(3, 2.0);
    s.noise = 0.5;
    const LinearAdversary gap(s, body);
    s.kind = AdversaryKind::kFollowTheLearner;
    const LinearAdversary ftl(s, body);
    std::vector<Vector> actions;
    for (int t = 1; t <= 100; ++t) {
      EXPECT_LE(body_abs_max(body, gap.next_loss(t, {}).loss), 1.0 + 1e-12);
      EXPECT_LE(body_abs_max(body, ftl.next_loss(t, actions).loss), 1.0 + 1e-12);
      actions.push_back(random_interior_point(body, rng));
    }
  }
}

TEST(LinearAdversaryTest, BodyMinimum) {
  Rng rng(16);
  const std::vector<ConvexBody> bodies = {
      ConvexBody::ball(Vector::Constant(2, 0.5), 0.7), random_polytope(2, 6, rng),
      ConvexBody::truncated_simplex(3, 0.05)};
  for (const ConvexBody& body : bodies) {
    const Vector loss = standard_normal(body.dim(), rng);
    Vector arg;
    const double m = body_min(body, loss, &arg);
    EXPECT_NEAR(arg.dot(loss), m, 1e-12);
    EXPECT_TRUE(body.contains(arg, 1e-9));
    if (body.kind() == BodyKind::kTruncatedSimplex) continue;
    for (int k = 0; k < 500; ++k)
      EXPECT_GE(random_interior_point(body, rng).dot(loss), m - 1e-12);
  }
}

TEST(LinearAdversaryTest, NonnegativeMode) {
  AdversarySpec s = gap_spec(17);
  s.nonnegative = true;
  EXPECT_THROW(LinearAdversary(s, ConvexBody::ball(Vector::Zero(2), 1.0)),
               std::invalid_argument);
  const ConvexBody ball = ConvexBody::ball(Vector::Constant(2, 1.0), 0.5);
  s.theta = Vector::Constant(2, 0.1);
  s.noise = 0.3;
  const LinearAdversary adv(s, ball);
  for (int t = 1; t <= 200; ++t) {
    Vector arg;
    EXPECT_GE(body_min(ball, adv.next_loss(t, {}).loss, &arg), 0.0);
  }
}

TEST(MdpAdversaryTest, GapInstanceAndDesignatedPolicy) {
  Rng rng(18);
  const LayeredMdp mdp = random_layered_mdp({1, 2, 2, 1}, 3, rng);
  AdversarySpec s = gap_spec(19);
  s.best = 1;
  const MdpAdversary adv(s, mdp.layout);
  const int n = 5000;
  Vector sum = Vector::Zero(mdp.layout.num_pairs());
  for (int t = 1; t <= n; ++t) sum += adv.next_loss(t, {});
  const Vector mean = sum / n;
  for (int x = 0; x < 5; ++x) {
    EXPECT_NEAR(mean(mdp.layout.pair(x, 1)), 0.1, 4 * std::sqrt(0.09 / n));
    EXPECT_NEAR(mean(mdp.layout.pair(x, 0)), 0.3, 4 * std::sqrt(0.21 / n));
  }
  Vector expected = Vector::Constant(mdp.layout.num_pairs(), 0.3);
  for (int x = 0; x < 5; ++x) expected(mdp.layout.pair(x, 1)) = 0.1;
  EXPECT_EQ(best_policy(mdp, expected), adv.designated_policy());
}

TEST(MdpAdversaryTest, FollowTheLearnerMarksVisitedPairs) {
  const MdpLayout l({1, 2, 1}, 2);
  AdversarySpec s;
  s.kind = AdversaryKind::kFollowTheLearner;
  const MdpAdversary adv(s, l);
  const Trajectory t{{{0, 1, 0.0}, {2, 0, 0.0}}, {0, 2, 3}};
  const Vector loss = adv.next_loss(2, {t});
  EXPECT_EQ(loss(l.pair(0, 1)), 1.0);
  EXPECT_EQ(loss(l.pair(2, 0)), 1.0);
  EXPECT_EQ(loss(l.pair(1, 0)), 0.1);
}

}  // namespace
}  // namespace hpb
