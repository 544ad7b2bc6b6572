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
#include "hpb/linear_bandit.hpp"

namespace hpb {
namespace {

LinBanditConfig config(ConvexBody body, int T, double eta) {
  LinBanditConfig c;
  c.body = std::move(body);
  c.T = T;
  c.eta = eta;
  return c;
}

Vector random_loss(int d, Rng& rng, double radius = 1.0) {
  return standard_normal(d, rng).normalized() * rng.uniform() * 0.5 / radius;
}

double body_radius(const ConvexBody& body) {
  if (body.kind() != BodyKind::kPolytope) return 1.0;
  double r = 0.0;
  for (const Vector& v : polytope_vertices(body)) r = std::max(r, v.norm());
  return r;
}

TEST(LbInitTest, BoxAndIdentities) {
  const LinBanditState s = lb_init(config(ConvexBody::box(3, -1, 1), 100, 0.01));
  EXPECT_LE(s.w.norm(), 1e-9);
  const Vector z = s.z();
  EXPECT_NEAR(z.dot(s.H * z), 800 * 6, 800 * 6 * 1e-10);
  EXPECT_EQ(s.S.size(), 1u);
  Rng rng(401);
  for (int k = 0; k < 100; ++k) {
    Vector u(4);
    u << random_interior_point(s.setup->psi.body(), rng), 1.0;
    EXPECT_LE(std::sqrt(u.dot(s.H * u)), 800 * s.setup->nu);
  }
}

TEST(LbSampleTest, UnitDikinStep) {
  Rng rng(402);
  const LinBanditState s = lb_init(config(random_polytope(3, 7, rng), 100, 0.01));
  for (int k = 0; k < 200; ++k) {
    const LbSample smp = lb_sample(s, rng);
    Vector zt(4);
    zt << smp.w_tilde, 1.0;
    const Vector dz = zt - s.z();
    EXPECT_NEAR(std::sqrt(dz.dot(s.H * dz)), 1.0, 1e-10);
    EXPECT_LE(smp.pin_residual, 1e-9);
  }
}

TEST(LbSampleTest, ActionsStayInside) {
  Rng rng(403);
  std::vector<ConvexBody> bodies = {ConvexBody::ball(Vector::Zero(3), 1.0),
                                    random_polytope(3, 7, rng)};
  for (const ConvexBody& body : bodies) {
    LinBanditState s = lb_init(config(body, 1000, 0.5));
    const double radius = body_radius(body);
    for (int t = 0; t < 10000; ++t) {
      const Vector loss = random_loss(3, rng, radius);
      const LbRound r = lb_step(s, loss, rng);
      ASSERT_TRUE(body.strictly_contains(r.sample.w_tilde));
      if (t % 500 == 0) s = lb_init(config(body, 1000, 0.5));
    }
  }
}

TEST(LbSampleTest, OneDimensionalSliceHitsBothPoints) {
  const LinBanditState s = lb_init(config(ConvexBody::box(1, -1, 1), 100, 0.01));
  Rng rng(404);
  int pos = 0;
  const int n = 10000;
  for (int k = 0; k < n; ++k) pos += lb_sample(s, rng).w_tilde(0) > 0;
  EXPECT_NEAR(static_cast<double>(pos) / n, 0.5, 3 * std::sqrt(0.25 / n));
}

TEST(LbEstimateTest, NormAndZero) {
  Rng rng(405);
  const LinBanditState s = lb_init(config(random_polytope(3, 6, rng), 100, 0.01));
  const LbSample smp = lb_sample(s, rng);
  EXPECT_EQ(lb_estimate(s, smp.s, 0.0).norm(), 0.0);
  const Vector est = lb_estimate(s, smp.s, -0.7);
  const SpdMatrix h(s.H);
  EXPECT_NEAR(h.dual_norm(est), 3 * 0.7, 1e-9);
  EXPECT_THROW(lb_estimate(s, smp.s, 1.1), std::invalid_argument);
}

TEST(LbEstimateTest, UnbiasedMonteCarlo) {
  Rng rng(406);
  LinBanditState s = lb_init(config(ConvexBody::ball(Vector::Zero(2), 1.0), 100, 0.3));
  for (int t = 0; t < 5; ++t) lb_step(s, random_loss(2, rng), rng);
  Vector loss(2);
  loss << 0.6, -0.3;
  const int n = 1000000;
  Vector sum = Vector::Zero(2), sumsq = Vector::Zero(2);
  for (int k = 0; k < n; ++k) {
    const LbSample smp = lb_sample(s, rng);
    const Vector est = lb_estimate(s, smp.s, smp.w_tilde.dot(loss)).head(2);
    sum += est;
    sumsq += est.cwiseAbs2();
  }
  const Vector mean = sum / n;
  for (int i = 0; i < 2; ++i) {
    const double se = std::sqrt((sumsq(i) / n - mean(i) * mean(i)) / n);
    EXPECT_LE(std::abs(mean(i) - loss(i)), 4 * se);
  }
}

TEST(LbUpdateTest, ZeroLossKeepsIterateAndSchedule) {
  Rng rng(407);
  LinBanditState s = lb_init(config(random_polytope(3, 6, rng), 100, 0.01));
  const LinBanditState n = lb_update(s, Vector::Zero(4));
  EXPECT_EQ(n.w, s.w);
  EXPECT_EQ(n.S.size(), 1u);
  EXPECT_EQ(n.eta, s.eta);
}

TEST(LbUpdateTest, FirstRoundScheduleMatchesEigenOracle) {
  Rng rng(408);
  for (int rep = 0; rep < 20; ++rep) {
    LinBanditState s = lb_init(config(random_polytope(2, 5, rng), 100, 0.2));
    const LbSample smp = lb_sample(s, rng);
    const Vector lhat = lb_estimate(s, smp.s, 0.9);
    const LinBanditState n = lb_update(s, lhat);
    Eigen::SelfAdjointEigenSolver<Matrix> es(n.H - s.H);
    const bool fire = es.eigenvalues().maxCoeff() > 0;
    EXPECT_EQ(n.S.size() == 2, fire);
    EXPECT_EQ(n.eta, fire ? s.eta * s.setup->kappa : s.eta);
  }
}

TEST(LbDefaultEtaTest, Formula) {
  LinBanditConfig c = config(ConvexBody::box(2, -1, 1), 1000, 0.01);
  c.delta = 0.05;
  const double nu = 4, d = 2, T = 1000, a = 100;
  const double b = 2e6 * d * nu * nu * T;
  const double cc = std::ceil(std::log2(b)) * std::ceil(std::log2(b * b * T));
  const double l = std::log(cc / 0.05);
  const double expect =
      std::min(1 / (640 * a * cc * d * d * std::log(nu * T) * l),
               1 / (1610 * a * cc * d * d * std::log(nu * T) * std::sqrt(T * l)));
  EXPECT_DOUBLE_EQ(lb_default_eta(c), expect);
  double prev = 1;
  for (int T2 : {8, 100, 1000, 10000, 100000}) {
    c.T = T2;
    const double e = lb_default_eta(c);
    EXPECT_LT(e, prev);
    prev = e;
  }
}

TEST(LbDefaultEtaTest, BelowStabilityThreshold) {
  Rng rng(409);
  for (int d = 1; d <= 6; ++d) {
    for (int T : {8, 64, 1000, 100000}) {
      LinBanditConfig c = config(ConvexBody::box(d, -1, 1), T, 0.01);
      EXPECT_LE(lb_default_eta(c), 1.0 / (80 * d));
      c.body = ConvexBody::ball(Vector::Zero(d), 1.0);
      EXPECT_LE(lb_default_eta(c), 1.0 / (80 * d));
    }
  }
}

TEST(LbPropertyTest, PathwiseSuite) {
  Rng rng(410);
  std::vector<ConvexBody> bodies = {ConvexBody::ball(Vector::Zero(3), 1.0),
                                    random_polytope(3, 6, rng)};
  for (const ConvexBody& body : bodies) {
    const int T = 300;
    LinBanditState s = lb_init(config(body, T, 1.0 / 240));
    std::vector<Vector> comps;
    for (int k = 0; k < 5; ++k)
      comps.push_back(lb_lift_comparator(*s.setup, random_interior_point(body, rng)));
    const double radius = body_radius(body);
    Vector theta = random_loss(3, rng, radius);
    for (int t = 0; t < T; ++t) {
      const LinBanditState before = s;
      const LbRound r = lb_step(s, theta + 0.2 * random_loss(3, rng, radius), rng);
      EXPECT_GE(lb_stability_slack(before, s, r.loss_hat), -1e-9);
      ASSERT_NO_THROW(lb_check_state(s));
      for (const Vector& u : comps) EXPECT_GE(lb_bregman_slack(s, u), -1e-6);
    }
    for (const Vector& u : comps) {
      EXPECT_GE(lb_regterm_slack(s, u), 0.0);
      EXPECT_LE(std::sqrt(u.dot(lb_init(config(body, T, 0.1)).H * u)),
                800 * s.setup->nu);
    }
  }
}

}  // namespace
}  // namespace hpb
