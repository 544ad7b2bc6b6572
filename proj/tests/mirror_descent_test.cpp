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
#include "hpb/mirror_descent.hpp"

namespace hpb {
namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

TEST(BregmanTest, LogBarrierClosedForm) {
  const SmoothFunction psi = weighted_log_barrier(Vector::Ones(2));
  EXPECT_EQ(bregman(psi, vec2(1, 1), vec2(1, 1)), 0.0);
  EXPECT_NEAR(bregman(psi, vec2(2, 1), vec2(1, 1)), 1 - std::log(2.0), 1e-15);
}

TEST(BregmanTest, Nonnegative) {
  Rng rng(201);
  const Barrier psi = make_barrier(random_polytope(3, 6, rng));
  for (int k = 0; k < 1000; ++k) {
    const Vector u = random_interior_point(psi.body(), rng);
    const Vector w = random_interior_point(psi.body(), rng);
    EXPECT_GE(bregman(psi, u, w), -1e-12);
  }
}

// Two arms with per-arm rates and the floor as an extra constraint.
OmdProblem two_arm_problem(const Vector& g, const Vector& w_ref,
                           const Vector& eta, double floor) {
  OmdProblem p;
  p.g = g;
  p.w_ref = w_ref;
  p.reg = weighted_log_barrier(eta.cwiseInverse());
  p.extra = linear_inequalities(-Matrix::Identity(2, 2),
                                -Vector::Constant(2, floor));
  p.a_eq = Matrix::Ones(1, 2);
  p.b_eq = Vector::Ones(1);
  return p;
}

double two_arm_objective(const OmdProblem& p, const Vector& x) {
  return p.g.dot(x) + bregman(p.reg, x, p.w_ref);
}

TEST(OmdStepTest, ZeroLossKeepsReference) {
  const OmdProblem p =
      two_arm_problem(Vector::Zero(2), vec2(0.3, 0.7), vec2(0.5, 0.5), 0.01);
  const OmdResult r = omd_step(p);
  EXPECT_LE((r.w - p.w_ref).norm(), 1e-9);
  EXPECT_EQ(r.monotonicity_breaks, 0);

  Rng rng(202);
  OmdProblem q;
  const Barrier psi = make_barrier(random_polytope(3, 6, rng));
  q.reg = from_barrier(psi, 10.0);
  q.w_ref = random_interior_point(psi.body(), rng);
  q.g = Vector::Zero(3);
  EXPECT_LE((omd_step(q).w - q.w_ref).norm(), 1e-9);
}

TEST(OmdStepTest, TwoArmGridOracle) {
  Rng rng(203);
  for (int rep = 0; rep < 10; ++rep) {
    const double floor = 0.01;
    const double a = 0.05 + 0.9 * rng.uniform();
    const Vector g = vec2(5 * rng.uniform(), 5 * rng.uniform());
    const OmdProblem p = two_arm_problem(
        g, vec2(a, 1 - a), vec2(0.05 + rng.uniform(), 0.05 + rng.uniform()), floor);
    const OmdResult r = omd_step(p);
    EXPECT_LE(r.certificate, 1e-9);
    double best = std::numeric_limits<double>::infinity();
    for (double x = floor + 1e-6; x < 1 - floor; x += 1e-6)
      best = std::min(best, two_arm_objective(p, vec2(x, 1 - x)));
    EXPECT_LE(two_arm_objective(p, r.w), best + 1e-9);
    EXPECT_GE(r.w.minCoeff(), floor);
    EXPECT_NEAR(r.w.sum(), 1.0, 1e-12);
  }
}

TEST(OmdStepTest, ActiveFloor) {
  // A huge loss on arm 0 pushes it onto the floor.
  const OmdProblem p =
      two_arm_problem(vec2(1e6, 0), vec2(0.5, 0.5), vec2(0.5, 0.5), 0.01);
  const OmdResult r = omd_step(p);
  EXPECT_NEAR(r.w(0), 0.01, 1e-9);
  EXPECT_GT(r.w(0), 0.01);
}

TEST(OmdStepTest, ReportsNonConvergence) {
  OmdProblem p =
      two_arm_problem(vec2(50, 0), vec2(0.5, 0.5), vec2(0.5, 0.5), 0.01);
  SolverOptions opt;
  opt.max_iterations = 1;
  opt.fallback_iterations = 0;
  opt.mu_start = 1e-12;
  try {
    omd_step(p, opt);
    FAIL() << "expected SolverError";
  } catch (const SolverError& e) {
    EXPECT_GT(e.grad_norm(), 1e-9);
  }
}

TEST(OmdStepTest, InfeasibleStartIsReported) {
  OmdProblem p =
      two_arm_problem(vec2(1, 0), vec2(0.005, 0.995), vec2(0.5, 0.5), 0.01);
  EXPECT_THROW(omd_step(p), InfeasibleError);
  p.start = vec2(0.5, 0.5);
  EXPECT_NO_THROW(omd_step(p));
}

TEST(AnalyticCenterTest, SymmetricBodies) {
  EXPECT_LE(analytic_center(make_barrier(ConvexBody::box(2, -1, 1))).norm(), 1e-9);
  Vector c(3);
  c << 1, 2, 3;
  Vector off(3);
  EXPECT_LE((analytic_center(make_barrier(ConvexBody::ball(c, 0.5))) - c).norm(), 1e-9);
  const Vector s = analytic_center(make_barrier(ConvexBody::truncated_simplex(5, 0.01)));
  EXPECT_LE((s - Vector::Constant(5, 0.2)).norm(), 1e-9);
}

TEST(AnalyticCenterTest, CertificateOnRandomPolytopes) {
  Rng rng(204);
  for (int rep = 0; rep < 20; ++rep) {
    const Barrier psi = make_barrier(random_polytope(2 + rep % 4, 8, rng));
    const OmdResult r = analytic_center_detail(psi);
    const SpdMatrix h(psi.hessian(r.w));
    EXPECT_LE(h.dual_norm(psi.gradient(r.w)), 1e-9);
    EXPECT_EQ(r.monotonicity_breaks, 0);
  }
}

}  // namespace
}  // namespace hpb
