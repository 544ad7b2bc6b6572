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

#include "hpb/linear_bandit.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "hpb/errors.hpp"

namespace hpb {

namespace {

Vector lift(const Vector& w) {
  Vector z(w.size() + 1);
  z << w, 1.0;
  return z;
}

void set_hessian(LinBanditState& s) {
  s.H = s.setup->big_psi.hessian(lift(s.w));
  const SpdMatrix spd(s.H);
  s.H_sqrt = spd.sqrt_matrix();
  s.H_inv_sqrt = spd.inv_sqrt_matrix();
}

}  // namespace

Vector LinBanditState::z() const { return lift(w); }

LinBanditState lb_init(const LinBanditConfig& cfg) {
  if (cfg.T < 8) throw std::invalid_argument("linear bandit: need T >= 8");
  if (!(cfg.eta > 0.0)) throw std::invalid_argument("linear bandit: need eta > 0");
  if (cfg.body.kind() == BodyKind::kTruncatedSimplex)
    throw std::invalid_argument("linear bandit: use a polytope for the simplex");
  Barrier psi = make_barrier(cfg.body);
  const Vector w1 = analytic_center(psi);
  const double nu = psi.nu();
  const int d = cfg.body.dim();
  const double kappa =
      cfg.kappa > 0.0 ? cfg.kappa
                      : std::exp(1.0 / (100.0 * d * std::log(nu * cfg.T)));
  ConvexBody shrunk = shrink_body(cfg.body, w1, 1.0 - 1.0 / cfg.T);
  auto setup = std::make_shared<LinBanditSetup>(LinBanditSetup{
      psi, lift_normal_barrier(psi), std::move(shrunk), w1, d, cfg.T, nu,
      cfg.eta, kappa});
  LinBanditState s;
  s.setup = std::move(setup);
  s.w = w1;
  s.eta = cfg.eta;
  set_hessian(s);
  s.history_sum = s.H;
  s.S = {1};
  s.sum_lhat = Vector::Zero(d + 1);
  return s;
}

LbSample lb_sample(const LinBanditState& state, Rng& rng) {
  const int d = state.setup->d;
  const Vector v = state.H_inv_sqrt.col(d);
  LbSample out;
  out.s = sample_sphere_orthogonal(v, rng).vec();
  Vector zt = state.z() + state.H_inv_sqrt * out.s;
  out.pin_residual = std::abs(zt(d) - 1.0);
  if (out.pin_residual > 1e-9)
    throw std::logic_error("lb_sample: sampled point left the b = 1 slice");
  out.w_tilde = zt.head(d);
  if (!state.setup->psi.body().contains(out.w_tilde, 1e-12))
    throw std::logic_error("lb_sample: sampled action is outside the body");
  return out;
}

Vector lb_estimate(const LinBanditState& state, const Vector& s,
                   double observed) {
  if (!(std::abs(observed) <= 1.0 + 1e-9))
    throw std::invalid_argument("lb_estimate: observed loss must lie in [-1, 1]");
  return state.setup->d * observed * (state.H_sqrt * s);
}

LinBanditState lb_update(const LinBanditState& state, const Vector& loss_hat) {
  const LinBanditSetup& su = *state.setup;
  const int d = su.d;
  LinBanditState next = state;
  next.t = state.t + 1;
  next.sum_z_dot_lhat += state.z().dot(loss_hat);
  next.sum_lhat += loss_hat;

  if (loss_hat.head(d).cwiseAbs().maxCoeff() > 0.0) {
    OmdProblem p;
    p.g = loss_hat.head(d);
    p.w_ref = state.w;
    // On the slice, D_Psi((x,1), (w,1)) = 400 D_psi(x, w).
    p.reg = from_barrier(su.psi, 400.0 / state.eta);
    p.extra = body_inequalities(su.shrunk);
    next.w = omd_step(p).w;
    set_hessian(next);
  }

  const Matrix diff = next.H - state.history_sum;
  if (lambda_max(0.5 * (diff + diff.transpose())) > 0.0) {
    next.S.push_back(next.t);
    next.history_sum = state.history_sum + next.H;
    next.eta = state.eta * su.kappa;
    if (next.t <= su.T) next.S_hessians.push_back(next.H);
    next.events.push_back({next.t, next.t, next.eta, 0.0});
  }
  return next;
}

double lb_default_eta(const LinBanditConfig& cfg) {
  const Barrier psi = make_barrier(cfg.body);
  const double nu = psi.nu();
  const double d = cfg.body.dim();
  const double T = cfg.T;
  const double a = 100.0;
  const double b = 2e6 * d * nu * nu * T;
  const double c = std::ceil(std::log2(b)) * std::ceil(std::log2(b * b * T));
  const double l = std::log(c / cfg.delta);
  const double base = a * c * d * d * std::log(nu * T);
  return std::min(1.0 / (640.0 * base * l), 1.0 / (1610.0 * base * std::sqrt(T * l)));
}

LbRound lb_step(LinBanditState& state, const Vector& loss, Rng& rng) {
  LbRound r;
  r.sample = lb_sample(state, rng);
  r.observed = r.sample.w_tilde.dot(loss);
  r.loss_hat = lb_estimate(state, r.sample.s, r.observed);
  state.sum_abs_obs += std::abs(r.observed);
  state.cum_loss += r.observed;
  state = lb_update(state, r.loss_hat);
  return r;
}

Vector lb_lift_comparator(const LinBanditSetup& setup, const Vector& u) {
  return lift(setup.w1 + (1.0 - 1.0 / setup.T) * (u - setup.w1));
}

double lb_stability_slack(const LinBanditState& before,
                          const LinBanditState& after, const Vector& loss_hat) {
  const SpdMatrix h(before.H);
  const Vector dz = before.z() - after.z();
  return 40.0 * before.setup->eta0 * h.dual_norm(loss_hat) - h.norm(dz);
}

double lb_bregman_slack(const LinBanditState& state, const Vector& u) {
  const LinBanditSetup& su = *state.setup;
  const int d = su.d;
  const double breg = 400.0 * bregman(su.psi, u.head(d), state.w);
  const double unorm = std::sqrt(std::max(0.0, u.dot(state.H * u)));
  const double th = 800.0 * su.nu;
  return breg - (-th * std::log(th * su.T) - th + unorm);
}

double lb_regterm_slack(const LinBanditState& s, const Vector& u) {
  const LinBanditSetup& su = *s.setup;
  const double th = 800.0 * su.nu;
  const double eta = su.eta0;
  const double lnt = std::log(static_cast<double>(su.T));
  const double lnnt = std::log(su.nu * su.T);
  double rhs = th * lnt / eta + 40.0 * eta * su.d * su.d * s.sum_abs_obs;
  for (const Matrix& h : s.S_hessians) {
    const double unorm = std::sqrt(std::max(0.0, u.dot(h * u)));
    rhs += (th + th * std::log(th * su.T) - unorm) / (500.0 * eta * su.d * lnnt);
  }
  const double lhs = s.sum_z_dot_lhat - u.dot(s.sum_lhat);
  return rhs - lhs;
}

double lb_schedule_size_bound(const LinBanditSetup& su) {
  return 100.0 * su.d * std::log2(su.nu * su.T) + 1.0;
}

void lb_check_state(const LinBanditState& s) {
  const LinBanditSetup& su = *s.setup;
  auto fail = [&](const std::string& what) {
    std::ostringstream os;
    os << "linear bandit invariant violated at round " << s.t << ": " << what;
    throw InvariantViolation(os.str());
  };
  const Vector z = s.z();
  const double th = su.big_psi.theta();
  if (std::abs(z.dot(s.H * z) - th) > 1e-6 * th) fail("z'Hz differs from 800 nu");
  if (minkowsky(su.psi.body(), su.w1, s.w) > 1.0 - 1.0 / su.T + 1e-12)
    fail("iterate left the shrunk set");
  if (s.eta > 5.0 * su.eta0 * (1.0 + 1e-12)) fail("learning rate above 5 eta");
  if (s.S.size() > lb_schedule_size_bound(su)) fail("schedule set too large");
}

}  // namespace hpb
