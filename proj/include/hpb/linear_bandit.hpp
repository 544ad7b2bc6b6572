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

#ifndef HPB_LINEAR_BANDIT_HPP_
#define HPB_LINEAR_BANDIT_HPP_

#include <memory>
#include <vector>

#include "hpb/barrier.hpp"
#include "hpb/linalg.hpp"
#include "hpb/mab.hpp"
#include "hpb/mirror_descent.hpp"
#include "hpb/rng.hpp"

namespace hpb {

struct LinBanditConfig {
  ConvexBody body = ConvexBody::ball(Vector::Zero(1), 1.0);
  int T = 8;
  double eta = 0.01;
  double delta = 0.05;
  // Zero selects exp(1 / (100 d ln(nu T))).
  double kappa = 0.0;
};

// Quantities fixed for the whole run.
struct LinBanditSetup {
  Barrier psi;
  NormalBarrier big_psi;
  ConvexBody shrunk;
  Vector w1;
  int d;
  int T;
  double nu;
  double eta0;
  double kappa;
};

struct LinBanditState {
  std::shared_ptr<const LinBanditSetup> setup;
  int t = 1;
  Vector w;  // z_t = (w, 1)
  Matrix H;  // Hessian of the lifted barrier at z_t
  Matrix H_sqrt;
  Matrix H_inv_sqrt;
  double eta = 0.0;
  Matrix history_sum;
  std::vector<int> S;
  // Hessians at rounds 2..T that joined S.
  std::vector<Matrix> S_hessians;
  std::vector<ScheduleEvent> events;
  // Running sums for the pathwise checks.
  double sum_z_dot_lhat = 0.0;
  Vector sum_lhat;
  double sum_abs_obs = 0.0;
  double cum_loss = 0.0;

  Vector z() const;
};

struct LbSample {
  Vector w_tilde;
  Vector s;
  // |last coordinate of z~ - 1| before pinning.
  double pin_residual = 0.0;
};

LinBanditState lb_init(const LinBanditConfig& cfg);
LbSample lb_sample(const LinBanditState& state, Rng& rng);
// d <w~, l> H^{1/2} s; throws if |observed| > 1 + 1e-9.
Vector lb_estimate(const LinBanditState& state, const Vector& s,
                   double observed);
LinBanditState lb_update(const LinBanditState& state, const Vector& loss_hat);
double lb_default_eta(const LinBanditConfig& cfg);

struct LbRound {
  LbSample sample;
  double observed = 0.0;
  Vector loss_hat;
};

// Sample, observe <w~, loss>, estimate and update in place.
LbRound lb_step(LinBanditState& state, const Vector& loss, Rng& rng);

// Lifted comparator in the shrunk set: (w1 + (1 - 1/T)(u - w1), 1).
Vector lb_lift_comparator(const LinBanditSetup& setup, const Vector& u);

// Pathwise quantities; each returns bound minus observed value.
double lb_stability_slack(const LinBanditState& before,
                          const LinBanditState& after, const Vector& loss_hat);
double lb_bregman_slack(const LinBanditState& state, const Vector& u_lifted);
double lb_regterm_slack(const LinBanditState& final_state,
                        const Vector& u_lifted);
double lb_schedule_size_bound(const LinBanditSetup& setup);

// Throws InvariantViolation on broken state invariants.
void lb_check_state(const LinBanditState& state);

}  // namespace hpb

#endif  // HPB_LINEAR_BANDIT_HPP_
