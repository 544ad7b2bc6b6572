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

#ifndef HPB_MAB_HPP_
#define HPB_MAB_HPP_

#include <vector>

#include "hpb/linalg.hpp"
#include "hpb/rng.hpp"

namespace hpb {

struct MabConfig {
  int d = 2;
  int T = 8;
  double eta = 0.1;
  double delta = 0.05;
  // Zero selects exp(1 / ln T).
  double kappa = 0.0;

  double resolved_kappa() const;
  // Throws std::invalid_argument when the config is out of range.
  void validate() const;
};

// One learning-rate increase: arm (or pair / round index) and new values.
struct ScheduleEvent {
  int round = 0;
  int index = 0;
  double eta = 0.0;
  double rho = 0.0;
};

struct MabState {
  int t = 1;
  int d = 0;
  int T = 0;
  double eta0 = 0.0;
  double kappa = 0.0;
  Vector w;
  Vector eta;
  Vector rho;
  std::vector<int> increases;
  // Running sums used by the pathwise checks.
  double cum_loss = 0.0;
  Vector cum_estimate;
  std::vector<ScheduleEvent> events;
};

MabState mab_init(const MabConfig& cfg);
int mab_sample(const MabState& state, Rng& rng);
// Importance-weighted estimate; throws if loss is outside [0, 1].
Vector mab_estimate(const MabState& state, int arm, double loss);
// OMD step over the truncated simplex followed by the threshold schedule.
// Throws std::runtime_error if the multiplier bisection fails.
MabState mab_update(const MabState& state, const Vector& loss_hat);

// Solves the KKT system of the weighted log-barrier step by bisection on the
// simplex multiplier. Exposed for oracle tests.
Vector mab_omd_solve(const Vector& w, const Vector& eta, const Vector& loss_hat,
                     double floor);

double mab_default_eta(const MabConfig& cfg, double lstar_guess);

// (1 - d/T) e_best + 1/T.
Vector mab_comparator(int d, int T, int best);

// Right-hand side minus left-hand side of the explicit-constant pathwise
// bound; nonnegative when the bound holds.
double mab_pathwise_slack(const MabState& final_state, const Vector& u);

// Throws InvariantViolation when a state invariant is broken.
void mab_check_state(const MabState& state);

}  // namespace hpb

#endif  // HPB_MAB_HPP_
