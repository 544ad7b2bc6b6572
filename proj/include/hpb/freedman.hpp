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

#ifndef HPB_FREEDMAN_HPP_
#define HPB_FREEDMAN_HPP_

#include <functional>
#include <string>
#include <vector>

#include "hpb/rng.hpp"

namespace hpb {

struct FreedmanInputs {
  double V = 1.0;      // max(1, sum of conditional variances)
  double Bstar = 1.0;  // max_t B_t
  double b = 1.0;      // a-priori cap on B_t
  double T = 1.0;
  double delta = 0.05;
};

// max(1, ceil(log2 b) * ceil(log2(b^2 T))).
double freedman_c(double b, double T);
// C (sqrt(8 V ln(C/delta)) + 2 B* ln(C/delta)).
double freedman_bound(const FreedmanInputs& in);

// One round of a martingale difference sequence: X_t, its predictable bound
// B_t with X_t <= B_t, and E[X_t^2 | past].
struct MartingaleStep {
  double x = 0.0;
  double bound = 1.0;
  double cond_var = 0.0;
};

struct MartingaleProcess {
  std::string name;
  double b = 1.0;
  int T = 0;
  std::function<std::vector<MartingaleStep>(Rng&)> sample;
};

// Sum, variance total and realized range of one trajectory.
struct FreedmanTrial {
  double sum = 0.0;
  double V = 1.0;
  double Bstar = 1.0;
};

// Throws InvariantViolation if a step has X_t > B_t or B_t outside [1, b].
FreedmanTrial summarize_trial(const MartingaleProcess& p,
                              const std::vector<MartingaleStep>& steps);

struct FreedmanReport {
  int trials = 0;
  int violations = 0;
  double frequency = 0.0;
  // delta + 3 sqrt(delta (1 - delta) / trials).
  double limit = 0.0;
  bool ok() const { return frequency <= limit; }
};

FreedmanReport evaluate_trials(const MartingaleProcess& p,
                               const std::vector<FreedmanTrial>& trials,
                               double delta);
std::vector<FreedmanTrial> run_trials(const MartingaleProcess& p, int trials,
                                      std::uint64_t seed);
FreedmanReport mc_validate_freedman(const MartingaleProcess& p, double delta,
                                    int trials, std::uint64_t seed);

MartingaleProcess zero_process(int T);
// X_t = B_t (xi_t - p) with xi_t ~ Bernoulli(p); B_t doubles (up to b)
// whenever the running sum exceeds it in absolute value.
MartingaleProcess bernoulli_doubling_process(int T, double p, double b);
// <u, lhat_t - l_t> along a run of the MAB learner on Bernoulli arms, with
// B_t = <rho_t, u> and u the comparator of the best arm.
MartingaleProcess mab_replay_process(int d, int T, double eta,
                                     std::vector<double> means);

}  // namespace hpb

#endif  // HPB_FREEDMAN_HPP_
