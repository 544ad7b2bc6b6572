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

#ifndef HPB_MDP_HPP_
#define HPB_MDP_HPP_

#include <memory>
#include <vector>

#include "hpb/linalg.hpp"
#include "hpb/mab.hpp"
#include "hpb/rng.hpp"

namespace hpb {

// Kernel indexed as p[x][a](j), j the local index of the next state within
// layer k(x)+1. Defined for every non-terminal state x.
using Transition = std::vector<std::vector<Vector>>;
// Row x holds pi(.|x) for non-terminal x.
using Policy = Matrix;

// State and triple bookkeeping for a layered episodic MDP. States are
// numbered layer by layer; the first and last layers hold one state each.
class MdpLayout {
 public:
  MdpLayout() = default;
  MdpLayout(std::vector<int> layer_sizes, int num_actions);

  int horizon() const { return static_cast<int>(sizes_.size()) - 1; }
  int num_actions() const { return actions_; }
  int num_states() const { return offsets_.back(); }
  // States in layers 0..J-1.
  int num_active_states() const { return offsets_[horizon()]; }
  int num_pairs() const { return num_active_states() * actions_; }
  int num_triples() const { return static_cast<int>(triple_x_.size()); }
  int layer_size(int k) const { return sizes_[k]; }
  int layer_begin(int k) const { return offsets_[k]; }
  int layer_of(int x) const { return layer_[x]; }
  int next_size(int x) const { return sizes_[layer_[x] + 1]; }

  int pair(int x, int a) const { return x * actions_ + a; }
  // Triple (x, a, j) with j local in the next layer.
  int triple(int x, int a, int j) const { return triple_base_[pair(x, a)] + j; }
  int triple_x(int i) const { return triple_x_[i]; }
  int triple_a(int i) const { return triple_a_[i]; }
  int triple_next(int i) const { return triple_j_[i]; }

 private:
  std::vector<int> sizes_;
  int actions_ = 0;
  std::vector<int> offsets_{0};
  std::vector<int> layer_;
  std::vector<int> triple_base_;
  std::vector<int> triple_x_, triple_a_, triple_j_;
};

struct LayeredMdp {
  MdpLayout layout;
  Transition p;

  // Throws std::invalid_argument on a malformed kernel.
  void validate() const;
};

// Rows drawn uniformly from the simplex.
LayeredMdp random_layered_mdp(const std::vector<int>& layer_sizes,
                              int num_actions, Rng& rng);
Transition uniform_transition(const MdpLayout& layout);
Policy uniform_policy(const MdpLayout& layout);

// Occupancy over triples by forward dynamic programming.
Vector occupancy(const MdpLayout& layout, const Transition& p,
                 const Policy& pi);
// Marginal over (x, a).
Vector pair_occupancy(const MdpLayout& layout, const Vector& w);
// Max violation of layer normalization and flow conservation.
double occupancy_residual(const MdpLayout& layout, const Vector& w);

struct Roundtrip {
  Policy pi;
  Transition p;
};
Roundtrip occupancy_roundtrip(const MdpLayout& layout, const Vector& w);
Policy policy_of(const MdpLayout& layout, const Vector& w);

struct EpisodeStep {
  int x = 0;
  int a = 0;
  double loss = 0.0;
};
struct Trajectory {
  std::vector<EpisodeStep> steps;
  // Visited states, one per layer (J + 1 entries).
  std::vector<int> states;
};
// Losses are indexed by pair.
Trajectory run_episode(const LayeredMdp& mdp, const Policy& pi,
                       const Vector& loss, Rng& rng);

struct ConfidenceState {
  int epoch = 1;
  Vector n;       // per pair
  Vector n_prev;  // per pair, counters at the start of the epoch
  Vector g;       // per triple
  Vector pbar;    // per triple, frozen for the epoch
  Vector eps;     // per triple; +inf in the first epoch
  double log_term = 0.0;
};

ConfidenceState confidence_init(const MdpLayout& layout, int T, double delta);
// Radius formula for one entry.
double confidence_radius(double pbar, double n, double log_term);
// Adds the trajectory's counts; returns true when a new epoch starts.
bool update_confidence(ConfidenceState& cs, const MdpLayout& layout,
                       const Trajectory& traj);
double confidence_lower(const ConfidenceState& cs, int triple);
double confidence_upper(const ConfidenceState& cs, int triple);
bool confidence_contains(const ConfidenceState& cs, const MdpLayout& layout,
                         const Transition& p, double tol = 0.0);

// max p . f over the box [lo, hi] intersected with the simplex.
double box_simplex_max(const Vector& lo, const Vector& hi, const Vector& f);
// Largest probability of visiting (x, a) under pi over the confidence set.
double comp_uob(const MdpLayout& layout, const Policy& pi, int x, int a,
                const ConfidenceState& cs);
// comp_uob for every pair.
Vector comp_uob_all(const MdpLayout& layout, const Policy& pi,
                    const ConfidenceState& cs);

struct MdpConfig {
  int T = 8;
  double eta = 0.1;
  double delta = 0.05;
  // Zero selects exp(1 / (7 ln T)).
  double kappa = 0.0;

  double resolved_kappa() const;
  void validate() const;
};

struct MdpState {
  MdpLayout layout;
  int t = 1;
  int T = 0;
  double eta0 = 0.0;
  double kappa = 0.0;
  double floor = 0.0;
  Vector w;  // per triple
  Policy pi;
  Vector eta, rho, phi;  // per pair
  std::vector<int> increases;
  ConfidenceState conf;
  std::vector<ScheduleEvent> events;
  double cum_loss = 0.0;
  int solver_iterations = 0;
};

MdpState mdp_init(const MdpLayout& layout, const MdpConfig& cfg);
// Per pair; nonzero only on the visited pairs.
Vector mdp_estimate(const MdpState& state, const Trajectory& traj);
// OMD over occupancy measures consistent with the current confidence set.
// Throws InfeasibleError when no strictly feasible point is found.
Vector mdp_omd_step(const MdpState& state, const Vector& loss_hat);
void mdp_lr_update(MdpState& state, const Vector& phi_next);

struct MdpRound {
  Trajectory traj;
  Vector loss_hat;
  bool new_epoch = false;
};
// Episode, estimate, counters, OMD step, policy, upper bounds, schedule.
MdpRound mdp_step(MdpState& state, const LayeredMdp& mdp, const Vector& loss,
                  Rng& rng);

double mdp_default_eta(const MdpLayout& layout, int T, double delta,
                       double lstar);

// Raises entries below 1/(T|X|), taking mass from the row maximum.
Transition construct_p0(const LayeredMdp& mdp, int T);
// (1 - 1/T) w* + 1/(T|A|) sum_a w^{P0, pi_a}.
Vector comparator_u(const LayeredMdp& mdp, const Transition& p0,
                    const Policy& best, int T);

// Deterministic policy minimizing <w^{P,pi}, loss> by backward induction.
Policy best_policy(const LayeredMdp& mdp, const Vector& loss);
double expected_loss(const LayeredMdp& mdp, const Policy& pi,
                     const Vector& loss);

// Throws InvariantViolation on a broken learner invariant.
void mdp_check_state(const MdpState& state);
// Upper bounds dominate the true visit probabilities whenever the true
// kernel lies in the confidence set.
void mdp_check_uob(const MdpState& state, const LayeredMdp& mdp);

}  // namespace hpb

#endif  // HPB_MDP_HPP_
