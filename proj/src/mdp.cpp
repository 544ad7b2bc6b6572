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

#include "hpb/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "hpb/errors.hpp"
#include "hpb/freedman.hpp"
#include "hpb/mirror_descent.hpp"

namespace hpb {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void violation(const std::string& what) {
  throw InvariantViolation(what);
}

}  // namespace

MdpLayout::MdpLayout(std::vector<int> layer_sizes, int num_actions)
    : sizes_(std::move(layer_sizes)), actions_(num_actions) {
  if (sizes_.size() < 2 || sizes_.front() != 1 || sizes_.back() != 1)
    throw std::invalid_argument("first and last layers must hold one state");
  if (actions_ < 1) throw std::invalid_argument("need at least one action");
  for (size_t k = 0; k < sizes_.size(); ++k) {
    if (sizes_[k] < 1) throw std::invalid_argument("empty layer");
    offsets_.push_back(offsets_.back() + sizes_[k]);
    for (int s = 0; s < sizes_[k]; ++s) layer_.push_back(static_cast<int>(k));
  }
  for (int x = 0; x < num_active_states(); ++x) {
    for (int a = 0; a < actions_; ++a) {
      triple_base_.push_back(static_cast<int>(triple_x_.size()));
      for (int j = 0; j < next_size(x); ++j) {
        triple_x_.push_back(x);
        triple_a_.push_back(a);
        triple_j_.push_back(j);
      }
    }
  }
}

void LayeredMdp::validate() const {
  if (static_cast<int>(p.size()) != layout.num_active_states())
    throw std::invalid_argument("transition has the wrong number of states");
  for (int x = 0; x < layout.num_active_states(); ++x) {
    if (static_cast<int>(p[x].size()) != layout.num_actions())
      throw std::invalid_argument("transition has the wrong number of actions");
    for (const Vector& row : p[x]) {
      if (row.size() != layout.next_size(x))
        throw std::invalid_argument("transition row has the wrong length");
      if ((row.array() < 0.0).any() || std::abs(row.sum() - 1.0) > 1e-9)
        throw std::invalid_argument("transition row is not a distribution");
    }
  }
}

LayeredMdp random_layered_mdp(const std::vector<int>& layer_sizes,
                              int num_actions, Rng& rng) {
  LayeredMdp mdp{MdpLayout(layer_sizes, num_actions), {}};
  const MdpLayout& l = mdp.layout;
  mdp.p.resize(l.num_active_states());
  for (int x = 0; x < l.num_active_states(); ++x) {
    for (int a = 0; a < num_actions; ++a) {
      Vector row(l.next_size(x));
      for (Eigen::Index j = 0; j < row.size(); ++j)
        row(j) = -std::log(1.0 - rng.uniform());
      mdp.p[x].push_back(row / row.sum());
    }
  }
  return mdp;
}

Transition uniform_transition(const MdpLayout& layout) {
  Transition p(layout.num_active_states());
  for (int x = 0; x < layout.num_active_states(); ++x) {
    const int m = layout.next_size(x);
    p[x].assign(layout.num_actions(), Vector::Constant(m, 1.0 / m));
  }
  return p;
}

Policy uniform_policy(const MdpLayout& layout) {
  return Policy::Constant(layout.num_active_states(), layout.num_actions(),
                          1.0 / layout.num_actions());
}

Vector occupancy(const MdpLayout& layout, const Transition& p,
                 const Policy& pi) {
  Vector reach = Vector::Zero(layout.num_states());
  reach(0) = 1.0;
  Vector w(layout.num_triples());
  for (int x = 0; x < layout.num_active_states(); ++x) {
    const int next = layout.layer_begin(layout.layer_of(x) + 1);
    for (int a = 0; a < layout.num_actions(); ++a) {
      const double q = reach(x) * pi(x, a);
      for (int j = 0; j < layout.next_size(x); ++j) {
        const double v = q * p[x][a](j);
        w(layout.triple(x, a, j)) = v;
        reach(next + j) += v;
      }
    }
  }
  return w;
}

Vector pair_occupancy(const MdpLayout& layout, const Vector& w) {
  Vector q = Vector::Zero(layout.num_pairs());
  for (int i = 0; i < layout.num_triples(); ++i)
    q(layout.pair(layout.triple_x(i), layout.triple_a(i))) += w(i);
  return q;
}

namespace {

// Rows: layer normalization for k = 0..J-1, then flow conservation for
// every state in layers 1..J-1.
void occupancy_equalities(const MdpLayout& l, Matrix& a, Vector& b) {
  const int interior = l.num_active_states() - 1;
  const int rows = l.horizon() + interior;
  a = Matrix::Zero(rows, l.num_triples());
  b = Vector::Zero(rows);
  for (int i = 0; i < l.num_triples(); ++i) {
    const int x = l.triple_x(i);
    const int k = l.layer_of(x);
    a(k, i) = 1.0;
    if (x > 0) a(l.horizon() + x - 1, i) -= 1.0;
    const int dest = l.layer_begin(k + 1) + l.triple_next(i);
    if (dest < l.num_active_states()) a(l.horizon() + dest - 1, i) += 1.0;
  }
  b.head(l.horizon()).setOnes();
}

}  // namespace

double occupancy_residual(const MdpLayout& layout, const Vector& w) {
  Matrix a;
  Vector b;
  occupancy_equalities(layout, a, b);
  return (a * w - b).cwiseAbs().maxCoeff();
}

Policy policy_of(const MdpLayout& layout, const Vector& w) {
  const Vector q = pair_occupancy(layout, w);
  Policy pi(layout.num_active_states(), layout.num_actions());
  for (int x = 0; x < layout.num_active_states(); ++x) {
    double total = 0.0;
    for (int a = 0; a < layout.num_actions(); ++a) total += q(layout.pair(x, a));
    if (!(total > 0.0)) throw NumericError("state with zero occupancy");
    for (int a = 0; a < layout.num_actions(); ++a)
      pi(x, a) = q(layout.pair(x, a)) / total;
  }
  return pi;
}

Roundtrip occupancy_roundtrip(const MdpLayout& layout, const Vector& w) {
  Roundtrip r{policy_of(layout, w), Transition(layout.num_active_states())};
  const Vector q = pair_occupancy(layout, w);
  for (int x = 0; x < layout.num_active_states(); ++x) {
    for (int a = 0; a < layout.num_actions(); ++a) {
      const double qa = q(layout.pair(x, a));
      if (!(qa > 0.0)) throw NumericError("pair with zero occupancy");
      Vector row(layout.next_size(x));
      for (int j = 0; j < row.size(); ++j) row(j) = w(layout.triple(x, a, j)) / qa;
      r.p[x].push_back(row);
    }
  }
  return r;
}

Trajectory run_episode(const LayeredMdp& mdp, const Policy& pi,
                       const Vector& loss, Rng& rng) {
  const MdpLayout& l = mdp.layout;
  Trajectory traj;
  int x = 0;
  traj.states.push_back(x);
  for (int k = 0; k < l.horizon(); ++k) {
    const int a = rng.categorical_vec(pi.row(x));
    traj.steps.push_back({x, a, loss(l.pair(x, a))});
    x = l.layer_begin(k + 1) + rng.categorical_vec(mdp.p[x][a]);
    traj.states.push_back(x);
  }
  return traj;
}

ConfidenceState confidence_init(const MdpLayout& layout, int T, double delta) {
  ConfidenceState cs;
  cs.n = Vector::Zero(layout.num_pairs());
  cs.n_prev = cs.n;
  cs.g = Vector::Zero(layout.num_triples());
  cs.pbar = cs.g;
  cs.eps = Vector::Constant(layout.num_triples(), kInf);
  cs.log_term = std::log(static_cast<double>(T) * layout.num_states() *
                         layout.num_actions() / delta);
  return cs;
}

double confidence_radius(double pbar, double n, double log_term) {
  const double m = std::max(1.0, n - 1.0);
  return 4.0 * std::sqrt(pbar * log_term / m) + 28.0 * log_term / (3.0 * m);
}

bool update_confidence(ConfidenceState& cs, const MdpLayout& layout,
                       const Trajectory& traj) {
  bool trigger = false;
  for (size_t k = 0; k < traj.steps.size(); ++k) {
    const int x = traj.steps[k].x, a = traj.steps[k].a;
    const int pr = layout.pair(x, a);
    cs.n(pr) += 1.0;
    const int j = traj.states[k + 1] - layout.layer_begin(layout.layer_of(x) + 1);
    cs.g(layout.triple(x, a, j)) += 1.0;
    if (cs.n(pr) >= std::max(1.0, 2.0 * cs.n_prev(pr))) trigger = true;
  }
  if (!trigger) return false;
  ++cs.epoch;
  cs.n_prev = cs.n;
  for (int i = 0; i < layout.num_triples(); ++i) {
    const double n = cs.n(layout.pair(layout.triple_x(i), layout.triple_a(i)));
    cs.pbar(i) = cs.g(i) / std::max(1.0, n);
    cs.eps(i) = confidence_radius(cs.pbar(i), n, cs.log_term);
  }
  return true;
}

double confidence_lower(const ConfidenceState& cs, int triple) {
  return std::max(0.0, cs.pbar(triple) - cs.eps(triple));
}

double confidence_upper(const ConfidenceState& cs, int triple) {
  return std::min(1.0, cs.pbar(triple) + cs.eps(triple));
}

bool confidence_contains(const ConfidenceState& cs, const MdpLayout& layout,
                         const Transition& p, double tol) {
  for (int i = 0; i < layout.num_triples(); ++i) {
    const double v = p[layout.triple_x(i)][layout.triple_a(i)](layout.triple_next(i));
    if (std::abs(v - cs.pbar(i)) > cs.eps(i) + tol) return false;
  }
  return true;
}

double box_simplex_max(const Vector& lo, const Vector& hi, const Vector& f) {
  const double total_lo = lo.sum();
  if (total_lo > 1.0 + 1e-12 || hi.sum() < 1.0 - 1e-12)
    throw InfeasibleError("confidence box does not meet the simplex");
  std::vector<int> order(f.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&f](int i, int j) { return f(i) > f(j); });
  double residual = 1.0 - total_lo;
  double value = lo.dot(f);
  for (int i : order) {
    if (residual <= 0.0) break;
    const double add = std::min(residual, hi(i) - lo(i));
    value += add * f(i);
    residual -= add;
  }
  return value;
}

namespace {

// Max probability of reaching `target` from each state of earlier layers.
// Returns the value at the start state.
double max_reach(const MdpLayout& l, const Policy& pi, int target,
                 const ConfidenceState& cs) {
  const int kt = l.layer_of(target);
  Vector f = Vector::Zero(l.layer_size(kt));
  f(target - l.layer_begin(kt)) = 1.0;
  for (int k = kt - 1; k >= 0; --k) {
    Vector prev = Vector::Zero(l.layer_size(k));
    for (int s = 0; s < l.layer_size(k); ++s) {
      const int x = l.layer_begin(k) + s;
      const int m = l.next_size(x);
      for (int a = 0; a < l.num_actions(); ++a) {
        if (pi(x, a) == 0.0) continue;
        Vector lo(m), hi(m);
        for (int j = 0; j < m; ++j) {
          lo(j) = confidence_lower(cs, l.triple(x, a, j));
          hi(j) = confidence_upper(cs, l.triple(x, a, j));
        }
        prev(s) += pi(x, a) * box_simplex_max(lo, hi, f);
      }
    }
    f = std::move(prev);
  }
  return f(0);
}

}  // namespace

double comp_uob(const MdpLayout& layout, const Policy& pi, int x, int a,
                const ConfidenceState& cs) {
  return pi(x, a) * max_reach(layout, pi, x, cs);
}

Vector comp_uob_all(const MdpLayout& layout, const Policy& pi,
                    const ConfidenceState& cs) {
  Vector phi(layout.num_pairs());
  for (int x = 0; x < layout.num_active_states(); ++x) {
    const double reach = max_reach(layout, pi, x, cs);
    for (int a = 0; a < layout.num_actions(); ++a)
      phi(layout.pair(x, a)) = pi(x, a) * reach;
  }
  return phi;
}

double MdpConfig::resolved_kappa() const {
  return kappa > 0.0 ? kappa : std::exp(1.0 / (7.0 * std::log(T)));
}

void MdpConfig::validate() const {
  if (T < 8) throw std::invalid_argument("T must be at least 8");
  if (!(eta > 0.0)) throw std::invalid_argument("eta must be positive");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("delta must lie in (0, 1)");
  if (kappa != 0.0 && !(kappa > 1.0))
    throw std::invalid_argument("kappa must exceed 1");
}

MdpState mdp_init(const MdpLayout& layout, const MdpConfig& cfg) {
  cfg.validate();
  MdpState s;
  s.layout = layout;
  s.T = cfg.T;
  s.eta0 = cfg.eta;
  s.kappa = cfg.resolved_kappa();
  const double nx = layout.num_states();
  s.floor = 1.0 / (std::pow(cfg.T, 3) * nx * nx * layout.num_actions());
  s.w.resize(layout.num_triples());
  for (int i = 0; i < layout.num_triples(); ++i) {
    const int x = layout.triple_x(i);
    s.w(i) = 1.0 / (layout.layer_size(layout.layer_of(x)) *
                    layout.num_actions() * layout.next_size(x));
  }
  s.pi = policy_of(layout, s.w);
  s.eta = Vector::Constant(layout.num_pairs(), cfg.eta);
  s.rho.resize(layout.num_pairs());
  for (int x = 0; x < layout.num_active_states(); ++x)
    for (int a = 0; a < layout.num_actions(); ++a)
      s.rho(layout.pair(x, a)) =
          2.0 * layout.layer_size(layout.layer_of(x)) * layout.num_actions();
  s.increases.assign(layout.num_pairs(), 0);
  s.conf = confidence_init(layout, cfg.T, cfg.delta);
  s.phi = comp_uob_all(layout, s.pi, s.conf);
  return s;
}

Vector mdp_estimate(const MdpState& state, const Trajectory& traj) {
  Vector est = Vector::Zero(state.layout.num_pairs());
  for (const EpisodeStep& st : traj.steps) {
    const int pr = state.layout.pair(st.x, st.a);
    if (st.loss < 0.0 || st.loss > 1.0)
      throw std::invalid_argument("MDP loss outside [0, 1]");
    if (state.phi(pr) < state.floor * (1.0 - 1e-9))
      violation("upper occupancy bound below the floor");
    est(pr) = st.loss / state.phi(pr);
  }
  return est;
}

namespace {

// Floor plus the ratio constraints that actually cut: C w <= d.
void omd_inequalities(const MdpState& s, Matrix& c, Vector& d) {
  const MdpLayout& l = s.layout;
  std::vector<std::pair<int, double>> lower, upper;
  for (int i = 0; i < l.num_triples(); ++i) {
    const double lo = confidence_lower(s.conf, i);
    const double hi = confidence_upper(s.conf, i);
    if (lo > 0.0) lower.emplace_back(i, lo);
    if (hi < 1.0) upper.emplace_back(i, hi);
  }
  const int n = l.num_triples();
  const int rows = n + static_cast<int>(lower.size() + upper.size());
  c = Matrix::Zero(rows, n);
  d = Vector::Zero(rows);
  for (int i = 0; i < n; ++i) {
    c(i, i) = -1.0;
    d(i) = -s.floor;
  }
  int r = n;
  auto add_ratio = [&](int i, double coef, double sign) {
    // sign * (coef * w(x,a) - w(x,a,x')) <= 0
    const int x = l.triple_x(i), a = l.triple_a(i);
    for (int j = 0; j < l.next_size(x); ++j) c(r, l.triple(x, a, j)) = sign * coef;
    c(r, i) -= sign;
    ++r;
  };
  for (const auto& [i, lo] : lower) add_ratio(i, lo, 1.0);
  for (const auto& [i, hi] : upper) add_ratio(i, hi, -1.0);
}

bool strictly_feasible(const Matrix& c, const Vector& d, const Vector& w) {
  return ((d - c * w).array() > 0.0).all();
}

// Occupancy of a kernel pulled slightly from the empirical one towards the
// uniform kernel, under the current policy.
std::optional<Vector> interior_start(const MdpState& s, const Matrix& c,
                                     const Vector& d) {
  const MdpLayout& l = s.layout;
  Transition center = uniform_transition(l);
  if (s.conf.epoch > 1) {
    for (int x = 0; x < l.num_active_states(); ++x) {
      for (int a = 0; a < l.num_actions(); ++a) {
        Vector row(l.next_size(x));
        for (int j = 0; j < row.size(); ++j) row(j) = s.conf.pbar(l.triple(x, a, j));
        // Unvisited pairs have an all-zero empirical row.
        if (row.sum() > 0.5) center[x][a] = row;
      }
    }
  }
  const Transition unif = uniform_transition(l);
  const double min_eps = s.conf.eps.minCoeff();
  for (double gamma : {0.5, 0.1, 0.01}) {
    const double g = std::min(gamma, 0.5 * min_eps);
    Transition p = center;
    for (int x = 0; x < l.num_active_states(); ++x)
      for (int a = 0; a < l.num_actions(); ++a)
        p[x][a] = (1.0 - g) * center[x][a] + g * unif[x][a];
    const Vector w = occupancy(l, p, s.pi);
    if (strictly_feasible(c, d, w)) return w;
  }
  return std::nullopt;
}

}  // namespace

Vector mdp_omd_step(const MdpState& state, const Vector& loss_hat) {
  const MdpLayout& l = state.layout;
  Matrix c;
  Vector d;
  omd_inequalities(state, c, d);
  const bool ref_ok = strictly_feasible(c, d, state.w);
  if (ref_ok && loss_hat.cwiseAbs().maxCoeff() == 0.0) return state.w;

  OmdProblem p;
  p.g.resize(l.num_triples());
  Vector weights(l.num_triples());
  for (int i = 0; i < l.num_triples(); ++i) {
    const int pr = l.pair(l.triple_x(i), l.triple_a(i));
    p.g(i) = loss_hat(pr);
    weights(i) = 1.0 / state.eta(pr);
  }
  p.w_ref = state.w;
  p.reg = weighted_log_barrier(weights);
  p.extra = linear_inequalities(c, d);
  occupancy_equalities(l, p.a_eq, p.b_eq);
  if (!ref_ok) {
    p.start = interior_start(state, c, d);
    if (!p.start)
      throw InfeasibleError(
          "no strictly feasible occupancy measure for the current epoch");
  }
  return omd_step(p).w;
}

void mdp_lr_update(MdpState& state, const Vector& phi_next) {
  for (int pr = 0; pr < state.layout.num_pairs(); ++pr) {
    if (1.0 / phi_next(pr) >= state.rho(pr)) {
      state.rho(pr) = 2.0 / phi_next(pr);
      state.eta(pr) *= state.kappa;
      ++state.increases[pr];
      state.events.push_back({state.t, pr, state.eta(pr), state.rho(pr)});
    }
  }
  state.phi = phi_next;
}

MdpRound mdp_step(MdpState& state, const LayeredMdp& mdp, const Vector& loss,
                  Rng& rng) {
  MdpRound r;
  r.traj = run_episode(mdp, state.pi, loss, rng);
  r.loss_hat = mdp_estimate(state, r.traj);
  for (const EpisodeStep& st : r.traj.steps) state.cum_loss += st.loss;
  r.new_epoch = update_confidence(state.conf, state.layout, r.traj);
  state.w = mdp_omd_step(state, r.loss_hat);
  state.pi = policy_of(state.layout, state.w);
  mdp_lr_update(state, comp_uob_all(state.layout, state.pi, state.conf));
  ++state.t;
  return r;
}

double mdp_default_eta(const MdpLayout& layout, int T, double delta,
                       double lstar) {
  const double nx = layout.num_states(), na = layout.num_actions();
  const double b = std::pow(static_cast<double>(T), 3) * nx * nx * na;
  const double c = freedman_c(b, T);
  if (!(lstar > 0.0)) lstar = static_cast<double>(layout.horizon()) * T;
  const double small_loss = std::sqrt(nx * nx * na / (lstar * std::log(1.0 / delta)));
  const double cap =
      1.0 / (280.0 * c * std::log(c * nx * na / delta) * std::log(T));
  return std::min(small_loss, cap);
}

Transition construct_p0(const LayeredMdp& mdp, int T) {
  const MdpLayout& l = mdp.layout;
  const double lo = 1.0 / (static_cast<double>(T) * l.num_states());
  Transition p0 = mdp.p;
  for (auto& rows : p0) {
    for (Vector& row : rows) {
      for (Eigen::Index j = 0; j < row.size(); ++j) {
        if (row(j) >= lo) continue;
        Eigen::Index top;
        row.maxCoeff(&top);
        row(top) -= lo - row(j);
        row(j) = lo;
      }
    }
  }
  return p0;
}

Vector comparator_u(const LayeredMdp& mdp, const Transition& p0,
                    const Policy& best, int T) {
  const MdpLayout& l = mdp.layout;
  Vector u = (1.0 - 1.0 / T) * occupancy(l, mdp.p, best);
  for (int a = 0; a < l.num_actions(); ++a) {
    Policy pa = Policy::Zero(l.num_active_states(), l.num_actions());
    pa.col(a).setOnes();
    u += occupancy(l, p0, pa) / (static_cast<double>(T) * l.num_actions());
  }
  return u;
}

Policy best_policy(const LayeredMdp& mdp, const Vector& loss) {
  const MdpLayout& l = mdp.layout;
  Vector value = Vector::Zero(l.num_states());
  Policy pi = Policy::Zero(l.num_active_states(), l.num_actions());
  for (int x = l.num_active_states() - 1; x >= 0; --x) {
    const int next = l.layer_begin(l.layer_of(x) + 1);
    double best = kInf;
    int arg = 0;
    for (int a = 0; a < l.num_actions(); ++a) {
      const double q = loss(l.pair(x, a)) +
                       mdp.p[x][a].dot(value.segment(next, l.next_size(x)));
      if (q < best) {
        best = q;
        arg = a;
      }
    }
    value(x) = best;
    pi(x, arg) = 1.0;
  }
  return pi;
}

double expected_loss(const LayeredMdp& mdp, const Policy& pi,
                     const Vector& loss) {
  return pair_occupancy(mdp.layout, occupancy(mdp.layout, mdp.p, pi)).dot(loss);
}

void mdp_check_state(const MdpState& s) {
  const MdpLayout& l = s.layout;
  std::ostringstream os;
  const double resid = occupancy_residual(l, s.w);
  if (resid > 1e-9) {
    os << "occupancy conditions violated by " << resid;
    violation(os.str());
  }
  if (s.w.minCoeff() < s.floor * (1.0 - 1e-9)) violation("occupancy below floor");
  const Vector q = pair_occupancy(l, s.w);
  const int cap = static_cast<int>(std::ceil(7.0 * std::log2(s.T)));
  for (int pr = 0; pr < l.num_pairs(); ++pr) {
    if (s.eta(pr) > 5.0 * s.eta0 * (1.0 + 1e-12)) violation("learning rate above 5 eta");
    if (s.increases[pr] > cap) violation("too many learning-rate increases");
    if (s.phi(pr) < q(pr) * (1.0 - 1e-9) - 1e-12) {
      os << "upper occupancy bound " << s.phi(pr) << " below occupancy " << q(pr);
      violation(os.str());
    }
  }
}

void mdp_check_uob(const MdpState& s, const LayeredMdp& mdp) {
  if (!confidence_contains(s.conf, s.layout, mdp.p)) return;
  const Vector q = pair_occupancy(s.layout, occupancy(s.layout, mdp.p, s.pi));
  for (int pr = 0; pr < s.layout.num_pairs(); ++pr)
    if (s.phi(pr) < q(pr) * (1.0 - 1e-9) - 1e-12)
      violation("upper occupancy bound below the true visit probability");
}

}  // namespace hpb
