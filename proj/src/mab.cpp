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

#include "hpb/mab.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "hpb/errors.hpp"

namespace hpb {

double MabConfig::resolved_kappa() const {
  return kappa > 0.0 ? kappa : std::exp(1.0 / std::log(static_cast<double>(T)));
}

void MabConfig::validate() const {
  if (d < 2) throw std::invalid_argument("mab: need d >= 2");
  if (T < 8) throw std::invalid_argument("mab: need T >= 8");
  if (d >= T) throw std::invalid_argument("mab: need d < T");
  if (!(eta > 0.0 && eta <= 0.5))
    throw std::invalid_argument("mab: need 0 < eta <= 1/2");
  if (!(resolved_kappa() > 1.0)) throw std::invalid_argument("mab: need kappa > 1");
}

MabState mab_init(const MabConfig& cfg) {
  cfg.validate();
  MabState s;
  s.d = cfg.d;
  s.T = cfg.T;
  s.eta0 = cfg.eta;
  s.kappa = cfg.resolved_kappa();
  s.w = Vector::Constant(cfg.d, 1.0 / cfg.d);
  s.eta = Vector::Constant(cfg.d, cfg.eta);
  s.rho = Vector::Constant(cfg.d, 2.0 * cfg.d);
  s.increases.assign(cfg.d, 0);
  s.cum_estimate = Vector::Zero(cfg.d);
  return s;
}

int mab_sample(const MabState& state, Rng& rng) {
  return rng.categorical_vec(state.w);
}

Vector mab_estimate(const MabState& state, int arm, double loss) {
  if (!(loss >= 0.0 && loss <= 1.0))
    throw std::invalid_argument("mab_estimate: loss must lie in [0, 1]");
  if (arm < 0 || arm >= state.d)
    throw std::invalid_argument("mab_estimate: arm out of range");
  Vector est = Vector::Zero(state.d);
  est(arm) = loss / state.w(arm);
  return est;
}

namespace {

double weight_at(double w, double eta, double lhat, double lambda,
                 double floor) {
  const double denom = 1.0 / w + eta * (lhat + lambda);
  if (denom <= 0.0) return std::numeric_limits<double>::infinity();
  return std::max(floor, 1.0 / denom);
}

double weight_sum(const Vector& w, const Vector& eta, const Vector& lhat,
                  double lambda, double floor) {
  double s = 0.0;
  for (int i = 0; i < w.size(); ++i)
    s += weight_at(w(i), eta(i), lhat(i), lambda, floor);
  return s;
}

}  // namespace

Vector mab_omd_solve(const Vector& w, const Vector& eta, const Vector& loss_hat,
                     double floor) {
  if ((loss_hat.array() == 0.0).all()) return w;
  const int d = static_cast<int>(w.size());
  double lo = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < d; ++i) lo = std::max(lo, 1.0 / (eta(i) * w(i)));
  lo = -lo;
  double hi = loss_hat.maxCoeff() + d / floor;
  // The bracket from the KKT bounds; widen defensively if it fails.
  for (int k = 0; k < 60 && weight_sum(w, eta, loss_hat, lo, floor) < 1.0; ++k)
    lo = 2.0 * lo - 1.0;
  for (int k = 0; k < 60 && weight_sum(w, eta, loss_hat, hi, floor) > 1.0; ++k)
    hi = 2.0 * hi + 1.0;
  double mid = 0.5 * (lo + hi);
  bool ok = false;
  for (int it = 0; it < 200; ++it) {
    mid = 0.5 * (lo + hi);
    const double s = weight_sum(w, eta, loss_hat, mid, floor);
    if (std::abs(s - 1.0) <= 1e-12) {
      ok = true;
      break;
    }
    if (s > 1.0)
      lo = mid;
    else
      hi = mid;
    if (!(hi - lo > 0.0)) break;
  }
  if (!ok) {
    const double s = weight_sum(w, eta, loss_hat, mid, floor);
    if (!(std::abs(s - 1.0) <= 1e-11))
      throw std::runtime_error("mab_update: multiplier bisection failed");
  }
  Vector out(d);
  for (int i = 0; i < d; ++i)
    out(i) = weight_at(w(i), eta(i), loss_hat(i), mid, floor);
  return out;
}

MabState mab_update(const MabState& state, const Vector& loss_hat) {
  MabState next = state;
  const double floor = 1.0 / state.T;
  next.w = mab_omd_solve(state.w, state.eta, loss_hat, floor);
  next.cum_estimate += loss_hat;
  next.t = state.t + 1;
  for (int i = 0; i < state.d; ++i) {
    if (1.0 / next.w(i) > state.rho(i)) {
      next.rho(i) = 2.0 / next.w(i);
      next.eta(i) = state.eta(i) * state.kappa;
      ++next.increases[i];
      next.events.push_back({next.t, i, next.eta(i), next.rho(i)});
    }
  }
  return next;
}

double mab_default_eta(const MabConfig& cfg, double lstar_guess) {
  if (!(lstar_guess >= 1.0))
    throw std::invalid_argument("mab_default_eta: need L* >= 1");
  const double lt = std::log2(static_cast<double>(cfg.T));
  const double c = std::ceil(lt) * std::ceil(3.0 * lt);
  const double lnt = std::log(static_cast<double>(cfg.T));
  const double a = std::sqrt(cfg.d / lstar_guess * std::log(1.0 / cfg.delta));
  const double b = 1.0 / (40.0 * c * lnt * std::log(c / cfg.delta));
  return std::min({a, b, 0.5});
}

Vector mab_comparator(int d, int T, int best) {
  Vector u = Vector::Constant(d, 1.0 / T);
  u(best) += 1.0 - static_cast<double>(d) / T;
  return u;
}

double mab_pathwise_slack(const MabState& s, const Vector& u) {
  const double lnt = std::log(static_cast<double>(s.T));
  const double eta = s.eta0;
  double rhs = s.d * lnt / eta + 5.0 * eta * s.cum_loss;
  for (int j = 0; j < s.d; ++j)
    rhs += (2.0 + 2.0 * lnt - u(j) * s.rho(j)) / (10.0 * eta * lnt);
  const double lhs = s.cum_loss - u.dot(s.cum_estimate);
  return rhs - lhs;
}

void mab_check_state(const MabState& s) {
  auto fail = [&](const std::string& what) {
    std::ostringstream os;
    os << "mab invariant violated at round " << s.t << ": " << what;
    throw InvariantViolation(os.str());
  };
  const double floor = 1.0 / s.T;
  if (std::abs(s.w.sum() - 1.0) > 1e-9) fail("weights do not sum to 1");
  if (s.w.minCoeff() < floor * (1.0 - 1e-12)) fail("weight below 1/T");
  const int max_inc =
      static_cast<int>(std::ceil(std::log2(static_cast<double>(s.T) / s.d))) + 1;
  for (int i = 0; i < s.d; ++i) {
    if (s.rho(i) < 2.0 * s.d) fail("threshold below 2d");
    if (s.eta(i) > 5.0 * s.eta0 * (1.0 + 1e-12)) fail("learning rate above 5 eta");
    const double expect = s.eta0 * std::pow(s.kappa, s.increases[i]);
    if (std::abs(s.eta(i) - expect) > 1e-10 * expect)
      fail("learning rate differs from eta kappa^n");
    if (s.increases[i] > max_inc) fail("too many learning-rate increases");
  }
}

}  // namespace hpb
