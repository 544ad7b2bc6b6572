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

#include "hpb/freedman.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "hpb/errors.hpp"
#include "hpb/mab.hpp"

namespace hpb {

double freedman_c(double b, double T) {
  const double c = std::ceil(std::log2(b)) * std::ceil(std::log2(b * b * T));
  return std::max(1.0, c);
}

double freedman_bound(const FreedmanInputs& in) {
  if (!(in.delta > 0.0 && in.delta < 1.0))
    throw std::invalid_argument("freedman_bound: delta must lie in (0, 1)");
  if (!(in.V >= 1.0)) throw std::invalid_argument("freedman_bound: need V >= 1");
  if (!(in.Bstar >= 1.0 && in.Bstar <= in.b))
    throw std::invalid_argument("freedman_bound: need 1 <= B* <= b");
  const double c = freedman_c(in.b, in.T);
  const double l = std::log(c / in.delta);
  return c * (std::sqrt(8.0 * in.V * l) + 2.0 * in.Bstar * l);
}

FreedmanTrial summarize_trial(const MartingaleProcess& p,
                              const std::vector<MartingaleStep>& steps) {
  FreedmanTrial out;
  double var = 0.0;
  for (size_t t = 0; t < steps.size(); ++t) {
    const MartingaleStep& s = steps[t];
    if (s.x > s.bound * (1.0 + 1e-12) || s.bound < 1.0 ||
        s.bound > p.b * (1.0 + 1e-12)) {
      std::ostringstream os;
      os << p.name << ": step " << t << " breaks X_t <= B_t in [1, b] (X="
         << s.x << ", B=" << s.bound << ")";
      throw InvariantViolation(os.str());
    }
    out.sum += s.x;
    var += s.cond_var;
    out.Bstar = std::max(out.Bstar, std::min(s.bound, p.b));
  }
  out.V = std::max(1.0, var);
  return out;
}

FreedmanReport evaluate_trials(const MartingaleProcess& p,
                               const std::vector<FreedmanTrial>& trials,
                               double delta) {
  FreedmanReport r;
  r.trials = static_cast<int>(trials.size());
  for (const FreedmanTrial& t : trials) {
    const double bound = freedman_bound({t.V, t.Bstar, p.b,
                                         static_cast<double>(p.T), delta});
    if (t.sum > bound) ++r.violations;
  }
  r.frequency = r.trials ? static_cast<double>(r.violations) / r.trials : 0.0;
  r.limit = delta + 3.0 * std::sqrt(delta * (1.0 - delta) / std::max(1, r.trials));
  return r;
}

std::vector<FreedmanTrial> run_trials(const MartingaleProcess& p, int trials,
                                      std::uint64_t seed) {
  std::vector<FreedmanTrial> out;
  out.reserve(trials);
  const Rng root(seed);
  for (int k = 0; k < trials; ++k) {
    Rng rng = root.split(static_cast<std::uint64_t>(k));
    out.push_back(summarize_trial(p, p.sample(rng)));
  }
  return out;
}

FreedmanReport mc_validate_freedman(const MartingaleProcess& p, double delta,
                                    int trials, std::uint64_t seed) {
  return evaluate_trials(p, run_trials(p, trials, seed), delta);
}

MartingaleProcess zero_process(int T) {
  MartingaleProcess p;
  p.name = "zero";
  p.b = 1.0;
  p.T = T;
  p.sample = [T](Rng&) {
    return std::vector<MartingaleStep>(T, MartingaleStep{0.0, 1.0, 0.0});
  };
  return p;
}

MartingaleProcess bernoulli_doubling_process(int T, double prob, double b) {
  if (!(prob > 0.0 && prob < 1.0) || !(b >= 1.0))
    throw std::invalid_argument("bernoulli_doubling_process: bad parameters");
  MartingaleProcess p;
  p.name = "bernoulli-doubling";
  p.b = b;
  p.T = T;
  p.sample = [T, prob, b](Rng& rng) {
    std::vector<MartingaleStep> steps(T);
    double bound = 1.0, sum = 0.0;
    for (int t = 0; t < T; ++t) {
      const double xi = rng.bernoulli(prob) ? 1.0 : 0.0;
      steps[t] = {bound * (xi - prob), bound, bound * bound * prob * (1 - prob)};
      sum += steps[t].x;
      if (std::abs(sum) > bound) bound = std::min(b, 2.0 * bound);
    }
    return steps;
  };
  return p;
}

MartingaleProcess mab_replay_process(int d, int T, double eta,
                                     std::vector<double> means) {
  if (static_cast<int>(means.size()) != d)
    throw std::invalid_argument("mab_replay_process: means must have d entries");
  MartingaleProcess p;
  p.name = "mab-replay";
  // Thresholds never exceed 2/w <= 2T.
  p.b = 2.0 * T;
  p.T = T;
  p.sample = [d, T, eta, means](Rng& rng) {
    MabConfig cfg;
    cfg.d = d;
    cfg.T = T;
    cfg.eta = eta;
    MabState s = mab_init(cfg);
    const int best = static_cast<int>(
        std::min_element(means.begin(), means.end()) - means.begin());
    const Vector u = mab_comparator(d, T, best);
    Rng env = rng.split(1);
    Rng learner = rng.split(2);
    std::vector<MartingaleStep> steps(T);
    Vector loss(d);
    for (int t = 0; t < T; ++t) {
      for (int i = 0; i < d; ++i) loss(i) = env.bernoulli(means[i]) ? 1.0 : 0.0;
      const int arm = mab_sample(s, learner);
      const Vector lhat = mab_estimate(s, arm, loss(arm));
      const double mean = u.dot(loss);
      double second = 0.0;
      for (int i = 0; i < d; ++i)
        second += u(i) * u(i) * loss(i) * loss(i) / s.w(i);
      steps[t] = {u.dot(lhat) - mean, u.dot(s.rho), second - mean * mean};
      s.cum_loss += loss(arm);
      s = mab_update(s, lhat);
    }
    return steps;
  };
  return p;
}

}  // namespace hpb
