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

#include "hpb/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "hpb/errors.hpp"
#include "hpb/freedman.hpp"
#include "hpb/linear_bandit.hpp"
#include "hpb/mab.hpp"

namespace hpb {

namespace {

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
  return buf;
}

// ---- config parsing ----

void check_keys(const Json& obj, const std::string& where,
                const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [k, v] : obj.items())
    if (!allowed.count(k)) throw ConfigError(where + ": unknown field '" + k + "'");
}

template <typename T>
T field(const Json& obj, const std::string& key, const std::string& where,
        const T& fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const Json::exception&) {
    throw ConfigError(where + "." + key + ": wrong type");
  }
}

template <typename T>
T required(const Json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) throw ConfigError(where + "." + key + ": missing");
  return field<T>(obj, key, where, T{});
}

Vector to_vector(const Json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": expected an array");
  Vector v(j.size());
  for (size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ConfigError(where + ": expected numbers");
    v(i) = j[i].get<double>();
  }
  return v;
}

Matrix to_matrix(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw ConfigError(where + ": expected rows");
  const Vector first = to_vector(j[0], where);
  Matrix m(j.size(), first.size());
  for (size_t r = 0; r < j.size(); ++r) {
    const Vector row = to_vector(j[r], where);
    if (row.size() != first.size()) throw ConfigError(where + ": ragged rows");
    m.row(r) = row.transpose();
  }
  return m;
}

ConvexBody parse_body(const Json& j) {
  const std::string w = "linbandit.body";
  const std::string type = required<std::string>(j, "type", w);
  try {
    if (type == "ball") {
      check_keys(j, w, {"type", "center", "radius"});
      if (!j.contains("center")) throw ConfigError(w + ".center: missing");
      return ConvexBody::ball(to_vector(j.at("center"), w + ".center"),
                              required<double>(j, "radius", w));
    }
    if (type == "box") {
      check_keys(j, w, {"type", "d", "lo", "hi"});
      return ConvexBody::box(required<int>(j, "d", w), field<double>(j, "lo", w, -1.0),
                             field<double>(j, "hi", w, 1.0));
    }
    if (type == "polytope") {
      check_keys(j, w, {"type", "A", "b", "interior"});
      if (!j.contains("A") || !j.contains("b") || !j.contains("interior"))
        throw ConfigError(w + ": polytope needs A, b and interior");
      return ConvexBody::polytope(to_matrix(j.at("A"), w + ".A"),
                                  to_vector(j.at("b"), w + ".b"),
                                  to_vector(j.at("interior"), w + ".interior"));
    }
    if (type == "random-polytope") {
      check_keys(j, w, {"type", "d", "m", "seed"});
      Rng rng(field<std::uint64_t>(j, "seed", w, 0));
      return random_polytope(required<int>(j, "d", w), required<int>(j, "m", w), rng);
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(w + ": " + e.what());
  }
  throw ConfigError(w + ".type: unknown body '" + type + "'");
}

LayeredMdp parse_mdp(const Json& j) {
  const std::string w = "mdp";
  check_keys(j, w, {"layers", "actions", "transition", "random_seed"});
  if (!j.contains("layers")) throw ConfigError(w + ".layers: missing");
  std::vector<int> sizes;
  int next_id = 0;
  for (const Json& layer : j.at("layers")) {
    if (layer.is_number_integer()) {
      sizes.push_back(layer.get<int>());
      next_id += sizes.back();
      continue;
    }
    if (!layer.is_array()) throw ConfigError(w + ".layers: expected arrays of ids");
    for (const Json& id : layer)
      if (!id.is_number_integer() || id.get<int>() != next_id++)
        throw ConfigError(w + ".layers: state ids must be 0, 1, 2, ... in order");
    sizes.push_back(static_cast<int>(layer.size()));
  }
  const int actions = required<int>(j, "actions", w);
  LayeredMdp mdp;
  try {
    if (j.contains("transition")) {
      mdp.layout = MdpLayout(sizes, actions);
      const Json& t = j.at("transition");
      if (!t.is_array() || static_cast<int>(t.size()) != mdp.layout.num_active_states())
        throw ConfigError(w + ".transition: one entry per non-terminal state");
      for (const Json& per_state : t) {
        if (!per_state.is_array())
          throw ConfigError(w + ".transition: expected [state][action][next]");
        std::vector<Vector> rows;
        for (const Json& row : per_state) rows.push_back(to_vector(row, w + ".transition"));
        mdp.p.push_back(rows);
      }
    } else {
      Rng rng(field<std::uint64_t>(j, "random_seed", w, 0));
      mdp = random_layered_mdp(sizes, actions, rng);
    }
    mdp.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(w + ": " + e.what());
  }
  return mdp;
}

AdversarySpec parse_adversary(const Json& j, std::optional<std::uint64_t>& seed) {
  const std::string w = "adversary";
  check_keys(j, w,
             {"kind", "seed", "gap", "best_mean", "best", "small_loss", "low",
              "neighborhood", "theta", "noise", "nonnegative", "sequence"});
  AdversarySpec s;
  try {
    s.kind = parse_adversary_kind(
        field<std::string>(j, "kind", w, "oblivious-stochastic-gap"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(w + ".kind: " + e.what());
  }
  if (j.contains("seed")) seed = field<std::uint64_t>(j, "seed", w, 0);
  s.gap = field<double>(j, "gap", w, s.gap);
  s.best_mean = field<double>(j, "best_mean", w, s.best_mean);
  s.best = field<int>(j, "best", w, s.best);
  s.small_loss = field<bool>(j, "small_loss", w, s.small_loss);
  s.low = field<double>(j, "low", w, s.low);
  s.neighborhood = field<int>(j, "neighborhood", w, s.neighborhood);
  if (j.contains("theta")) s.theta = to_vector(j.at("theta"), w + ".theta");
  s.noise = field<double>(j, "noise", w, s.noise);
  s.nonnegative = field<bool>(j, "nonnegative", w, s.nonnegative);
  if (j.contains("sequence")) s.sequence = to_matrix(j.at("sequence"), w + ".sequence");
  if (s.kind == AdversaryKind::kFixedSequence && s.sequence.rows() == 0)
    throw ConfigError(w + ".sequence: required for a fixed sequence");
  return s;
}

FreedmanSettings parse_freedman(const Json& j) {
  const std::string w = "freedman";
  check_keys(j, w, {"process", "deltas", "trials", "T", "p", "b", "d", "eta", "means"});
  FreedmanSettings f;
  f.process = field<std::string>(j, "process", w, f.process);
  if (j.contains("deltas")) {
    const Vector d = to_vector(j.at("deltas"), w + ".deltas");
    f.deltas.assign(d.data(), d.data() + d.size());
  }
  f.trials = field<int>(j, "trials", w, f.trials);
  f.T = field<int>(j, "T", w, f.T);
  f.p = field<double>(j, "p", w, f.p);
  f.b = field<double>(j, "b", w, f.b);
  f.d = field<int>(j, "d", w, f.d);
  f.eta = field<double>(j, "eta", w, f.eta);
  if (j.contains("means")) f.means = to_vector(j.at("means"), w + ".means");
  static const std::set<std::string> known{"zero", "bernoulli-doubling", "mab-replay",
                                           "all"};
  if (!known.count(f.process)) throw ConfigError(w + ".process: unknown process");
  if (f.trials < 1) throw ConfigError(w + ".trials: must be positive");
  for (double d : f.deltas)
    if (!(d > 0.0 && d < 1.0)) throw ConfigError(w + ".deltas: must lie in (0, 1)");
  return f;
}

}  // namespace

ExperimentConfig parse_config(const Json& doc) {
  check_keys(doc, "config",
             {"setting", "T", "seeds", "learner", "adversary", "mab", "linbandit",
              "mdp", "freedman", "check", "workers", "output", "band_points"});
  ExperimentConfig cfg;
  const std::string setting = required<std::string>(doc, "setting", "config");
  if (setting == "mab") {
    cfg.setting = Setting::kMab;
  } else if (setting == "linbandit") {
    cfg.setting = Setting::kLinBandit;
  } else if (setting == "mdp") {
    cfg.setting = Setting::kMdp;
  } else if (setting == "freedman") {
    cfg.setting = Setting::kFreedman;
  } else {
    throw ConfigError("config.setting: unknown setting '" + setting + "'");
  }
  cfg.T = field<int>(doc, "T", "config", 0);
  if (cfg.T < 0) throw ConfigError("config.T: must be nonnegative");
  if (doc.contains("seeds")) {
    const Json& s = doc.at("seeds");
    if (s.is_array()) {
      for (const Json& v : s) {
        if (!v.is_number_unsigned()) throw ConfigError("config.seeds: expected integers");
        cfg.seeds.push_back(v.get<std::uint64_t>());
      }
    } else {
      check_keys(s, "config.seeds", {"first", "count"});
      const auto first = field<std::uint64_t>(s, "first", "config.seeds", 0);
      const int count = required<int>(s, "count", "config.seeds");
      for (int i = 0; i < count; ++i) cfg.seeds.push_back(first + i);
    }
  } else {
    cfg.seeds = {0};
  }
  if (doc.contains("learner")) {
    const Json& l = doc.at("learner");
    check_keys(l, "learner", {"algorithm", "eta", "delta", "kappa", "lstar"});
    cfg.algorithm = field<std::string>(l, "algorithm", "learner", "hp");
    if (cfg.algorithm != "hp" && cfg.algorithm != "exp3")
      throw ConfigError("learner.algorithm: expected 'hp' or 'exp3'");
    if (l.contains("eta") && !(l.at("eta").is_string() && l.at("eta") == "default")) {
      cfg.eta = field<double>(l, "eta", "learner", 0.0);
      if (!(*cfg.eta > 0.0)) throw ConfigError("learner.eta: must be positive");
    }
    cfg.delta = field<double>(l, "delta", "learner", cfg.delta);
    cfg.kappa = field<double>(l, "kappa", "learner", cfg.kappa);
    cfg.lstar = field<double>(l, "lstar", "learner", cfg.lstar);
    if (!(cfg.delta > 0.0 && cfg.delta < 1.0))
      throw ConfigError("learner.delta: must lie in (0, 1)");
  }
  if (doc.contains("adversary"))
    cfg.adversary = parse_adversary(doc.at("adversary"), cfg.adversary_seed);
  switch (cfg.setting) {
    case Setting::kMab: {
      const Json m = doc.value("mab", Json::object());
      check_keys(m, "mab", {"d"});
      cfg.d = field<int>(m, "d", "mab", 2);
      if (cfg.d < 2) throw ConfigError("mab.d: must be at least 2");
      break;
    }
    case Setting::kLinBandit: {
      if (!doc.contains("linbandit")) throw ConfigError("linbandit: missing");
      const Json& lb = doc.at("linbandit");
      check_keys(lb, "linbandit", {"body"});
      if (!lb.contains("body")) throw ConfigError("linbandit.body: missing");
      cfg.body = parse_body(lb.at("body"));
      cfg.d = cfg.body->dim();
      break;
    }
    case Setting::kMdp:
      if (!doc.contains("mdp")) throw ConfigError("mdp: missing");
      cfg.mdp = parse_mdp(doc.at("mdp"));
      break;
    case Setting::kFreedman:
      cfg.freedman = parse_freedman(doc.value("freedman", Json::object()));
      break;
  }
  if (cfg.algorithm == "exp3" && cfg.setting != Setting::kMab)
    throw ConfigError("learner.algorithm: exp3 is available for mab only");
  cfg.check = field<bool>(doc, "check", "config", false);
  cfg.workers = std::max(1, field<int>(doc, "workers", "config", 1));
  if (doc.contains("output")) {
    const Json& o = doc.at("output");
    check_keys(o, "output", {"dir", "prefix"});
    cfg.out_dir = field<std::string>(o, "dir", "output", cfg.out_dir);
    cfg.prefix = field<std::string>(o, "prefix", "output", cfg.prefix);
  }
  cfg.band_points = std::max(1, field<int>(doc, "band_points", "config", 20));
  try {
    if (cfg.setting == Setting::kMab) MabAdversary(cfg.adversary, cfg.d);
    if (cfg.setting == Setting::kLinBandit) LinearAdversary(cfg.adversary, *cfg.body);
    if (cfg.setting == Setting::kMdp) MdpAdversary(cfg.adversary, cfg.mdp->layout);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("adversary: ") + e.what());
  }
  // Worker count and output location do not change results.
  Json canonical = doc;
  canonical.erase("workers");
  canonical.erase("output");
  cfg.hash = fnv1a(canonical.dump());
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  return parse_config(doc);
}

void finalize_trace(RegretTrace& tr) {
  const size_t n = tr.loss.size();
  tr.cum_loss.resize(n);
  tr.cum_comparator.resize(n);
  tr.cum_regret.resize(n);
  tr.events.resize(n);
  double a = 0.0, b = 0.0;
  for (size_t t = 0; t < n; ++t) {
    a += tr.loss[t];
    b += tr.comparator_loss[t];
    tr.cum_loss[t] = a;
    tr.cum_comparator[t] = b;
    tr.cum_regret[t] = a - b;
  }
}

std::string trace_csv(const RegretTrace& tr) {
  std::string out = "t,loss,cum_loss,cum_comparator_loss,cum_regret,events\n";
  for (size_t t = 0; t < tr.loss.size(); ++t) {
    out += std::to_string(t + 1) + "," + fmt_double(tr.loss[t]) + "," +
           fmt_double(tr.cum_loss[t]) + "," + fmt_double(tr.cum_comparator[t]) +
           "," + fmt_double(tr.cum_regret[t]) + "," + tr.events[t] + "\n";
  }
  return out;
}

namespace {

std::uint64_t adversary_seed(const ExperimentConfig& cfg, std::uint64_t seed) {
  return cfg.adversary_seed ? *cfg.adversary_seed : mix_seed(seed, 1);
}

void add_events(std::vector<std::string>& col, int round,
                const std::vector<ScheduleEvent>& events, size_t from) {
  for (size_t k = from; k < events.size(); ++k) {
    std::string& cell = col[round - 1];
    if (!cell.empty()) cell += ";";
    cell += std::to_string(events[k].index) + ":" + fmt_double(events[k].eta);
  }
}

// Loss matrix bookkeeping shared by the MAB learners.
void mab_comparator_columns(RegretTrace& tr, const std::vector<Vector>& losses,
                            int d, int* best_out) {
  Vector total = Vector::Zero(d);
  for (const Vector& l : losses) total += l;
  int best = 0;
  total.minCoeff(&best);
  for (const Vector& l : losses) tr.comparator_loss.push_back(l(best));
  tr.comparator = "best-arm:" + std::to_string(best);
  if (best_out) *best_out = best;
}

void run_mab(const ExperimentConfig& cfg, std::uint64_t seed, RunResult& res) {
  MabConfig mc;
  mc.d = cfg.d;
  mc.T = cfg.T;
  mc.delta = cfg.delta;
  mc.kappa = cfg.kappa;
  // Without a guess, L* <= T is always valid.
  const double lstar = cfg.lstar > 0.0 ? cfg.lstar : static_cast<double>(cfg.T);
  mc.eta = cfg.eta ? *cfg.eta : mab_default_eta(mc, std::max(1.0, lstar));
  AdversarySpec spec = cfg.adversary;
  spec.seed = adversary_seed(cfg, seed);
  const MabAdversary adv(spec, cfg.d);
  Rng rng = Rng(seed).split(2);
  MabState s = mab_init(mc);
  RegretTrace& tr = res.trace;
  std::vector<int> arms;
  std::vector<Vector> losses;
  tr.events.assign(cfg.T, "");
  for (int t = 1; t <= cfg.T; ++t) {
    const Vector loss = adv.next_loss(t, arms);
    const int arm = mab_sample(s, rng);
    const Vector lhat = mab_estimate(s, arm, loss(arm));
    s.cum_loss += loss(arm);
    const size_t before = s.events.size();
    s = mab_update(s, lhat);
    add_events(tr.events, t, s.events, before);
    if (cfg.check) mab_check_state(s);
    arms.push_back(arm);
    losses.push_back(loss);
    tr.loss.push_back(loss(arm));
  }
  int best = 0;
  mab_comparator_columns(tr, losses, cfg.d, &best);
  res.schedule_events = static_cast<int>(s.events.size());
  if (cfg.check && cfg.T > 0) {
    const double slack = mab_pathwise_slack(s, mab_comparator(cfg.d, cfg.T, best));
    if (slack < -1e-8)
      throw InvariantViolation("pathwise MAB bound violated, slack " + fmt_double(slack));
  }
}

void run_linbandit(const ExperimentConfig& cfg, std::uint64_t seed, RunResult& res) {
  LinBanditConfig lc;
  lc.body = *cfg.body;
  lc.T = cfg.T;
  lc.delta = cfg.delta;
  lc.kappa = cfg.kappa;
  lc.eta = cfg.eta ? *cfg.eta : lb_default_eta(lc);
  AdversarySpec spec = cfg.adversary;
  spec.seed = adversary_seed(cfg, seed);
  const LinearAdversary adv(spec, lc.body);
  Rng rng = Rng(seed).split(2);
  RegretTrace& tr = res.trace;
  tr.events.assign(cfg.T, "");
  if (cfg.T == 0) return;
  LinBanditState s = lb_init(lc);
  // Fixed comparators for the per-round Bregman check.
  std::vector<Vector> checks;
  if (cfg.check) {
    Rng crng = Rng(seed).split(3);
    for (int k = 0; k < 3; ++k)
      checks.push_back(lb_lift_comparator(*s.setup, random_interior_point(lc.body, crng)));
  }
  std::vector<Vector> actions, losses;
  for (int t = 1; t <= cfg.T; ++t) {
    const LinearLoss ll = adv.next_loss(t, actions);
    res.rescaled_losses += ll.rescaled;
    const size_t before_events = s.events.size();
    std::optional<LinBanditState> before;
    if (cfg.check) before = s;
    const LbRound r = lb_step(s, ll.loss, rng);
    add_events(tr.events, t, s.events, before_events);
    if (cfg.check) {
      lb_check_state(s);
      const double st = lb_stability_slack(*before, s, r.loss_hat);
      if (st < -1e-9)
        throw InvariantViolation("stability bound violated at round " + std::to_string(t));
      for (const Vector& u : checks)
        if (lb_bregman_slack(s, u) < -1e-6)
          throw InvariantViolation("Bregman lower bound violated at round " +
                                   std::to_string(t));
    }
    actions.push_back(r.sample.w_tilde);
    losses.push_back(ll.loss);
    tr.loss.push_back(r.observed);
  }
  Vector total = Vector::Zero(lc.body.dim());
  for (const Vector& l : losses) total += l;
  Vector best;
  body_min(lc.body, total, &best);
  for (const Vector& l : losses) tr.comparator_loss.push_back(best.dot(l));
  tr.comparator = "body-minimizer";
  res.schedule_events = static_cast<int>(s.events.size());
  if (cfg.check) {
    const double slack = lb_regterm_slack(s, lb_lift_comparator(*s.setup, best));
    if (slack < 0.0)
      throw InvariantViolation("Reg-Term bound violated, slack " + fmt_double(slack));
  }
}

void run_mdp(const ExperimentConfig& cfg, std::uint64_t seed, RunResult& res) {
  const LayeredMdp& mdp = *cfg.mdp;
  MdpConfig mc;
  mc.T = cfg.T;
  mc.delta = cfg.delta;
  mc.kappa = cfg.kappa;
  mc.eta = cfg.eta ? *cfg.eta : mdp_default_eta(mdp.layout, cfg.T, cfg.delta, cfg.lstar);
  AdversarySpec spec = cfg.adversary;
  spec.seed = adversary_seed(cfg, seed);
  const MdpAdversary adv(spec, mdp.layout);
  Rng rng = Rng(seed).split(2);
  RegretTrace& tr = res.trace;
  tr.events.assign(cfg.T, "");
  if (cfg.T == 0) return;
  MdpState s = mdp_init(mdp.layout, mc);
  std::vector<Trajectory> history;
  std::vector<Vector> losses;
  for (int t = 1; t <= cfg.T; ++t) {
    const Vector loss = adv.next_loss(t, history);
    // Expected loss of the policy played this episode.
    tr.loss.push_back(expected_loss(mdp, s.pi, loss));
    const size_t before = s.events.size();
    MdpRound r = mdp_step(s, mdp, loss, rng);
    add_events(tr.events, t, s.events, before);
    if (cfg.check) {
      mdp_check_state(s);
      mdp_check_uob(s, mdp);
    }
    history.push_back(std::move(r.traj));
    if (history.size() > 1) history.erase(history.begin());
    losses.push_back(loss);
  }
  Vector total = Vector::Zero(mdp.layout.num_pairs());
  for (const Vector& l : losses) total += l;
  const Policy best = best_policy(mdp, total);
  for (const Vector& l : losses) tr.comparator_loss.push_back(expected_loss(mdp, best, l));
  tr.comparator = "best-deterministic-policy";
  res.schedule_events = static_cast<int>(s.events.size());
}

}  // namespace

RunResult run_single(const ExperimentConfig& cfg, std::uint64_t seed) {
  if (cfg.algorithm == "exp3") return exp3_baseline(cfg, seed);
  RunResult res;
  res.seed = seed;
  res.trace.seed = seed;
  res.trace.config_hash = cfg.hash;
  if (cfg.T == 0) return res;
  try {
    switch (cfg.setting) {
      case Setting::kMab:
        run_mab(cfg, seed, res);
        break;
      case Setting::kLinBandit:
        run_linbandit(cfg, seed, res);
        break;
      case Setting::kMdp:
        run_mdp(cfg, seed, res);
        break;
      case Setting::kFreedman:
        throw ConfigError("the freedman setting runs through validate-freedman");
    }
  } catch (const InvariantViolation& e) {
    res.status = "invariant-violation";
    res.diagnostic = e.what();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    res.status = "error";
    res.diagnostic = e.what();
  }
  RegretTrace& tr = res.trace;
  // A failed run keeps the rounds it completed.
  const size_t n = std::min(tr.loss.size(), tr.comparator_loss.size());
  tr.loss.resize(n);
  tr.comparator_loss.resize(n);
  finalize_trace(tr);
  res.final_regret = n ? tr.cum_regret.back() : 0.0;
  return res;
}

Vector Exp3Weights::probabilities() const {
  const Vector logits = -eta_ * (lhat_sum_.array() - lhat_sum_.minCoeff()).matrix();
  Vector p = logits.array().exp();
  return p / p.sum();
}

void Exp3Weights::update(int arm, double loss, double prob) {
  lhat_sum_(arm) += loss / prob;
}

RunResult exp3_baseline(const ExperimentConfig& cfg, std::uint64_t seed) {
  if (cfg.setting != Setting::kMab) throw ConfigError("exp3 needs the mab setting");
  RunResult res;
  res.seed = seed;
  RegretTrace& tr = res.trace;
  tr.seed = seed;
  tr.config_hash = cfg.hash;
  tr.events.assign(cfg.T, "");
  const int d = cfg.d;
  AdversarySpec spec = cfg.adversary;
  spec.seed = adversary_seed(cfg, seed);
  const MabAdversary adv(spec, d);
  Rng rng = Rng(seed).split(2);
  const double eta =
      cfg.eta ? *cfg.eta : std::sqrt(std::log(d) / (static_cast<double>(d) * std::max(1, cfg.T)));
  Exp3Weights weights(d, eta);
  std::vector<int> arms;
  std::vector<Vector> losses;
  for (int t = 1; t <= cfg.T; ++t) {
    const Vector p = weights.probabilities();
    const Vector loss = adv.next_loss(t, arms);
    const int arm = rng.categorical_vec(p);
    weights.update(arm, loss(arm), p(arm));
    arms.push_back(arm);
    losses.push_back(loss);
    tr.loss.push_back(loss(arm));
  }
  mab_comparator_columns(tr, losses, d, nullptr);
  finalize_trace(tr);
  res.final_regret = cfg.T ? tr.cum_regret.back() : 0.0;
  return res;
}

std::vector<RunResult> run_experiment(const ExperimentConfig& cfg) {
  std::vector<RunResult> results(cfg.seeds.size());
  std::atomic<size_t> next{0};
  std::exception_ptr fatal;
  std::mutex fatal_mu;
  auto work = [&] {
    for (size_t i = next++; i < results.size(); i = next++) {
      try {
        results[i] = run_single(cfg, cfg.seeds[i]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(fatal_mu);
        if (!fatal) fatal = std::current_exception();
      }
    }
  };
  const int workers =
      std::max(1, std::min<int>(cfg.workers, static_cast<int>(results.size())));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (std::thread& th : pool) th.join();
  }
  if (fatal) std::rethrow_exception(fatal);
  return results;
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const double pos = q * (v.size() - 1);
  const size_t lo = static_cast<size_t>(std::floor(pos));
  const size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - lo) * (v[hi] - v[lo]);
}

ExperimentSummary summarize(const std::vector<RunResult>& results, int T,
                            int band_points) {
  ExperimentSummary s;
  s.runs = static_cast<int>(results.size());
  std::vector<const RunResult*> ok;
  for (const RunResult& r : results) {
    if (r.status == "ok") {
      ok.push_back(&r);
    } else {
      ++s.failed;
      s.violations += r.status == "invariant-violation";
    }
  }
  std::vector<double> finals;
  for (const RunResult* r : ok) finals.push_back(r->final_regret);
  if (!finals.empty()) {
    double sum = 0.0;
    for (double f : finals) sum += f;
    s.mean = sum / finals.size();
    s.median = quantile(finals, 0.5);
    s.p95 = quantile(finals, 0.95);
  }
  if (T <= 0 || ok.empty()) return s;
  const int points = std::min(band_points, T);
  for (int k = 1; k <= points; ++k) {
    const int round = static_cast<int>((static_cast<long long>(k) * T) / points);
    std::vector<double> col;
    for (const RunResult* r : ok) col.push_back(r->trace.cum_regret[round - 1]);
    s.band_rounds.push_back(round);
    s.band_q05.push_back(quantile(col, 0.05));
    s.band_q50.push_back(quantile(col, 0.5));
    s.band_q95.push_back(quantile(col, 0.95));
  }
  return s;
}

Json summary_json(const ExperimentConfig& cfg, const std::vector<RunResult>& results,
                  const ExperimentSummary& s) {
  static const char* kSetting[] = {"mab", "linbandit", "mdp", "freedman"};
  Json runs = Json::array();
  for (const RunResult& r : results) {
    runs.push_back({{"seed", r.seed},
                    {"status", r.status},
                    {"diagnostic", r.diagnostic},
                    {"rounds", r.trace.loss.size()},
                    {"final_regret", r.final_regret},
                    {"schedule_events", r.schedule_events},
                    {"rescaled_losses", r.rescaled_losses},
                    {"comparator", r.trace.comparator}});
  }
  return {{"config_hash", cfg.hash},
          {"setting", kSetting[static_cast<int>(cfg.setting)]},
          {"algorithm", cfg.algorithm},
          {"T", cfg.T},
          {"runs", runs},
          {"summary",
           {{"runs", s.runs},
            {"failed", s.failed},
            {"invariant_violations", s.violations},
            {"mean_final_regret", s.mean},
            {"median_final_regret", s.median},
            {"p95_final_regret", s.p95}}},
          {"bands",
           {{"round", s.band_rounds},
            {"q05", s.band_q05},
            {"q50", s.band_q50},
            {"q95", s.band_q95}}}};
}

void write_outputs(const ExperimentConfig& cfg, const std::vector<RunResult>& results,
                   const ExperimentSummary& summary) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + cfg.out_dir);
  auto write = [](const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << text;
    if (!out) throw std::runtime_error("write failed for " + p.string());
  };
  for (const RunResult& r : results)
    write(fs::path(cfg.out_dir) / (cfg.prefix + "_seed" + std::to_string(r.seed) + ".csv"),
          trace_csv(r.trace));
  write(fs::path(cfg.out_dir) / (cfg.prefix + "_summary.json"),
        summary_json(cfg, results, summary).dump(2) + "\n");
}

Json run_freedman_validation(const ExperimentConfig& cfg) {
  const FreedmanSettings& f = cfg.freedman;
  std::vector<MartingaleProcess> procs;
  const bool all = f.process == "all";
  if (all || f.process == "zero") procs.push_back(zero_process(f.T));
  if (all || f.process == "bernoulli-doubling")
    procs.push_back(bernoulli_doubling_process(f.T, f.p, f.b));
  if (all || f.process == "mab-replay") {
    std::vector<double> means(f.means.data(), f.means.data() + f.means.size());
    if (means.empty()) {
      means.assign(f.d, 0.5);
      means[0] = 0.3;
    }
    procs.push_back(mab_replay_process(f.d, f.T, f.eta, means));
  }
  const std::uint64_t seed = cfg.seeds.empty() ? 0 : cfg.seeds.front();
  Json reports = Json::array();
  for (size_t k = 0; k < procs.size(); ++k) {
    const std::vector<FreedmanTrial> trials =
        run_trials(procs[k], f.trials, mix_seed(seed, k));
    for (double delta : f.deltas) {
      const FreedmanReport rep = evaluate_trials(procs[k], trials, delta);
      reports.push_back({{"process", procs[k].name},
                         {"delta", delta},
                         {"trials", rep.trials},
                         {"violations", rep.violations},
                         {"frequency", rep.frequency},
                         {"limit", rep.limit},
                         {"ok", rep.ok()}});
    }
  }
  return {{"config_hash", cfg.hash}, {"reports", reports}};
}

}  // namespace hpb
