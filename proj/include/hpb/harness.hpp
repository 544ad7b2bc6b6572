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

#ifndef HPB_HARNESS_HPP_
#define HPB_HARNESS_HPP_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hpb/barrier.hpp"
#include "hpb/environment.hpp"
#include "hpb/mdp.hpp"
#include "json.hpp"

namespace hpb {

using Json = nlohmann::json;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Setting { kMab, kLinBandit, kMdp, kFreedman };

struct FreedmanSettings {
  std::string process = "bernoulli-doubling";
  std::vector<double> deltas{0.05, 0.2};
  int trials = 2000;
  int T = 200;
  double p = 0.5;       // bernoulli-doubling
  double b = 64.0;      // bernoulli-doubling
  int d = 5;            // mab-replay
  double eta = 0.1;     // mab-replay
  Vector means;         // mab-replay; empty selects a gap instance
};

struct ExperimentConfig {
  Setting setting = Setting::kMab;
  int T = 0;
  std::vector<std::uint64_t> seeds;
  // "hp" for the high-probability learners, "exp3" for the MAB baseline.
  std::string algorithm = "hp";
  // Empty selects the setting's default formula.
  std::optional<double> eta;
  double delta = 0.05;
  double kappa = 0.0;
  double lstar = 0.0;
  AdversarySpec adversary;
  // When absent the adversary seed is derived from the run seed.
  std::optional<std::uint64_t> adversary_seed;
  int d = 2;
  std::optional<ConvexBody> body;
  std::optional<LayeredMdp> mdp;
  FreedmanSettings freedman;
  bool check = false;
  int workers = 1;
  std::string out_dir = ".";
  std::string prefix = "run";
  int band_points = 20;
  // FNV-1a of the canonical config document.
  std::string hash;
};

// Throws ConfigError with a message naming the offending field.
ExperimentConfig parse_config(const Json& doc);
ExperimentConfig load_config(const std::string& path);

struct RegretTrace {
  std::vector<double> loss;
  std::vector<double> comparator_loss;
  std::vector<double> cum_loss;
  std::vector<double> cum_comparator;
  std::vector<double> cum_regret;
  // Per round: "index:eta" entries joined by ';'.
  std::vector<std::string> events;
  std::uint64_t seed = 0;
  std::string config_hash;
  // How the comparator was chosen.
  std::string comparator;
};

// Fills the cumulative columns from the instantaneous ones.
void finalize_trace(RegretTrace& trace);
std::string trace_csv(const RegretTrace& trace);

struct RunResult {
  std::uint64_t seed = 0;
  // "ok", "invariant-violation" or "error".
  std::string status = "ok";
  std::string diagnostic;
  RegretTrace trace;
  double final_regret = 0.0;
  int schedule_events = 0;
  int rescaled_losses = 0;
};

RunResult run_single(const ExperimentConfig& cfg, std::uint64_t seed);

// Exponential weights over importance-weighted loss estimates.
class Exp3Weights {
 public:
  Exp3Weights(int d, double eta) : eta_(eta), lhat_sum_(Vector::Zero(d)) {}
  Vector probabilities() const;
  void update(int arm, double loss, double prob);

 private:
  double eta_;
  Vector lhat_sum_;
};

// Exponential weights with importance weighting, eta = sqrt(ln d / (d T)).
RunResult exp3_baseline(const ExperimentConfig& cfg, std::uint64_t seed);
// One result per seed, in config order; seeds are spread over workers.
std::vector<RunResult> run_experiment(const ExperimentConfig& cfg);

// Linear interpolation between order statistics.
double quantile(std::vector<double> values, double q);

struct ExperimentSummary {
  int runs = 0;
  int failed = 0;
  int violations = 0;
  double mean = 0.0;
  double median = 0.0;
  double p95 = 0.0;
  std::vector<int> band_rounds;
  std::vector<double> band_q05, band_q50, band_q95;
};

ExperimentSummary summarize(const std::vector<RunResult>& results, int T,
                            int band_points);
Json summary_json(const ExperimentConfig& cfg,
                  const std::vector<RunResult>& results,
                  const ExperimentSummary& summary);
// Writes one CSV per seed and <prefix>_summary.json into cfg.out_dir.
void write_outputs(const ExperimentConfig& cfg,
                   const std::vector<RunResult>& results,
                   const ExperimentSummary& summary);

Json run_freedman_validation(const ExperimentConfig& cfg);

}  // namespace hpb

#endif  // HPB_HARNESS_HPP_
