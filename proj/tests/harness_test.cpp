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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gtest/gtest.h"

namespace hpb {
namespace {

Json mab_doc(int T) {
  Json j = Json::parse(R"({
    "setting": "mab", "mab": {"d": 2},
    "learner": {"eta": 0.2},
    "adversary": {"kind": "oblivious-fixed-sequence",
                  "sequence": [[1, 0], [0, 1], [0.2, 0.9]]},
    "seeds": [3, 4, 5]
  })");
  j["T"] = T;
  return j;
}

Json gap_doc(int T) {
  Json j = Json::parse(R"({
    "setting": "mab", "mab": {"d": 4},
    "learner": {"eta": 0.1},
    "adversary": {"kind": "oblivious-stochastic-gap", "gap": 0.2},
    "seeds": {"first": 10, "count": 4}
  })");
  j["T"] = T;
  return j;
}

TEST(HarnessConfigTest, ParsesAndHashes) {
  const ExperimentConfig cfg = parse_config(gap_doc(50));
  EXPECT_EQ(cfg.setting, Setting::kMab);
  EXPECT_EQ(cfg.seeds, (std::vector<std::uint64_t>{10, 11, 12, 13}));
  EXPECT_EQ(cfg.d, 4);
  ASSERT_TRUE(cfg.eta.has_value());
  EXPECT_EQ(*cfg.eta, 0.1);
  EXPECT_EQ(cfg.hash.size(), 16u);
  Json other = gap_doc(50);
  other["workers"] = 4;
  other["output"] = {{"dir", "/tmp/x"}};
  EXPECT_EQ(parse_config(other).hash, cfg.hash);
  EXPECT_NE(parse_config(gap_doc(51)).hash, cfg.hash);
}

TEST(HarnessConfigTest, RejectsBadDocuments) {
  Json j = gap_doc(10);
  j["unknown"] = 1;
  EXPECT_THROW(parse_config(j), ConfigError);
  j = gap_doc(10);
  j["setting"] = "poker";
  EXPECT_THROW(parse_config(j), ConfigError);
  j = gap_doc(10);
  j["learner"]["eta"] = -1;
  EXPECT_THROW(parse_config(j), ConfigError);
  j = gap_doc(10);
  j["adversary"]["best"] = 7;
  EXPECT_THROW(parse_config(j), ConfigError);
  j = gap_doc(10);
  j["setting"] = "linbandit";
  EXPECT_THROW(parse_config(j), ConfigError);
  j = gap_doc(10);
  j["mab"]["d"] = "four";
  EXPECT_THROW(parse_config(j), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
}

TEST(HarnessConfigTest, ParsesBodiesAndMdps) {
  Json lb = Json::parse(R"({"setting": "linbandit", "T": 5,
    "linbandit": {"body": {"type": "ball", "center": [0, 0, 0], "radius": 1}}})");
  EXPECT_EQ(parse_config(lb).body->dim(), 3);
  lb["linbandit"]["body"] = {{"type", "random-polytope"}, {"d", 4}, {"m", 8}, {"seed", 2}};
  EXPECT_EQ(parse_config(lb).body->a().rows(), 8);
  const Json mdp = Json::parse(R"({"setting": "mdp", "T": 5,
    "mdp": {"layers": [[0], [1, 2], [3]], "actions": 2,
            "transition": [[[0.5, 0.5], [1, 0]], [[1], [1]], [[1], [1]]]}})");
  const ExperimentConfig c = parse_config(mdp);
  EXPECT_EQ(c.mdp->layout.num_states(), 4);
  EXPECT_EQ(c.mdp->p[0][1](0), 1.0);
  Json bad = mdp;
  bad["mdp"]["layers"] = Json::parse("[[0], [2, 1], [3]]");
  EXPECT_THROW(parse_config(bad), ConfigError);
  bad = mdp;
  bad["mdp"]["transition"][0][0] = Json::parse("[0.7, 0.7]");
  EXPECT_THROW(parse_config(bad), ConfigError);
}

TEST(HarnessRunTest, ZeroRounds) {
  for (const Json& doc : {mab_doc(0), gap_doc(0)}) {
    const ExperimentConfig cfg = parse_config(doc);
    const RunResult r = run_single(cfg, 1);
    EXPECT_EQ(r.status, "ok");
    EXPECT_TRUE(r.trace.loss.empty());
    EXPECT_EQ(r.final_regret, 0.0);
    EXPECT_EQ(trace_csv(r.trace), "t,loss,cum_loss,cum_comparator_loss,cum_regret,events\n");
  }
}

TEST(HarnessRunTest, DeterministicCsv) {
  const ExperimentConfig cfg = parse_config(mab_doc(100));
  const std::string a = trace_csv(run_single(cfg, 9).trace);
  const std::string b = trace_csv(run_single(cfg, 9).trace);
  EXPECT_EQ(a, b);
  ExperimentConfig par = cfg;
  par.workers = 3;
  const std::vector<RunResult> r1 = run_experiment(cfg), r3 = run_experiment(par);
  ASSERT_EQ(r1.size(), r3.size());
  for (size_t i = 0; i < r1.size(); ++i) {
    EXPECT_EQ(r1[i].seed, cfg.seeds[i]);
    EXPECT_EQ(trace_csv(r1[i].trace), trace_csv(r3[i].trace));
  }
  EXPECT_EQ(summary_json(cfg, r1, summarize(r1, 100, 10)).dump(),
            summary_json(par, r3, summarize(r3, 100, 10)).dump());
}

TEST(HarnessRunTest, CumulativeColumnsArePrefixSums) {
  const ExperimentConfig cfg = parse_config(gap_doc(300));
  const RegretTrace tr = run_single(cfg, 2).trace;
  double a = 0, b = 0;
  for (size_t t = 0; t < tr.loss.size(); ++t) {
    a += tr.loss[t];
    b += tr.comparator_loss[t];
    EXPECT_EQ(tr.cum_loss[t], a);
    EXPECT_EQ(tr.cum_comparator[t], b);
    EXPECT_EQ(tr.cum_regret[t], a - b);
  }
}

TEST(HarnessRunTest, ComparatorMatchesRecomputation) {
  const ExperimentConfig cfg = parse_config(gap_doc(400));
  const std::uint64_t seed = 12;
  const RunResult r = run_single(cfg, seed);
  AdversarySpec spec = cfg.adversary;
  spec.seed = mix_seed(seed, 1);
  const MabAdversary adv(spec, cfg.d);
  Vector total = Vector::Zero(cfg.d);
  for (int t = 1; t <= cfg.T; ++t) total += adv.next_loss(t, {});
  int best;
  total.minCoeff(&best);
  EXPECT_EQ(r.trace.comparator, "best-arm:" + std::to_string(best));
  EXPECT_DOUBLE_EQ(r.trace.cum_comparator.back(), total(best));
}

TEST(HarnessRunTest, CheckModeOnAllSettings) {
  Json mab = gap_doc(300);
  mab["check"] = true;
  Json lb = Json::parse(R"({"setting": "linbandit", "T": 150, "check": true,
    "learner": {"eta": 0.01}, "seeds": [1, 2],
    "adversary": {"theta": [0.5, 0.1, 0.0], "noise": 0.2},
    "linbandit": {"body": {"type": "ball", "center": [0, 0, 0], "radius": 1}}})");
  Json mdp = Json::parse(R"({"setting": "mdp", "T": 150, "check": true,
    "learner": {"eta": 0.2}, "seeds": [1, 2],
    "mdp": {"layers": [1, 2, 2, 1], "actions": 2, "random_seed": 4}})");
  for (const Json& doc : {mab, lb, mdp}) {
    const ExperimentConfig cfg = parse_config(doc);
    for (const RunResult& r : run_experiment(cfg)) {
      EXPECT_EQ(r.status, "ok") << r.diagnostic;
      EXPECT_EQ(static_cast<int>(r.trace.loss.size()), cfg.T);
    }
  }
}

TEST(HarnessRunTest, DefaultLearningRates) {
  Json mab = gap_doc(50);
  mab["learner"].erase("eta");
  Json mdp = Json::parse(R"({"setting": "mdp", "T": 50, "seeds": [1],
    "mdp": {"layers": [1, 2, 1], "actions": 2, "random_seed": 4}})");
  for (const Json& doc : {mab, mdp})
    for (const RunResult& r : run_experiment(parse_config(doc)))
      EXPECT_EQ(r.status, "ok") << r.diagnostic;
}

TEST(HarnessRunTest, FailedRunIsRecorded) {
  // eta above 1/2 is rejected by the MAB learner for every seed.
  Json doc = gap_doc(20);
  doc["learner"]["eta"] = 0.9;
  const std::vector<RunResult> r = run_experiment(parse_config(doc));
  ASSERT_EQ(r.size(), 4u);
  for (const RunResult& x : r) {
    EXPECT_EQ(x.status, "error");
    EXPECT_FALSE(x.diagnostic.empty());
  }
  const ExperimentSummary s = summarize(r, 20, 5);
  EXPECT_EQ(s.failed, 4);
  EXPECT_TRUE(s.band_rounds.empty());
}

TEST(Exp3Test, HandSimulation) {
  // d = 2, eta = 0.5; arms and losses fixed by hand.
  Exp3Weights w(2, 0.5);
  EXPECT_DOUBLE_EQ(w.probabilities()(0), 0.5);
  w.update(0, 1.0, 0.5);  // estimates (2, 0)
  const double p1 = 1.0 / (1.0 + std::exp(1.0));
  EXPECT_NEAR(w.probabilities()(0), p1, 1e-15);
  w.update(1, 1.0, 1.0 - p1);  // estimates (2, 1/(1-p1))
  const double l1 = 1.0 / (1.0 - p1);
  const double p2 = std::exp(-1.0) / (std::exp(-1.0) + std::exp(-0.5 * l1));
  EXPECT_NEAR(w.probabilities()(0), p2, 1e-15);
  w.update(0, 0.0, p2);
  EXPECT_NEAR(w.probabilities()(0), p2, 1e-15);
}

TEST(Exp3Test, UniformLossesKeepWeightsNearUniform) {
  Json doc = gap_doc(1000);
  doc["learner"] = {{"algorithm", "exp3"}};
  doc["adversary"] = {{"kind", "oblivious-fixed-sequence"},
                      {"sequence", Json::parse("[[0.5, 0.5, 0.5, 0.5]]")}};
  const ExperimentConfig cfg = parse_config(doc);
  const RunResult r = run_single(cfg, 1);
  EXPECT_EQ(r.status, "ok");
  EXPECT_EQ(r.final_regret, 0.0);
  // Equal losses on every arm leave the weights exactly uniform.
  Exp3Weights w(4, 0.3);
  for (int t = 0; t < 50; ++t)
    for (int i = 0; i < 4; ++i) w.update(i, 0.5, 0.25);
  EXPECT_LE((w.probabilities().array() - 0.25).abs().maxCoeff(), 1e-15);
}

TEST(SummaryTest, Quantiles) {
  EXPECT_DOUBLE_EQ(quantile({3, 1, 2, 4}, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(quantile({5}, 0.95), 5.0);
  EXPECT_DOUBLE_EQ(quantile({0, 10}, 0.95), 9.5);
  const ExperimentConfig cfg = parse_config(gap_doc(100));
  const std::vector<RunResult> r = run_experiment(cfg);
  const ExperimentSummary s = summarize(r, 100, 4);
  EXPECT_EQ(s.band_rounds, (std::vector<int>{25, 50, 75, 100}));
  std::vector<double> finals;
  for (const RunResult& x : r) finals.push_back(x.final_regret);
  EXPECT_DOUBLE_EQ(s.p95, quantile(finals, 0.95));
  EXPECT_DOUBLE_EQ(s.band_q50.back(), s.median);
}

TEST(OutputTest, WritesFiles) {
  ExperimentConfig cfg = parse_config(mab_doc(20));
  cfg.out_dir = (std::filesystem::temp_directory_path() / "hpb_harness_test").string();
  cfg.prefix = "smoke";
  const std::vector<RunResult> r = run_experiment(cfg);
  write_outputs(cfg, r, summarize(r, cfg.T, 5));
  std::ifstream csv(cfg.out_dir + "/smoke_seed3.csv");
  std::stringstream buf;
  buf << csv.rdbuf();
  EXPECT_EQ(buf.str(), trace_csv(r[0].trace));
  std::ifstream js(cfg.out_dir + "/smoke_summary.json");
  const Json summary = Json::parse(js);
  EXPECT_EQ(summary["config_hash"], cfg.hash);
  EXPECT_EQ(summary["runs"].size(), 3u);
}

TEST(FreedmanValidationTest, ReportsPerProcessAndDelta) {
  const Json doc = Json::parse(R"({"setting": "freedman", "seeds": [3],
    "freedman": {"process": "all", "trials": 50, "T": 40, "deltas": [0.1]}})");
  const Json rep = run_freedman_validation(parse_config(doc));
  ASSERT_EQ(rep["reports"].size(), 3u);
  for (const Json& r : rep["reports"]) EXPECT_TRUE(r["ok"].get<bool>());
}

}  // namespace
}  // namespace hpb
