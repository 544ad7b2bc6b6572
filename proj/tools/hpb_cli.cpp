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

// Command line entry point.
//
//   hpb_cli run --config cfg.json [--check] [--workers N] [--out DIR]
//   hpb_cli validate-freedman --config cfg.json
//
// Exit codes: 0 success, 1 config or I/O error, 2 invariant violation
// (check mode) or a Freedman bound exceeded its tolerance.

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "hpb/harness.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kIoError = 1;
constexpr int kViolation = 2;

int do_run(const std::string& path, bool check, int workers,
           const std::string& out) {
  hpb::ExperimentConfig cfg = hpb::load_config(path);
  if (check) cfg.check = true;
  if (workers > 0) cfg.workers = workers;
  if (!out.empty()) cfg.out_dir = out;
  if (cfg.setting == hpb::Setting::kFreedman)
    throw hpb::ConfigError("setting 'freedman' runs through validate-freedman");

  const std::vector<hpb::RunResult> results = hpb::run_experiment(cfg);
  const hpb::ExperimentSummary summary =
      hpb::summarize(results, cfg.T, cfg.band_points);
  hpb::write_outputs(cfg, results, summary);

  for (const hpb::RunResult& r : results)
    if (r.status != "ok")
      std::cerr << "seed " << r.seed << ": " << r.status << ": " << r.diagnostic
                << "\n";
  std::printf("runs=%d failed=%d violations=%d mean=%.6g median=%.6g p95=%.6g\n",
              summary.runs, summary.failed, summary.violations, summary.mean,
              summary.median, summary.p95);
  return cfg.check && summary.violations > 0 ? kViolation : kOk;
}

int do_freedman(const std::string& path) {
  const hpb::ExperimentConfig cfg = hpb::load_config(path);
  if (cfg.setting != hpb::Setting::kFreedman)
    throw hpb::ConfigError("validate-freedman needs setting 'freedman'");
  const hpb::Json report = hpb::run_freedman_validation(cfg);
  std::cout << report.dump(2) << "\n";
  for (const hpb::Json& r : report["reports"])
    if (!r["ok"].get<bool>()) return kViolation;
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"High-probability bandit experiments"};
  app.require_subcommand(1);

  std::string run_config, out_dir, freedman_config;
  bool check = false;
  int workers = 0;
  CLI::App* run = app.add_subcommand("run", "Run an experiment over all seeds");
  run->add_option("--config", run_config, "JSON config")->required();
  run->add_flag("--check", check, "Assert pathwise invariants every round");
  run->add_option("--workers", workers, "Parallel seeds")
      ->check(CLI::PositiveNumber);
  run->add_option("--out", out_dir, "Output directory");
  CLI::App* freedman = app.add_subcommand(
      "validate-freedman", "Monte Carlo check of the martingale bound");
  freedman->add_option("--config", freedman_config, "JSON config")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kIoError;
  }

  try {
    if (run->parsed()) return do_run(run_config, check, workers, out_dir);
    return do_freedman(freedman_config);
  } catch (const hpb::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return kIoError;
}
