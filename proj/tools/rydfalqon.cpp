// Copyright 2026 The rydfalqon Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end: one subcommand per experiment.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rydfalqon/error.hpp"
#include "rydfalqon/experiment.hpp"

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kConfigError = 2, kNumericalError = 3 };

struct Options {
  std::string config;
  std::string out;
  int jobs = 0;
  std::vector<std::string> presets;
};

int run(rydfalqon::Experiment experiment, const Options& opt) {
  using namespace rydfalqon;
  RunConfig cfg = opt.config.empty() ? RunConfig{} : load_config(opt.config);
  cfg.experiment = experiment;
  for (const auto& p : opt.presets) apply_preset(cfg, p);
  if (!opt.out.empty()) cfg.output_dir = opt.out;
  if (opt.jobs > 0) cfg.jobs = opt.jobs;

  const RunRecord record = run_experiment(cfg);
  write_record(record, cfg.output_dir);
  std::cout << record.result.dump(2) << '\n';
  std::fprintf(stderr, "%s: wrote %s (%.1f s)\n", to_string(experiment).c_str(), cfg.output_dir.c_str(),
               record.wall_seconds);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  using rydfalqon::Experiment;

  CLI::App app{"Rydberg-gate FALQON simulator"};
  app.set_version_flag("--version", rydfalqon::kToolVersion);
  app.require_subcommand(1);

  Options opt;
  std::string preset_help = "Named preset, applied after --config (repeatable):";
  for (const auto& p : rydfalqon::preset_names()) preset_help += " " + p;

  const std::vector<std::pair<Experiment, std::string>> commands = {
      {Experiment::gate_fidelity, "Fidelity of one gate setting"},
      {Experiment::gate_optimize, "Grid search over (omega0, delta1ph)"},
      {Experiment::gate_channel, "Extract the two-qubit channel of a gate"},
      {Experiment::gate_scan, "Robustness scan against quasi-static noise"},
      {Experiment::falqon, "Run FALQON for Max-Cut"},
      {Experiment::falqon_sweep, "Sweep FALQON over dt and/or two-photon detuning"},
  };
  std::vector<std::pair<CLI::App*, Experiment>> subs;
  for (const auto& [kind, help] : commands) {
    CLI::App* sub = app.add_subcommand(rydfalqon::to_string(kind), help);
    sub->add_option("--config", opt.config, "JSON run configuration")->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "Output directory");
    sub->add_option("--jobs", opt.jobs, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--preset", opt.presets, preset_help);
    subs.emplace_back(sub, kind);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    for (const auto& [sub, kind] : subs) {
      if (sub->parsed()) return run(kind, opt);
    }
  } catch (const rydfalqon::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const rydfalqon::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumericalError;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kFailure;
}
