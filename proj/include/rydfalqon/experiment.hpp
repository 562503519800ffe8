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

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rydfalqon/atomgate.hpp"
#include "rydfalqon/falqon.hpp"
#include "rydfalqon/problem.hpp"

namespace rydfalqon {

inline constexpr const char* kToolVersion = "0.1.0";

enum class Experiment { gate_fidelity, gate_optimize, gate_channel, gate_scan, falqon, falqon_sweep };

std::string to_string(Experiment e);
Experiment parse_experiment(const std::string& s);

/// Where the channels of a noisy run come from.
enum class ChannelBackend { extracted, depolarized, unitary };

std::string to_string(ChannelBackend b);
ChannelBackend parse_channel_backend(const std::string& s);

/// One physical gate realization: pulse shape plus the detunings it was tuned for.
struct GateSetting {
  PulseParams pulse;
  double delta1ph_mhz = 160.0;
  double delta2ph_khz = 0.0;
  ChannelBackend backend = ChannelBackend::extracted;
  double target_fidelity = 0.99;  // depolarized backend only
};

struct ThetaOverride {
  double theta = 0.0;
  double omega0_mhz = 0.0;
  double delta1ph_mhz = 0.0;
  double delta2ph_khz = 0.0;
};

struct ScanConfig {
  ScanAxis axis = ScanAxis::dephasing;
  std::vector<double> xs;
  std::vector<double> ys;
};

struct SweepConfig {
  std::vector<double> dts;
  std::vector<double> delta2ph_khz;
  bool reoptimize = false;             // re-run the grid search for each new angle
  std::vector<ThetaOverride> gate_table;  // per-angle gate settings
};

struct RunConfig {
  Experiment experiment = Experiment::gate_fidelity;

  std::optional<Graph> graph;
  std::string graph_label;
  FalqonParams falqon;
  bool layers_explicit = false;
  std::string scheme = "ideal";  // ideal | small-angle-cp | two-cz

  AtomModel atom;
  GateSetting cp;  // small-angle gate; its detunings override `atom`
  GateSetting cz{PulseParams{48.0, 0.5, 0.0, 0.0}, 340.0, 0.0, ChannelBackend::extracted, 0.99};
  double theta = 0.4;

  IntegratorOptions integrator;
  bool check_convergence = false;
  GateGrid grid{{20.0, 30.0, 2.0}, {140.0, 180.0, 10.0}, std::nullopt};
  bool refine = true;
  ScanConfig scan;
  SweepConfig sweep;

  std::string output_dir = "out";
  std::string channel_cache;  // empty disables the cache
  int jobs = 1;

  /// Atom model with the small-angle gate's detunings applied.
  AtomModel cp_model() const;
  AtomModel cz_model() const;
  GateSpec cp_spec() const { return {theta, cp.pulse.duration_us()}; }
  void validate() const;
};

RunConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const RunConfig& c);

/// Named overrides: graph presets (edge, path3, type-1..3), experiment
/// presets (n2-edge, n3-path, n4-cycle) and gate presets
/// (cp-0.4, cp-0.4-tuned, cp-0.8-tuned, cz-2us).
void apply_preset(RunConfig& c, const std::string& name);
std::vector<std::string> preset_names();

struct RunRecord {
  nlohmann::json config;
  std::string version = kToolVersion;
  double wall_seconds = 0.0;
  nlohmann::json diagnostics = nlohmann::json::object();
  nlohmann::json result = nlohmann::json::object();
  /// Files written next to the record: name -> exact contents.
  std::vector<std::pair<std::string, std::string>> files;
};

nlohmann::json to_json(const RunRecord& r);

/// Content-addressed on-disk channel store. Writes go to a temp file then rename.
class ChannelCache {
 public:
  explicit ChannelCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

  static std::string key(const AtomModel& m, const PulseParams& p, const GateSpec& g,
                         const IntegratorOptions& o);
  std::optional<TwoQubitChannel> load(const std::string& key) const;
  void store(const std::string& key, const TwoQubitChannel& ch) const;
  std::filesystem::path path_for(const std::string& key) const;

 private:
  std::filesystem::path dir_;
};

/// Extracts a channel, consulting `cache_dir` first when it is non-empty.
TwoQubitChannel obtain_channel(const AtomModel& m, const PulseParams& p, const GateSpec& g,
                               const IntegratorOptions& o, const std::string& cache_dir, int jobs,
                               nlohmann::json* diagnostics = nullptr);

RunRecord cmd_gate_fidelity(const RunConfig& c);
RunRecord cmd_gate_optimize(const RunConfig& c);
RunRecord cmd_gate_channel(const RunConfig& c);
RunRecord cmd_gate_scan(const RunConfig& c);
RunRecord cmd_falqon(const RunConfig& c);
RunRecord cmd_falqon_sweep(const RunConfig& c);

RunRecord run_experiment(const RunConfig& c);

/// Writes record.json and every payload file under `dir`.
void write_record(const RunRecord& r, const std::filesystem::path& dir);

/// Entangling-gate totals of an n-layer run: count and time in us.
struct EntanglingReport {
  int gates = 0;
  double time_us = 0.0;
};
EntanglingReport entangling_report(const IsingHamiltonian& hp, const FalqonParams& p, Scheme scheme,
                                   const EntanglingDurations& d = {});

}  // namespace rydfalqon
