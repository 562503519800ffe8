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

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rydfalqon/channel.hpp"
#include "rydfalqon/circuit.hpp"
#include "rydfalqon/problem.hpp"

namespace rydfalqon {

struct FalqonParams {
  double dt = 0.2;
  double k = 2.0;
  int layers = 20;
  double beta1 = 0.0;

  void validate() const;
};

struct LayerRecord {
  int layer = 0;          // 1-based
  double beta = 0.0;      // beta_j applied in this layer
  double energy = 0.0;    // <H_p> after the layer, trace-normalized
  double ratio = 0.0;     // r_A = energy / E_min (NaN when E_min == 0)
  double success = 0.0;   // raw ground-state probability
  double trace = 1.0;     // retained trace
  double feedback = 0.0;  // A_j = <i[H_d, H_p]> after the layer
  RVector distribution;   // raw computational-basis probabilities
};

struct FalqonTrace {
  int n = 0;
  double ground_energy = 0.0;
  std::vector<std::uint64_t> ground_states;
  bool ratio_defined = true;
  std::vector<LayerRecord> layers;

  /// 1-based layer with the largest success probability (earliest on ties).
  int peak_success_layer() const;
};

/// Exact statevector FALQON from |+>^n.
FalqonTrace run_ideal(const IsingHamiltonian& hp, const FalqonParams& p);

/// Channels keyed by nominal angle. Lookup matches within 1e-9 rad.
class ChannelSet {
 public:
  void add(std::shared_ptr<const TwoQubitChannel> ch);
  void add(TwoQubitChannel ch) { add(std::make_shared<const TwoQubitChannel>(std::move(ch))); }
  std::shared_ptr<const TwoQubitChannel> find(double theta) const;
  std::size_t size() const { return channels_.size(); }

  /// Unitary channels for the angles a given run needs.
  static ChannelSet ideal(const IsingHamiltonian& hp, double dt, Scheme scheme,
                          const EntanglingDurations& d = {});

 private:
  std::vector<std::shared_ptr<const TwoQubitChannel>> channels_;
};

/// Replaces every entangling gate of `schedule` by the channel for its angle.
Schedule bind_channels(const Schedule& schedule, const ChannelSet& channels);

/// Density-matrix FALQON where each entangling gate is a channel.
FalqonTrace run_noisy(const IsingHamiltonian& hp, const FalqonParams& p, Scheme scheme,
                      const ChannelSet& channels);

/// Gates of one full layer (phase separation then mixer) with channels bound.
Schedule layer_schedule(const IsingHamiltonian& hp, const FalqonParams& p, Scheme scheme,
                        double beta);

struct ContinuousTrajectory {
  std::vector<double> time;
  std::vector<double> energy;
  std::vector<double> beta;
};

/// Continuous feedback dynamics i d|psi>/dt = (H_p + beta(t) H_d)|psi>,
/// beta(t) = -k <i[H_d, H_p]>, sampled every dt_sample.
ContinuousTrajectory oracle_continuous(const IsingHamiltonian& hp, double k, double t_final,
                                       double dt_sample, double rtol = 1e-11);

double success_probability(const RVector& distribution, const std::vector<std::uint64_t>& ground);

/// <psi|i[H_d, H_p]|psi> / <psi|psi> without forming the commutator.
double feedback_signal(const StateVector& psi, const RVector& hp_diagonal);

std::string trace_to_csv(const FalqonTrace& t);
nlohmann::json to_json(const FalqonTrace& t);

}  // namespace rydfalqon
