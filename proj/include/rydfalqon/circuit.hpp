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

#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rydfalqon/channel.hpp"
#include "rydfalqon/linops.hpp"
#include "rydfalqon/problem.hpp"

namespace rydfalqon {

enum class GateKind { single_qubit, two_qubit, channel };

/// One circuit instruction. Two-qubit payloads act on (targets[0], targets[1])
/// with targets[0] as the more significant qubit of the 4x4 matrix.
struct GateOp {
  GateKind kind = GateKind::single_qubit;
  std::vector<int> targets;
  CMatrix matrix;
  std::shared_ptr<const TwoQubitChannel> channel;
  std::string label;
  double angle = 0.0;

  static GateOp single(std::string label, CMatrix u, int q, double angle = 0.0);
  static GateOp two(std::string label, CMatrix u, int q0, int q1, double angle = 0.0);
  static GateOp from_channel(std::shared_ptr<const TwoQubitChannel> ch, int q0, int q1);

  bool entangling() const { return kind != GateKind::single_qubit; }
};

using Schedule = std::vector<GateOp>;

enum class Scheme { small_angle_cp, two_cz };

std::string to_string(Scheme s);
Scheme parse_scheme(const std::string& s);

CMatrix rz(double angle);      // exp(-i angle Z / 2)
CMatrix rx(double angle);      // exp(-i angle X / 2)
CMatrix phase_gate(double phi);  // diag(1, e^{i phi})
CMatrix cz();

/// exp(-i a Z(x)Z / 2) with one controlled-phase gate CP(2a) followed by P(a) on both qubits.
Schedule rzz_via_cp(double a, int q0 = 0, int q1 = 1);
/// exp(-i a Z(x)Z / 2) as CNOT-Rz-CNOT with each CNOT realized by H-CZ-H on q1.
Schedule rzz_via_cz(double a, int q0 = 0, int q1 = 1);

/// exp(-i dt H_p) up to global phase: one R_zz per coupling in edge order, then field Rz's.
Schedule phase_separation_schedule(const IsingHamiltonian& hp, double dt, Scheme scheme);
/// exp(-i beta dt H_d) with H_d = -1/2 sum X_i.
Schedule mixer_schedule(int n, double beta, double dt);

/// Dense unitary of a schedule of unitary gates on n qubits.
CMatrix schedule_unitary(const Schedule& schedule, int n);

StateVector apply_gate(StateVector psi, const GateOp& op, int n);
DensityMatrix apply_gate(DensityMatrix rho, const GateOp& op, int n);

// In-place forms used by the simulators.
void apply_gate_inplace(StateVector& psi, const GateOp& op, int n);
void apply_gate_inplace(DensityMatrix& rho, const GateOp& op, int n);

int entangling_gate_count(const Schedule& schedule);

struct EntanglingDurations {
  double cp_us = 1.0;
  double cz_us = 2.0;
};

/// Sum of entangling-gate durations. Channels carry their own duration.
double total_entangling_time(const Schedule& schedule, const EntanglingDurations& d = {});

/// u times the unit phase that best aligns it with `reference` (maximizes Re tr(reference^dagger u)).
CMatrix align_global_phase(const CMatrix& u, const CMatrix& reference);

nlohmann::json schedule_to_json(const Schedule& schedule);

}  // namespace rydfalqon
