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

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rydfalqon/channel.hpp"
#include "rydfalqon/linops.hpp"
#include "rydfalqon/ode.hpp"

namespace rydfalqon {

// Units: configuration frequencies are ordinary frequencies (MHz or kHz as
// labeled); internally everything is angular, rad/us, with times in us.
// Decay and dephasing rates are plain rates (1/us internally).

/// Physical constants of the two-atom system.
struct AtomModel {
  double omega2_mhz = 50.0;     // 480-nm Rabi frequency Omega_2 / 2pi
  double delta1ph_mhz = 160.0;  // single-photon detuning Delta / 2pi
  double delta2ph_khz = 0.0;    // two-photon detuning delta / 2pi
  double urr_mhz = 1855.0;      // Rydberg interaction u_rr / 2pi
  double tau_p_us = 0.0262;
  double tau_r_us = 212.0;
  // Branching ratios of |p> -> {0, 1, d} and |r> -> {0, 1, d, p}.
  double b0p = 1.0 / 8, b1p = 1.0 / 8, bdp = 3.0 / 4;
  double b0r = 1.0 / 16, b1r = 1.0 / 16, bdr = 3.0 / 8, bpr = 1.0 / 2;
  double gamma1_dp_khz = 0.0;  // |p>-|1> dephasing rate
  double gamma2_dp_khz = 0.0;  // |r>-|p> dephasing rate
  bool spontaneous_emission = true;
  bool platform_constrained = true;  // enforces omega2_mhz <= 50

  void validate() const;
};

/// Gaussian pulse Omega_0 exp[-(t - 2T)^2 / T^2] on [0, 4T] with quasi-static
/// fractional intensity offsets.
struct PulseParams {
  double omega0_mhz = 24.0;
  double t_quarter_us = 0.25;
  double d_omega1 = 0.0;
  double d_omega2 = 0.0;

  double duration_us() const { return 4.0 * t_quarter_us; }
  void validate() const;
};

struct GateSpec {
  double theta = 0.4;
  double duration_us = 1.0;

  void validate() const;
};

enum class IntegratorMethod { rk4, dopri5 };

struct IntegratorOptions {
  IntegratorMethod method = IntegratorMethod::rk4;
  double step_us = 2e-6;  // rk4 step
  double rtol = 1e-8;     // dopri5 tolerances
  double atol = 1e-12;
};

/// Single-atom levels in the order used for the 25-dimensional basis.
enum class Level { g0 = 0, g1 = 1, d = 2, p = 3, r = 4 };

/// Two-atom basis index (atom a most significant) in the 5x5 = 25 level space.
constexpr int atom_pair_index(Level a, Level b) { return 5 * static_cast<int>(a) + static_cast<int>(b); }

/// Gaussian envelope Omega_1(t) in rad/us including the intensity offset.
double pulse_rabi(const PulseParams& pulse, double t_us);

/// Hamiltonian H(t) on {0,1,d,p,r}^2 in rad/us.
CMatrix hamiltonian_at(const AtomModel& model, const PulseParams& pulse, double t_us);

/// Jump operators (25x25) of spontaneous emission and laser dephasing for both atoms.
std::vector<CMatrix> jump_operators(const AtomModel& model);

/// Dense reference right-hand side -i[H, rho] + sum_k D[L_k](rho).
CMatrix lindblad_rhs(const CMatrix& rho, const CMatrix& h, const AtomModel& model);

/// Which single-atom levels are propagated. `no_leakage` drops |d>: decay
/// into it becomes pure loss, which leaves every block without |d> exact.
enum class LevelSet { full, no_leakage };

/// Structured Lindblad generator used by the integrators. Exploits the
/// few-coupling structure of H(t) and the transfer form of the jumps.
class LindbladGenerator {
 public:
  LindbladGenerator(const AtomModel& model, const PulseParams& pulse, LevelSet levels);

  int dim() const { return dim_; }
  LevelSet levels() const { return levels_; }
  /// Basis index of a two-atom state, or -1 if the level is not propagated.
  int index(Level a, Level b) const;
  /// Embeds a 25x25 matrix into the propagated basis (dropping |d> rows/cols when needed).
  CMatrix restrict(const CMatrix& full) const;

  void rhs(double t, const CMatrix& rho, CMatrix& out) const;

 private:
  struct Link {
    int i;
    int j;
    double value;
  };
  struct Transfer {
    double rate;
    std::vector<int> src;
    std::vector<int> dst;
  };

  LevelSet levels_;
  int dim_ = 0;
  int per_atom_ = 0;
  int local_[5] = {};
  PulseParams pulse_;
  double pulse_scale_ = 0.0;
  CMatrix factor_;  // entrywise part: -i(h_i - conj h_j) + dephasing sandwich
  std::vector<Link> static_links_;
  std::vector<Link> pulse_links_;  // scaled by the Gaussian envelope
  std::vector<Transfer> transfers_;
};

/// Propagates a 25x25 density matrix over the pulse [0, 4T].
CMatrix evolve(const CMatrix& rho0, const AtomModel& model, const PulseParams& pulse,
               const IntegratorOptions& options = {}, IntegratorStats* stats = nullptr);

/// Same propagation in a restricted level set; input and output in that basis.
CMatrix evolve_in(const LindbladGenerator& gen, const CMatrix& rho0, double duration_us,
                  const IntegratorOptions& options = {}, IntegratorStats* stats = nullptr);

/// tr[rho_t rho_target] from the uniform two-qubit superposition.
double gate_fidelity(const AtomModel& model, const PulseParams& pulse, const GateSpec& spec,
                     const IntegratorOptions& options = {}, IntegratorStats* stats = nullptr);

/// |F(h) - F(h/2)| for the rk4 integrator.
double fidelity_step_sensitivity(const AtomModel& model, const PulseParams& pulse,
                                 const GateSpec& spec, const IntegratorOptions& options = {});

struct AxisRange {
  double start = 0.0;
  double stop = 0.0;
  double step = 1.0;

  std::vector<double> values() const;
};

struct GateGrid {
  AxisRange omega0_mhz;
  AxisRange delta1ph_mhz;
  std::optional<AxisRange> delta2ph_khz;
};

struct GatePoint {
  double omega0_mhz = 0.0;
  double delta1ph_mhz = 0.0;
  double delta2ph_khz = 0.0;
  double fidelity = 0.0;
};

struct GateOptimum {
  GatePoint best;
  std::vector<GatePoint> map;         // every grid evaluation, grid order
  std::vector<GatePoint> refinement;  // local refinement evaluations
};

/// Runs `count` independent jobs on up to `jobs` threads. Each index is run exactly once.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& body);

/// Exhaustive grid search followed by a two-round coordinate refinement.
GateOptimum optimize_gate(const AtomModel& model, const PulseParams& pulse, const GateSpec& spec,
                          const GateGrid& grid, const IntegratorOptions& options = {}, int jobs = 1,
                          bool refine = true);

/// Computational-subspace channel of one gate with virtual-Z compensation.
TwoQubitChannel extract_channel(const AtomModel& model, const PulseParams& pulse,
                                const GateSpec& spec, const IntegratorOptions& options = {},
                                int jobs = 1, IntegratorStats* stats = nullptr);

/// Uncompensated 16x16 superoperator of the evolution projected on the computational subspace.
Superoperator raw_superoperator(const AtomModel& model, const PulseParams& pulse,
                                const IntegratorOptions& options = {}, int jobs = 1,
                                IntegratorStats* stats = nullptr);

/// Applies diag(1, e^{ia}) (x) diag(1, e^{ib}) after the channel, choosing a and b
/// so the |01> and |10> diagonal entries of the leading Kraus operator share
/// the phase of the |00> entry.
TwoQubitChannel compensate_single_qubit_phases(const TwoQubitChannel& ch);

enum class ScanAxis { intensity1, intensity2, two_photon_detuning, dephasing };

std::string to_string(ScanAxis a);
ScanAxis parse_scan_axis(const std::string& s);

struct ScanPoint {
  double x = 0.0;
  double y = 0.0;  // second dephasing rate; unused otherwise
  double fidelity = 0.0;
};

/// Quasi-static robustness scan. `xs` are fractional offsets (intensity axes),
/// kHz detunings, or gamma1 rates in kHz; `ys` (dephasing only) are gamma2 rates.
std::vector<ScanPoint> scan_robustness(const AtomModel& model, const PulseParams& pulse,
                                       const GateSpec& spec, ScanAxis axis,
                                       const std::vector<double>& xs,
                                       const std::vector<double>& ys = {},
                                       const IntegratorOptions& options = {}, int jobs = 1);

nlohmann::json to_json(const AtomModel& m);
nlohmann::json to_json(const PulseParams& p);
nlohmann::json to_json(const GateSpec& g);
nlohmann::json to_json(const IntegratorOptions& o);

}  // namespace rydfalqon
