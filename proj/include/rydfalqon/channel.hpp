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

#include <nlohmann/json.hpp>

#include "rydfalqon/linops.hpp"

namespace rydfalqon {

using Superoperator = Eigen::Matrix<Complex, 16, 16>;

/// Completely positive, trace-non-increasing map on the two-qubit
/// computational subspace.
///
/// The superoperator acts on row-major vectorized 4x4 matrices:
/// vec(rho)[4*i + j] = rho(i, j), and vec(E(rho)) = superop * vec(rho).
/// Basis order is |00>, |01>, |10>, |11> with the first qubit most significant.
struct TwoQubitChannel {
  Superoperator superop = Superoperator::Identity();
  double theta = 0.0;         // nominal controlled-phase angle, rad
  double duration_us = 0.0;   // gate time
  double fidelity = 1.0;      // state fidelity of the source evolution
  nlohmann::json parameters = nlohmann::json::object();

  static TwoQubitChannel identity();
  /// rho -> U rho U^dagger.
  static TwoQubitChannel from_unitary(const CMatrix& u, double theta, double duration_us);
  /// rho -> (1 - p) U rho U^dagger + p tr(rho) I/4.
  static TwoQubitChannel depolarized(const CMatrix& u, double p, double theta, double duration_us);

  CMatrix apply(const CMatrix& rho) const;

  /// Choi matrix C = sum_ij |i><j| (x) E(|i><j|).
  CMatrix choi() const;
  double choi_min_eigenvalue() const;
  /// Largest eigenvalue of the dual map applied to the identity (<= 1 for TNI maps).
  double max_trace_gain() const;
  /// Kraus operator for the largest Choi eigenvalue, scaled by its square root.
  CMatrix leading_kraus() const;

  /// Throws NumericalError when CP or trace-non-increase is violated.
  void validate(double cp_tol = 1e-7, double tni_tol = 1e-8) const;
};

/// Controlled phase diag(1, 1, 1, e^{-i theta}).
CMatrix controlled_phase(double theta);
/// Superoperator of rho -> U rho U^dagger for a 4x4 unitary.
Superoperator unitary_superoperator(const CMatrix& u);
/// State fidelity <target|E(|init><init|)|target> with the uniform input and
/// the (|00>+|01>+|10>+e^{-i theta}|11>)/2 target.
double channel_state_fidelity(const TwoQubitChannel& ch, double theta);

nlohmann::json to_json(const TwoQubitChannel& ch);
TwoQubitChannel channel_from_json(const nlohmann::json& j);

}  // namespace rydfalqon
