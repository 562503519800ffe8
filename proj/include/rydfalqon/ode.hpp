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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "rydfalqon/error.hpp"

namespace rydfalqon {

struct IntegratorStats {
  std::int64_t steps = 0;
  std::int64_t rejected = 0;
  std::int64_t rhs_evaluations = 0;
};

namespace ode {

/// Classical fourth-order Runge-Kutta from t0 to t1 with n equal steps.
/// `rhs(t, y, dy)` writes dy/dt into dy. State is any Eigen dense type.
template <typename State, typename Rhs>
void rk4(State& y, double t0, double t1, std::int64_t n, Rhs&& rhs, IntegratorStats* stats = nullptr) {
  if (n < 1) throw ConfigError("rk4: step count must be positive");
  const double h = (t1 - t0) / static_cast<double>(n);
  State k1 = y, k2 = y, k3 = y, k4 = y, tmp = y;
  for (std::int64_t s = 0; s < n; ++s) {
    const double t = t0 + static_cast<double>(s) * h;
    rhs(t, y, k1);
    tmp = y + (0.5 * h) * k1;
    rhs(t + 0.5 * h, tmp, k2);
    tmp = y + (0.5 * h) * k2;
    rhs(t + 0.5 * h, tmp, k3);
    tmp = y + h * k3;
    rhs(t + h, tmp, k4);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  if (stats) {
    stats->steps += n;
    stats->rhs_evaluations += 4 * n;
  }
}

struct AdaptiveOptions {
  double rtol = 1e-8;
  double atol = 1e-10;
  double initial_step = 0.0;  // 0 picks a step from the interval length
  double min_step = 1e-14;
  std::int64_t max_steps = 50'000'000;
};

/// Dormand-Prince 5(4) with an RMS error norm and elementary step control.
template <typename State, typename Rhs>
void dopri5(State& y, double t0, double t1, Rhs&& rhs, const AdaptiveOptions& opt = {},
            IntegratorStats* stats = nullptr) {
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                   a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                   b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                   e6 = 22.0 / 525, e7 = -1.0 / 40;

  const double span = t1 - t0;
  if (span == 0.0) return;
  if (span < 0.0) throw ConfigError("dopri5: integration must move forward in time");
  double h = opt.initial_step > 0.0 ? opt.initial_step : span * 1e-3;
  double t = t0;
  State k1 = y, k2 = y, k3 = y, k4 = y, k5 = y, k6 = y, k7 = y, tmp = y, err = y;
  rhs(t, y, k1);
  std::int64_t evals = 1, accepted = 0, rejected = 0;
  while (t < t1) {
    if (accepted + rejected >= opt.max_steps) throw NumericalError("dopri5: step budget exhausted");
    h = std::min(h, t1 - t);
    tmp = y + h * (a21 * k1);
    rhs(t + c2 * h, tmp, k2);
    tmp = y + h * (a31 * k1 + a32 * k2);
    rhs(t + c3 * h, tmp, k3);
    tmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    rhs(t + c4 * h, tmp, k4);
    tmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    rhs(t + c5 * h, tmp, k5);
    tmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    rhs(t + h, tmp, k6);
    tmp = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    rhs(t + h, tmp, k7);
    evals += 6;
    err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    const auto scale = opt.atol + opt.rtol * y.cwiseAbs().cwiseMax(tmp.cwiseAbs()).array();
    const double norm = std::sqrt((err.cwiseAbs().array() / scale).square().mean());
    if (!std::isfinite(norm)) throw NumericalError("dopri5: non-finite error estimate");

    if (norm <= 1.0) {
      t += h;
      y = tmp;
      k1 = k7;
      ++accepted;
    } else {
      ++rejected;
    }
    const double factor = norm == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(norm, -0.2), 0.2, 5.0);
    h *= norm <= 1.0 ? factor : std::min(factor, 1.0);
    if (h < opt.min_step && t < t1) throw NumericalError("dopri5: step size underflow");
  }
  if (stats) {
    stats->steps += accepted;
    stats->rejected += rejected;
    stats->rhs_evaluations += evals;
  }
}

}  // namespace ode
}  // namespace rydfalqon
