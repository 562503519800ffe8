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

#include <cmath>

#include <gtest/gtest.h>

#include "rydfalqon/linops.hpp"
#include "rydfalqon/ode.hpp"

namespace rydfalqon {
namespace {

// y' = lambda y with a damped oscillation.
const Complex kLambda(-0.3, 7.0);

auto linear_rhs() {
  return [](double, const CVector& y, CVector& dy) { dy = kLambda * y; };
}

double rk4_error(std::int64_t steps) {
  CVector y = CVector::Ones(2);
  ode::rk4(y, 0.0, 2.0, steps, linear_rhs());
  return (y - CVector::Constant(2, std::exp(2.0 * kLambda))).norm();
}

TEST(Rk4, FourthOrderConvergence) {
  const double e1 = rk4_error(400), e2 = rk4_error(800);
  const double order = std::log2(e1 / e2);
  EXPECT_NEAR(order, 4.0, 0.1);
}

TEST(Rk4, CountsWork) {
  CVector y = CVector::Ones(1);
  IntegratorStats stats;
  ode::rk4(y, 0.0, 1.0, 10, linear_rhs(), &stats);
  EXPECT_EQ(stats.steps, 10);
  EXPECT_EQ(stats.rhs_evaluations, 40);
  EXPECT_THROW(ode::rk4(y, 0.0, 1.0, 0, linear_rhs()), ConfigError);
}

TEST(Rk4, MatrixState) {
  // rho' = -i[H, rho] keeps the spectrum; compare with exact conjugation.
  const CMatrix h = pauli::x() * 3.0;
  CMatrix rho = CMatrix::Zero(2, 2);
  rho(0, 0) = 1.0;
  ode::rk4(rho, 0.0, 1.0, 2000, [&](double, const CMatrix& r, CMatrix& d) {
    d = Complex(0, -1) * (h * r - r * h);
  });
  EXPECT_NEAR(rho(0, 0).real(), std::cos(3.0) * std::cos(3.0), 1e-12);
  EXPECT_NEAR(rho(1, 1).real(), std::sin(3.0) * std::sin(3.0), 1e-12);
}

TEST(Dopri5, MeetsTolerance) {
  for (double rtol : {1e-6, 1e-9, 1e-11}) {
    CVector y = CVector::Ones(2);
    ode::AdaptiveOptions opt;
    opt.rtol = rtol;
    opt.atol = rtol * 1e-2;
    IntegratorStats stats;
    ode::dopri5(y, 0.0, 2.0, linear_rhs(), opt, &stats);
    const double err = (y - CVector::Constant(2, std::exp(2.0 * kLambda))).norm();
    EXPECT_LT(err, 200 * rtol) << rtol;
    EXPECT_GT(stats.steps, 0);
  }
}

TEST(Dopri5, TighterToleranceTakesMoreSteps) {
  IntegratorStats loose, tight;
  CVector y = CVector::Ones(1);
  ode::dopri5(y, 0.0, 2.0, linear_rhs(), {1e-5, 1e-7}, &loose);
  y = CVector::Ones(1);
  ode::dopri5(y, 0.0, 2.0, linear_rhs(), {1e-10, 1e-12}, &tight);
  EXPECT_GT(tight.steps, loose.steps);
}

TEST(Dopri5, EmptyAndBackwardIntervals) {
  CVector y = CVector::Ones(1);
  ode::dopri5(y, 1.0, 1.0, linear_rhs());
  EXPECT_EQ(y(0), Complex(1.0));
  EXPECT_THROW(ode::dopri5(y, 1.0, 0.0, linear_rhs()), ConfigError);
}

TEST(Dopri5, BlowUpIsReported) {
  CVector y = CVector::Ones(1);
  // y' = y^2 blows up at t = 1.
  auto rhs = [](double, const CVector& v, CVector& d) { d = v.cwiseProduct(v); };
  ode::AdaptiveOptions opt;
  opt.max_steps = 100000;
  EXPECT_THROW(ode::dopri5(y, 0.0, 2.0, rhs, opt), NumericalError);
}

}  // namespace
}  // namespace rydfalqon
