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

#include <random>

#include <gtest/gtest.h>

#include "rydfalqon/circuit.hpp"
#include "rydfalqon/problem.hpp"

namespace rydfalqon {
namespace {

// exp(-i a Z(x)Z / 2) written out on the diagonal.
CMatrix exact_rzz(double a) {
  const Complex m = std::polar(1.0, -a / 2), p = std::polar(1.0, a / 2);
  return Eigen::Vector4cd(m, p, p, m).asDiagonal();
}

// Product of embedded gate matrices, built independently of schedule_unitary.
CMatrix dense_product(const Schedule& s, int n) {
  const auto dim = Eigen::Index{1} << n;
  CMatrix u = CMatrix::Identity(dim, dim);
  for (const auto& op : s) u = embed(op.matrix, std::span<const int>(op.targets), n) * u;
  return u;
}

double phase_aligned_distance(const CMatrix& u, const CMatrix& ref) {
  return (align_global_phase(u, ref) - ref).cwiseAbs().maxCoeff();
}

TEST(Rzz, CpFormAngle) {
  const auto s = rzz_via_cp(0.2);
  ASSERT_EQ(entangling_gate_count(s), 1);
  EXPECT_NEAR(s[0].angle, 0.4, 1e-15);
  EXPECT_LE((s[0].matrix - controlled_phase(0.4)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Rzz, CpFormGlobalPhaseIsExplicit) {
  const CMatrix u = schedule_unitary(rzz_via_cp(0.2), 2);
  EXPECT_LE((u - std::polar(1.0, 0.1) * exact_rzz(0.2)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Rzz, BothFormsMatchExactForRandomAngles) {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> angle(1e-6, std::numbers::pi);
  for (int trial = 0; trial < 100; ++trial) {
    const double dt = angle(rng);
    EXPECT_LE(phase_aligned_distance(schedule_unitary(rzz_via_cp(dt), 2), exact_rzz(dt)), 1e-12);
    EXPECT_LE(phase_aligned_distance(schedule_unitary(rzz_via_cz(dt), 2), exact_rzz(dt)), 1e-12);
  }
}

TEST(Rzz, CzFormAtPi) {
  const CMatrix u = align_global_phase(schedule_unitary(rzz_via_cz(std::numbers::pi), 2),
                                       exact_rzz(std::numbers::pi));
  const Complex mi(0, -1), pi(0, 1);
  EXPECT_LE((u.diagonal() - Eigen::Vector4cd(mi, pi, pi, mi)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(entangling_gate_count(rzz_via_cz(0.3)), 2);
}

TEST(Rzz, SmallAngleIsIdentityUpToPhase) {
  EXPECT_LE(phase_aligned_distance(schedule_unitary(rzz_via_cp(1e-12), 2), CMatrix::Identity(4, 4)), 1e-11);
}

TEST(Rzz, OnNonAdjacentQubits) {
  const CMatrix exact = embed(exact_rzz(0.7), {2, 0}, 3);
  EXPECT_LE(phase_aligned_distance(schedule_unitary(rzz_via_cz(0.7, 2, 0), 3), exact), 1e-12);
  EXPECT_LE(phase_aligned_distance(schedule_unitary(rzz_via_cp(0.7, 0, 2), 3), exact), 1e-12);
}

TEST(Schedule, UnitaryMatchesDenseProduct) {
  const auto hp = maxcut_hamiltonian(graph_preset("type-2"));
  for (auto scheme : {Scheme::small_angle_cp, Scheme::two_cz}) {
    Schedule s = phase_separation_schedule(hp, 0.2, scheme);
    const auto mix = mixer_schedule(4, 0.8, 0.2);
    s.insert(s.end(), mix.begin(), mix.end());
    EXPECT_LE((schedule_unitary(s, 4) - dense_product(s, 4)).cwiseAbs().maxCoeff(), 1e-13);
  }
}

TEST(Schedule, PhaseSeparationMatchesHamiltonianExponential) {
  const auto hp = maxcut_hamiltonian(graph_preset("type-3"));
  const RVector d = diagonal(hp);
  CMatrix exact = CMatrix::Zero(16, 16);
  for (int i = 0; i < 16; ++i) exact(i, i) = std::polar(1.0, -0.3 * d(i));
  for (auto scheme : {Scheme::small_angle_cp, Scheme::two_cz}) {
    EXPECT_LE(phase_aligned_distance(schedule_unitary(phase_separation_schedule(hp, 0.3, scheme), 4), exact),
              1e-12);
  }
}

TEST(Schedule, FieldsBecomeRz) {
  IsingHamiltonian hp(2);
  hp.fields(1) = 0.5;
  const auto s = phase_separation_schedule(hp, 0.2, Scheme::small_angle_cp);
  ASSERT_EQ(s.size(), 1u);
  CMatrix exact = CMatrix::Zero(4, 4);
  const RVector d = diagonal(hp);
  for (int i = 0; i < 4; ++i) exact(i, i) = std::polar(1.0, -0.2 * d(i));
  EXPECT_LE(phase_aligned_distance(schedule_unitary(s, 2), exact), 1e-14);
}

TEST(Schedule, MixerIsDriverExponential) {
  const double beta = 0.9, dt = 0.2;
  const CMatrix hd = driver_hamiltonian(3);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hd);
  CVector phases(8);
  for (int i = 0; i < 8; ++i) phases(i) = std::polar(1.0, -beta * dt * es.eigenvalues()(i));
  const CMatrix exact = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
  EXPECT_LE((schedule_unitary(mixer_schedule(3, beta, dt), 3) - exact).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Schedule, GateCountsPerLayer) {
  for (const char* name : {"edge", "path3", "type-1", "type-2", "type-3"}) {
    const Graph g = graph_preset(name);
    const auto hp = maxcut_hamiltonian(g);
    const int m = static_cast<int>(g.edges().size());
    EXPECT_EQ(entangling_gate_count(phase_separation_schedule(hp, 0.2, Scheme::small_angle_cp)), m);
    EXPECT_EQ(entangling_gate_count(phase_separation_schedule(hp, 0.2, Scheme::two_cz)), 2 * m);
  }
}

TEST(Schedule, EntanglingTime) {
  EXPECT_EQ(entangling_gate_count({}), 0);
  EXPECT_EQ(total_entangling_time({}), 0.0);
  const auto edge = maxcut_hamiltonian(graph_preset("edge"));
  const auto path = maxcut_hamiltonian(graph_preset("path3"));
  EXPECT_DOUBLE_EQ(20 * total_entangling_time(phase_separation_schedule(edge, 0.2, Scheme::small_angle_cp)), 20.0);
  EXPECT_DOUBLE_EQ(30 * total_entangling_time(phase_separation_schedule(path, 0.2, Scheme::two_cz)), 240.0);
  EXPECT_EQ(30 * entangling_gate_count(phase_separation_schedule(path, 0.2, Scheme::two_cz)), 120);
}

TEST(ApplyGate, CzOnEleven) {
  StateVector s = StateVector::Zero(4);
  s(3) = 1.0;
  const StateVector out = apply_gate(s, GateOp::two("cz", cz(), 0, 1, std::numbers::pi), 2);
  EXPECT_LE((out + s).norm(), 1e-15);
}

TEST(ApplyGate, CpChannelPhaseOnCoherence) {
  StateVector bell = StateVector::Zero(4);
  bell(0) = bell(3) = 1.0 / std::sqrt(2.0);
  const DensityMatrix rho = bell * bell.adjoint();
  auto ch = std::make_shared<const TwoQubitChannel>(TwoQubitChannel::from_unitary(controlled_phase(0.4), 0.4, 1));
  const DensityMatrix out = apply_gate(rho, GateOp::from_channel(ch, 0, 1), 2);
  EXPECT_NEAR(std::abs(out(0, 3) - 0.5 * std::polar(1.0, 0.4)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(out(3, 0) - 0.5 * std::polar(1.0, -0.4)), 0.0, 1e-15);
}

TEST(ApplyGate, IdentityChannelLeavesStateUnchanged) {
  std::mt19937 rng(21);
  std::normal_distribution<double> n;
  CMatrix a(8, 8);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) a(i, j) = {n(rng), n(rng)};
  const DensityMatrix rho = a * a.adjoint() / (a * a.adjoint()).trace();
  auto id = std::make_shared<const TwoQubitChannel>(TwoQubitChannel::identity());
  EXPECT_LE((apply_gate(rho, GateOp::from_channel(id, 2, 0), 3) - rho).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ApplyGate, ChannelOnSubsystemMatchesEmbeddedKraus) {
  std::mt19937 rng(23);
  std::normal_distribution<double> n;
  CMatrix a(8, 8);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) a(i, j) = {n(rng), n(rng)};
  const DensityMatrix rho = a * a.adjoint() / (a * a.adjoint()).trace();
  // Two Kraus operators: a partial CP and a loss branch.
  const CMatrix k0 = std::sqrt(0.8) * controlled_phase(1.1);
  CMatrix k1 = CMatrix::Zero(4, 4);
  k1(0, 3) = std::sqrt(0.2);
  TwoQubitChannel ch;
  ch.superop = kron(k0, k0.conjugate()) + kron(k1, k1.conjugate());
  const auto op = GateOp::from_channel(std::make_shared<const TwoQubitChannel>(ch), 2, 1);
  const CMatrix e0 = embed(k0, {2, 1}, 3), e1 = embed(k1, {2, 1}, 3);
  const CMatrix expected = e0 * rho * e0.adjoint() + e1 * rho * e1.adjoint();
  const DensityMatrix out = apply_gate(rho, op, 3);
  EXPECT_LE((out - expected).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LE(hermiticity_error(out), 1e-10);
  EXPECT_LE(out.trace().real(), rho.trace().real() + 1e-8);
}

TEST(ApplyGate, UnitaryOnDensityMatchesConjugation) {
  std::mt19937 rng(29);
  std::normal_distribution<double> n;
  CMatrix a(8, 8);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) a(i, j) = {n(rng), n(rng)};
  const DensityMatrix rho = a * a.adjoint() / (a * a.adjoint()).trace();
  const auto op = GateOp::single("rx", rx(0.7), 1, 0.7);
  const CMatrix u = embed(rx(0.7), {1}, 3);
  EXPECT_LE((apply_gate(rho, op, 3) - u * rho * u.adjoint()).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(ApplyGate, Errors) {
  auto id = std::make_shared<const TwoQubitChannel>(TwoQubitChannel::identity());
  StateVector psi = StateVector::Zero(4);
  psi(0) = 1.0;
  EXPECT_THROW(apply_gate(psi, GateOp::from_channel(id, 0, 1), 2), ConfigError);
  EXPECT_THROW(apply_gate(psi, GateOp::single("x", pauli::x(), 2), 2), ConfigError);
  EXPECT_THROW(GateOp::two("cz", cz(), 1, 1), ConfigError);
  EXPECT_THROW(GateOp::single("bad", cz(), 0), ConfigError);
  EXPECT_THROW(parse_scheme("three-cz"), ConfigError);
  EXPECT_EQ(parse_scheme(to_string(Scheme::two_cz)), Scheme::two_cz);
}

TEST(ScheduleJson, AuditFields) {
  auto ch = TwoQubitChannel::from_unitary(controlled_phase(0.4), 0.4, 1.0);
  ch.parameters["id"] = "abc";
  Schedule s = rzz_via_cp(0.2, 0, 1);
  s[0] = GateOp::from_channel(std::make_shared<const TwoQubitChannel>(ch), 0, 1);
  const auto j = schedule_to_json(s);
  ASSERT_EQ(j.size(), 3u);
  EXPECT_EQ(j[0]["kind"], "two-qubit-channel");
  EXPECT_EQ(j[0]["channel_id"], "abc");
  EXPECT_EQ(j[0]["targets"], nlohmann::json::array({0, 1}));
  EXPECT_EQ(j[1]["kind"], "single-qubit");
  EXPECT_DOUBLE_EQ(j[1]["angle"].get<double>(), 0.2);
}

}  // namespace
}  // namespace rydfalqon
