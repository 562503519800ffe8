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

#include "rydfalqon/falqon.hpp"
#include "rydfalqon/ode.hpp"

namespace rydfalqon {
namespace {

const std::vector<std::string> kNamedGraphs = {"edge", "path3", "type-1", "type-2", "type-3"};

CMatrix expm_hermitian(const CMatrix& h, double t) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  const CVector ph = (Complex(0, -t) * es.eigenvalues().cast<Complex>()).array().exp();
  return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

struct OracleLayer {
  double beta, energy, feedback;
  Eigen::Vector4d dist;
};

// Single-edge FALQON from dense 4x4 exponentials, sharing nothing with the library backend.
std::vector<OracleLayer> single_edge_oracle(double dt, double k, int layers) {
  const CMatrix x = pauli::x(), z = pauli::z(), id = pauli::identity();
  const CMatrix hp = 0.5 * (kron(z, z) - kron(id, id));
  const CMatrix hd = -0.5 * (kron(x, id) + kron(id, x));
  const CMatrix a = Complex(0, 1) * (hd * hp - hp * hd);
  const CMatrix up = expm_hermitian(hp, dt);
  CVector psi = CVector::Constant(4, 0.5);
  double beta = 0.0;
  std::vector<OracleLayer> out;
  for (int j = 0; j < layers; ++j) {
    psi = expm_hermitian(hd, beta * dt) * (up * psi);
    OracleLayer l;
    l.beta = beta;
    l.energy = psi.dot(hp * psi).real();
    l.feedback = psi.dot(a * psi).real();
    l.dist = psi.cwiseAbs2();
    out.push_back(l);
    beta = -k * l.feedback;
  }
  return out;
}

void expect_traces_equal(const FalqonTrace& a, const FalqonTrace& b, double tol) {
  ASSERT_EQ(a.layers.size(), b.layers.size());
  for (std::size_t j = 0; j < a.layers.size(); ++j) {
    const auto &x = a.layers[j], &y = b.layers[j];
    EXPECT_NEAR(x.beta, y.beta, tol) << j;
    EXPECT_NEAR(x.energy, y.energy, tol) << j;
    EXPECT_NEAR(x.ratio, y.ratio, tol) << j;
    EXPECT_NEAR(x.success, y.success, tol) << j;
    EXPECT_NEAR(x.trace, y.trace, tol) << j;
    EXPECT_NEAR(x.feedback, y.feedback, tol) << j;
    EXPECT_LE((x.distribution - y.distribution).cwiseAbs().maxCoeff(), tol) << j;
  }
}

int layers_to_reach(const FalqonTrace& t, double ratio) {
  for (const auto& l : t.layers)
    if (l.ratio >= ratio) return l.layer;
  return std::numeric_limits<int>::max();
}

TEST(Params, Validation) {
  EXPECT_THROW((FalqonParams{0.0, 2, 10, 0}.validate()), ConfigError);
  EXPECT_THROW((FalqonParams{0.2, -1, 10, 0}.validate()), ConfigError);
  EXPECT_THROW((FalqonParams{0.2, 2, 0, 0}.validate()), ConfigError);
  EXPECT_THROW((FalqonParams{0.2, 2, 10, NAN}.validate()), ConfigError);
}

TEST(RunIdeal, MatchesDenseSingleEdgeOracle) {
  const auto trace = run_ideal(maxcut_hamiltonian(graph_preset("edge")), {0.2, 2.0, 20, 0.0});
  const auto oracle = single_edge_oracle(0.2, 2.0, 20);
  ASSERT_EQ(trace.layers.size(), 20u);
  for (std::size_t j = 0; j < 20; ++j) {
    const auto& l = trace.layers[j];
    EXPECT_NEAR(l.beta, oracle[j].beta, 1e-12) << j;
    EXPECT_NEAR(l.energy, oracle[j].energy, 1e-12) << j;
    EXPECT_NEAR(l.feedback, oracle[j].feedback, 1e-12) << j;
    EXPECT_NEAR(l.ratio, -oracle[j].energy, 1e-12) << j;
    EXPECT_NEAR(l.success, oracle[j].dist(1) + oracle[j].dist(2), 1e-12) << j;
    EXPECT_LE((l.distribution - oracle[j].dist).cwiseAbs().maxCoeff(), 1e-12) << j;
  }
}

TEST(RunIdeal, FirstBetaIsZeroOnEveryInstance) {
  for (const auto& g : kNamedGraphs) {
    const auto hp = maxcut_hamiltonian(graph_preset(g));
    const StateVector plus = StateVector::Constant(1 << hp.n, std::pow(2.0, -hp.n / 2.0));
    EXPECT_NEAR(feedback_signal(plus, diagonal(hp)), 0.0, 1e-15) << g;
    EXPECT_EQ(run_ideal(hp, {0.2, 2.0, 3, 0.0}).layers[0].beta, 0.0) << g;
  }
}

TEST(RunIdeal, MonotoneOnNamedInstances) {
  for (const auto& g : kNamedGraphs) {
    const auto hp = maxcut_hamiltonian(graph_preset(g));
    const int layers = hp.n == 2 ? 20 : hp.n == 3 ? 30 : 40;
    const auto t = run_ideal(hp, {0.2, 2.0, layers, 0.0});
    double prev_energy = 0.0, prev_ratio = 0.0;
    for (const auto& l : t.layers) {
      EXPECT_LE(l.energy, prev_energy + 1e-9) << g << " layer " << l.layer;
      EXPECT_GE(l.ratio, prev_ratio - 1e-9) << g << " layer " << l.layer;
      EXPECT_GT(l.ratio, 0.0);
      EXPECT_LE(l.ratio, 1.0 + 1e-12);
      EXPECT_NEAR(l.trace, 1.0, 1e-12);
      prev_energy = l.energy;
      prev_ratio = l.ratio;
    }
  }
}

TEST(RunIdeal, FeedbackSignLaw) {
  const auto t = run_ideal(maxcut_hamiltonian(graph_preset("type-2")), {0.2, 2.0, 40, 0.0});
  for (std::size_t j = 1; j < t.layers.size(); ++j) {
    EXPECT_LE(t.layers[j].beta * t.layers[j - 1].feedback, 0.0);
    EXPECT_NEAR(t.layers[j].beta, -2.0 * t.layers[j - 1].feedback, 1e-15);
  }
}

TEST(RunIdeal, FeedbackSignalMatchesDenseObservable) {
  const auto hp = maxcut_hamiltonian(graph_preset("type-1"));
  const CMatrix a = feedback_observable(hp);
  StateVector psi = StateVector::Constant(16, 0.25);
  for (int q = 0; q < 16; ++q) psi(q) *= std::polar(1.0 + 0.1 * q, 0.3 * q * q);
  EXPECT_NEAR(feedback_signal(psi, diagonal(hp)), expectation(psi, a), 1e-12);
}

TEST(RunIdeal, SymmetricGraphConvergesFaster) {
  const FalqonParams p{0.2, 2.0, 60, 0.0};
  const auto cycle = run_ideal(maxcut_hamiltonian(graph_preset("type-3")), p);
  const auto path = run_ideal(maxcut_hamiltonian(graph_preset("type-1")), p);
  EXPECT_LT(layers_to_reach(cycle, 0.9), layers_to_reach(path, 0.9));
}

TEST(RunIdeal, LargerStepConvergesInFewerLayers) {
  const auto hp = maxcut_hamiltonian(graph_preset("path3"));
  const auto fine = run_ideal(hp, {0.1, 2.0, 80, 0.0});
  const auto coarse = run_ideal(hp, {0.2, 2.0, 80, 0.0});
  EXPECT_LT(layers_to_reach(coarse, 0.9), layers_to_reach(fine, 0.9));
}

TEST(RunIdeal, ZeroGroundEnergyFlagsRatio) {
  IsingHamiltonian hp(2);
  hp.fields(0) = 0.0;
  const auto t = run_ideal(hp, {0.2, 2.0, 2, 0.0});
  EXPECT_FALSE(t.ratio_defined);
  EXPECT_TRUE(std::isnan(t.layers[0].ratio));
  EXPECT_NE(trace_to_csv(t).find(",,"), std::string::npos);
  EXPECT_TRUE(to_json(t)["layers"][0]["r_A"].is_null());
}

TEST(RunNoisy, UnitaryChannelsReproduceIdeal) {
  for (const char* g : {"edge", "path3", "type-2"}) {
    const auto hp = maxcut_hamiltonian(graph_preset(g));
    const FalqonParams p{0.2, 2.0, 15, 0.0};
    const auto ideal = run_ideal(hp, p);
    for (auto scheme : {Scheme::small_angle_cp, Scheme::two_cz}) {
      const auto noisy = run_noisy(hp, p, scheme, ChannelSet::ideal(hp, p.dt, scheme));
      expect_traces_equal(noisy, ideal, 1e-8);
    }
  }
}

TEST(RunNoisy, FullyDepolarizingGivesUniformDistribution) {
  const auto hp = maxcut_hamiltonian(graph_preset("path3"));
  const FalqonParams p{0.2, 2.0, 5, 0.0};
  ChannelSet set;
  set.add(TwoQubitChannel::depolarized(controlled_phase(0.4), 1.0, 0.4, 1.0));
  const auto t = run_noisy(hp, p, Scheme::small_angle_cp, set);
  const RVector d = diagonal(hp);
  const double mean = d.mean();
  for (const auto& l : t.layers) {
    EXPECT_LE((l.distribution.array() - 1.0 / 8).abs().maxCoeff(), 1e-14);
    EXPECT_NEAR(l.energy, mean, 1e-14);
    EXPECT_NEAR(l.ratio, mean / -2.0, 1e-14);
    EXPECT_NEAR(l.success, 0.25, 1e-14);
  }
}

TEST(RunNoisy, LossyChannelSubNormalizesTrace) {
  const auto hp = maxcut_hamiltonian(graph_preset("edge"));
  const FalqonParams p{0.2, 2.0, 10, 0.0};
  TwoQubitChannel lossy = TwoQubitChannel::from_unitary(controlled_phase(0.4), 0.4, 1.0);
  lossy.superop *= 0.95;
  ChannelSet set;
  set.add(lossy);
  const auto t = run_noisy(hp, p, Scheme::small_angle_cp, set);
  const auto ideal = run_ideal(hp, p);
  for (std::size_t j = 0; j < t.layers.size(); ++j) {
    const auto& l = t.layers[j];
    EXPECT_NEAR(l.trace, std::pow(0.95, static_cast<double>(j + 1)), 1e-12);
    EXPECT_LE(l.success, l.distribution.sum() + 1e-15);
    // Uniform loss leaves normalized quantities unchanged; raw phi shrinks with the trace.
    EXPECT_NEAR(l.energy, ideal.layers[j].energy, 1e-12);
    EXPECT_NEAR(l.success, ideal.layers[j].success * l.trace, 1e-12);
  }
}

TEST(RunNoisy, Errors) {
  const auto hp = maxcut_hamiltonian(graph_preset("edge"));
  EXPECT_THROW(run_noisy(hp, {0.2, 2.0, 5, 0.0}, Scheme::small_angle_cp, ChannelSet{}), ConfigError);
  ChannelSet wrong;
  wrong.add(TwoQubitChannel::from_unitary(controlled_phase(0.8), 0.8, 1.0));
  EXPECT_THROW(run_noisy(hp, {0.2, 2.0, 5, 0.0}, Scheme::small_angle_cp, wrong), ConfigError);
  EXPECT_THROW(run_noisy(IsingHamiltonian(7), {0.2, 2.0, 5, 0.0}, Scheme::small_angle_cp, wrong), ConfigError);
  TwoQubitChannel dead;
  dead.superop.setZero();
  dead.theta = 0.4;
  ChannelSet zero;
  zero.add(dead);
  EXPECT_THROW(run_noisy(hp, {0.2, 2.0, 5, 0.0}, Scheme::small_angle_cp, zero), NumericalError);
}

TEST(ChannelSetTest, LookupAndReplace) {
  ChannelSet s;
  s.add(TwoQubitChannel::from_unitary(controlled_phase(0.4), 0.4, 1.0));
  auto again = TwoQubitChannel::from_unitary(controlled_phase(0.4), 0.4 + 1e-12, 3.0);
  s.add(again);
  EXPECT_EQ(s.size(), 1u);
  EXPECT_EQ(s.find(0.4)->duration_us, 3.0);
  EXPECT_EQ(s.find(0.41), nullptr);
  const auto cz_set = ChannelSet::ideal(maxcut_hamiltonian(graph_preset("path3")), 0.2, Scheme::two_cz);
  ASSERT_EQ(cz_set.size(), 1u);
  EXPECT_EQ(cz_set.find(std::numbers::pi)->duration_us, 2.0);
}

TEST(LayerSchedule, BindsChannelsAndAppendsMixer) {
  const auto hp = maxcut_hamiltonian(graph_preset("path3"));
  const auto s = layer_schedule(hp, {0.2, 2.0, 1, 0.0}, Scheme::small_angle_cp, 0.5);
  EXPECT_EQ(entangling_gate_count(s), 2);
  EXPECT_EQ(s.back().label, "rx");
  EXPECT_NEAR(s.back().angle, -0.1, 1e-15);
}

TEST(Oracle, StartsAtZeroBetaAndDescends) {
  const auto traj = oracle_continuous(maxcut_hamiltonian(graph_preset("path3")), 2.0, 6.0, 0.05);
  ASSERT_EQ(traj.time.size(), 121u);
  EXPECT_NEAR(traj.beta[0], 0.0, 1e-15);
  EXPECT_NEAR(traj.energy[0], -1.0, 1e-15);
  for (std::size_t i = 1; i < traj.energy.size(); ++i) EXPECT_LE(traj.energy[i], traj.energy[i - 1] + 1e-10);
  EXPECT_LT(traj.energy.back(), -1.5);
}

TEST(Oracle, AgreesWithFixedStepIntegration) {
  const auto hp = maxcut_hamiltonian(graph_preset("edge"));
  const auto traj = oracle_continuous(hp, 2.0, 3.0, 3.0);
  // Same ODE with a plain RK4 and its own dense operators.
  const CMatrix h_p = to_matrix(hp), h_d = driver_hamiltonian(2), a = feedback_observable(hp);
  CVector psi = CVector::Constant(4, 0.5);
  ode::rk4(psi, 0.0, 3.0, 30000, [&](double, const CVector& y, CVector& dy) {
    const double beta = -2.0 * expectation(StateVector(y), a);
    dy = Complex(0, -1) * (h_p * y + beta * (h_d * y));
  });
  EXPECT_NEAR(traj.energy.back(), expectation(StateVector(psi), h_p), 1e-9);
}

TEST(Oracle, TrotterizedRunApproachesOracle) {
  // Layer l of run_ideal sits at t = l * dt on the continuous trajectory.
  const auto hp = maxcut_hamiltonian(graph_preset("path3"));
  const auto traj = oracle_continuous(hp, 2.0, 6.0, 0.05);
  double prev = std::numeric_limits<double>::infinity();
  for (double dt : {0.2, 0.1, 0.05}) {
    const int layers = static_cast<int>(std::lround(6.0 / dt));
    const auto t = run_ideal(hp, {dt, 2.0, layers, 0.0});
    const double err = std::abs(t.layers.back().energy - traj.energy.back());
    EXPECT_LT(err, prev) << dt;
    prev = err;
  }
  EXPECT_LT(prev, 0.01);
}

TEST(Success, Examples) {
  EXPECT_DOUBLE_EQ(success_probability(Eigen::Vector4d(0, 1, 0, 0), {1, 2}), 1.0);
  EXPECT_DOUBLE_EQ(success_probability(Eigen::Vector4d::Constant(0.25), {1, 2}), 0.5);
  EXPECT_DOUBLE_EQ(success_probability(Eigen::Vector4d::Constant(0.225), {1, 2}), 0.45);
  EXPECT_THROW(success_probability(Eigen::Vector4d::Constant(0.25), {4}), ConfigError);
}

TEST(Serialization, CsvAndJson) {
  const auto t = run_ideal(maxcut_hamiltonian(graph_preset("edge")), {0.2, 2.0, 3, 0.0});
  const std::string csv = trace_to_csv(t);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "layer,beta,energy,r_A,phi,trace");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
  const auto j = to_json(t);
  EXPECT_EQ(j["ground_states"], nlohmann::json::array({"01", "10"}));
  EXPECT_EQ(j["layers"].size(), 3u);
  EXPECT_EQ(j["layers"][2]["distribution"].size(), 4u);
  EXPECT_DOUBLE_EQ(j["layers"][1]["beta"].get<double>(), t.layers[1].beta);
  EXPECT_EQ(j["peak_phi_layer"], t.peak_success_layer());
}

}  // namespace
}  // namespace rydfalqon
