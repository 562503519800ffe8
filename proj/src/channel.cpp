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

#include "rydfalqon/channel.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace rydfalqon {

namespace {

Eigen::Matrix<Complex, 16, 1> vec(const CMatrix& m) {
  Eigen::Matrix<Complex, 16, 1> v;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) v(4 * i + j) = m(i, j);
  }
  return v;
}

CMatrix unvec(const Eigen::Matrix<Complex, 16, 1>& v) {
  CMatrix m(4, 4);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) m(i, j) = v(4 * i + j);
  }
  return m;
}

}  // namespace

CMatrix controlled_phase(double theta) {
  CMatrix u = CMatrix::Identity(4, 4);
  u(3, 3) = std::polar(1.0, -theta);
  return u;
}

Superoperator unitary_superoperator(const CMatrix& u) {
  if (u.rows() != 4 || u.cols() != 4) throw ConfigError("unitary_superoperator: expected 4x4");
  // Row-major vec: vec(A X B) = (A (x) B^T) vec(X).
  return kron(u, u.conjugate());
}

TwoQubitChannel TwoQubitChannel::identity() { return {}; }

TwoQubitChannel TwoQubitChannel::from_unitary(const CMatrix& u, double theta, double duration_us) {
  TwoQubitChannel ch;
  ch.superop = unitary_superoperator(u);
  ch.theta = theta;
  ch.duration_us = duration_us;
  ch.fidelity = 1.0;
  ch.parameters = {{"source", "unitary"}};
  return ch;
}

TwoQubitChannel TwoQubitChannel::depolarized(const CMatrix& u, double p, double theta,
                                             double duration_us) {
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("depolarizing probability must lie in [0, 1]");
  TwoQubitChannel ch;
  Superoperator dep = Superoperator::Zero();
  // rho -> tr(rho) I/4: output (k,k) collects every input diagonal (i,i).
  for (int k = 0; k < 4; ++k) {
    for (int i = 0; i < 4; ++i) dep(5 * k, 5 * i) = 0.25;
  }
  ch.superop = (1.0 - p) * unitary_superoperator(u) + p * dep;
  ch.theta = theta;
  ch.duration_us = duration_us;
  ch.parameters = {{"source", "depolarized-unitary"}, {"depolarizing_probability", p}};
  ch.fidelity = channel_state_fidelity(ch, theta);
  return ch;
}

CMatrix TwoQubitChannel::apply(const CMatrix& rho) const {
  if (rho.rows() != 4 || rho.cols() != 4) throw ConfigError("channel input must be 4x4");
  return unvec(superop * vec(rho));
}

CMatrix TwoQubitChannel::choi() const {
  CMatrix c(16, 16);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      for (int k = 0; k < 4; ++k) {
        for (int l = 0; l < 4; ++l) c(4 * i + k, 4 * j + l) = superop(4 * k + l, 4 * i + j);
      }
    }
  }
  return c;
}

double TwoQubitChannel::choi_min_eigenvalue() const {
  const CMatrix c = choi();
  const CMatrix h = 0.5 * (c + c.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

double TwoQubitChannel::max_trace_gain() const {
  // T(i, j) = tr E(|i><j|); trace non-increasing <=> T <= I.
  CMatrix t(4, 4);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      Complex s = 0.0;
      for (int k = 0; k < 4; ++k) s += superop(5 * k, 4 * i + j);
      t(i, j) = s;
    }
  }
  const CMatrix h = 0.5 * (t + t.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().maxCoeff();
}

CMatrix TwoQubitChannel::leading_kraus() const {
  const CMatrix c = choi();
  const CMatrix h = 0.5 * (c + c.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(h);
  const double lambda = std::max(solver.eigenvalues()(15), 0.0);
  const CVector v = solver.eigenvectors().col(15);
  CMatrix k(4, 4);
  for (int i = 0; i < 4; ++i) {
    for (int r = 0; r < 4; ++r) k(r, i) = std::sqrt(lambda) * v(4 * i + r);
  }
  return k;
}

void TwoQubitChannel::validate(double cp_tol, double tni_tol) const {
  if (!superop.allFinite()) throw NumericalError("channel superoperator contains non-finite values");
  const double min_eig = choi_min_eigenvalue();
  if (min_eig < -cp_tol) {
    throw NumericalError("channel is not completely positive (Choi eigenvalue " +
                         std::to_string(min_eig) + ")");
  }
  const double gain = max_trace_gain();
  if (gain > 1.0 + tni_tol) {
    throw NumericalError("channel increases trace (gain " + std::to_string(gain) + ")");
  }
}

double channel_state_fidelity(const TwoQubitChannel& ch, double theta) {
  CVector init = CVector::Constant(4, 0.5);
  CVector target = init;
  target(3) = 0.5 * std::polar(1.0, -theta);
  const CMatrix out = ch.apply(init * init.adjoint());
  return target.dot(out * target).real();
}

nlohmann::json to_json(const TwoQubitChannel& ch) {
  nlohmann::json rows = nlohmann::json::array();
  for (int r = 0; r < 16; ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (int c = 0; c < 16; ++c) row.push_back({ch.superop(r, c).real(), ch.superop(r, c).imag()});
    rows.push_back(std::move(row));
  }
  return {{"theta", ch.theta},
          {"duration_us", ch.duration_us},
          {"fidelity", ch.fidelity},
          {"superop", std::move(rows)},
          {"parameters", ch.parameters}};
}

TwoQubitChannel channel_from_json(const nlohmann::json& j) {
  try {
    TwoQubitChannel ch;
    ch.theta = j.at("theta").get<double>();
    ch.duration_us = j.at("duration_us").get<double>();
    ch.fidelity = j.at("fidelity").get<double>();
    ch.parameters = j.value("parameters", nlohmann::json::object());
    const auto& rows = j.at("superop");
    if (!rows.is_array() || rows.size() != 16) throw ConfigError("superop must have 16 rows");
    for (int r = 0; r < 16; ++r) {
      const auto& row = rows.at(static_cast<std::size_t>(r));
      if (!row.is_array() || row.size() != 16) throw ConfigError("superop rows must have 16 entries");
      for (int c = 0; c < 16; ++c) {
        const auto& z = row.at(static_cast<std::size_t>(c));
        if (!z.is_array() || z.size() != 2) throw ConfigError("superop entries must be [re, im]");
        ch.superop(r, c) = Complex(z[0].get<double>(), z[1].get<double>());
      }
    }
    return ch;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid channel JSON: ") + e.what());
  }
}

}  // namespace rydfalqon
