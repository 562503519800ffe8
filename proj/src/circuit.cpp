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

#include "rydfalqon/circuit.hpp"

#include <cmath>
#include <numbers>
#include <utility>

namespace rydfalqon {

namespace {

constexpr Complex kI(0.0, 1.0);

void check_targets(const GateOp& op, int n) {
  for (int t : op.targets) {
    if (t < 0 || t >= n) throw ConfigError("gate target out of range");
  }
  if (op.targets.size() == 2 && op.targets[0] == op.targets[1]) {
    throw ConfigError("two-qubit gate needs distinct targets");
  }
}

// Applies a 2x2 matrix to qubit q of every column of m (left multiplication).
void left_single(CMatrix& m, const CMatrix& u, int q, int n) {
  const Eigen::Index stride = Eigen::Index{1} << (n - 1 - q);
  const Eigen::Index dim = m.rows();
  const Complex u00 = u(0, 0), u01 = u(0, 1), u10 = u(1, 0), u11 = u(1, 1);
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    Complex* col = m.col(c).data();
    for (Eigen::Index base = 0; base < dim; base += 2 * stride) {
      for (Eigen::Index off = 0; off < stride; ++off) {
        const Eigen::Index i0 = base + off, i1 = i0 + stride;
        const Complex a = col[i0], b = col[i1];
        col[i0] = u00 * a + u01 * b;
        col[i1] = u10 * a + u11 * b;
      }
    }
  }
}

// Applies a 4x4 matrix to qubits (q0, q1) of every column of m.
void left_two(CMatrix& m, const CMatrix& u, int q0, int q1, int n) {
  const Eigen::Index s0 = Eigen::Index{1} << (n - 1 - q0);
  const Eigen::Index s1 = Eigen::Index{1} << (n - 1 - q1);
  const Eigen::Index dim = m.rows();
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    Complex* col = m.col(c).data();
    for (Eigen::Index i = 0; i < dim; ++i) {
      if ((i & s0) || (i & s1)) continue;
      const Eigen::Index idx[4] = {i, i | s1, i | s0, i | s0 | s1};
      Complex in[4];
      for (int k = 0; k < 4; ++k) in[k] = col[idx[k]];
      for (int r = 0; r < 4; ++r) {
        Complex acc = 0.0;
        for (int k = 0; k < 4; ++k) acc += u(r, k) * in[k];
        col[idx[r]] = acc;
      }
    }
  }
}

void left_apply(CMatrix& m, const GateOp& op, int n) {
  if (op.kind == GateKind::single_qubit) {
    left_single(m, op.matrix, op.targets[0], n);
  } else {
    left_two(m, op.matrix, op.targets[0], op.targets[1], n);
  }
}

void apply_channel(DensityMatrix& rho, const TwoQubitChannel& ch, int q0, int q1, int n) {
  const Eigen::Index s0 = Eigen::Index{1} << (n - 1 - q0);
  const Eigen::Index s1 = Eigen::Index{1} << (n - 1 - q1);
  const Eigen::Index dim = rho.rows();
  Eigen::Matrix<Complex, 16, 1> in, out;
  for (Eigen::Index r = 0; r < dim; ++r) {
    if ((r & s0) || (r & s1)) continue;
    const Eigen::Index ri[4] = {r, r | s1, r | s0, r | s0 | s1};
    for (Eigen::Index c = 0; c < dim; ++c) {
      if ((c & s0) || (c & s1)) continue;
      const Eigen::Index ci[4] = {c, c | s1, c | s0, c | s0 | s1};
      for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) in(4 * a + b) = rho(ri[a], ci[b]);
      }
      out.noalias() = ch.superop * in;
      for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) rho(ri[a], ci[b]) = out(4 * a + b);
      }
    }
  }
}

}  // namespace

GateOp GateOp::single(std::string label, CMatrix u, int q, double angle) {
  if (u.rows() != 2 || u.cols() != 2) throw ConfigError("single-qubit gate needs a 2x2 matrix");
  GateOp op;
  op.kind = GateKind::single_qubit;
  op.targets = {q};
  op.matrix = std::move(u);
  op.label = std::move(label);
  op.angle = angle;
  return op;
}

GateOp GateOp::two(std::string label, CMatrix u, int q0, int q1, double angle) {
  if (u.rows() != 4 || u.cols() != 4) throw ConfigError("two-qubit gate needs a 4x4 matrix");
  if (q0 == q1) throw ConfigError("two-qubit gate needs distinct targets");
  GateOp op;
  op.kind = GateKind::two_qubit;
  op.targets = {q0, q1};
  op.matrix = std::move(u);
  op.label = std::move(label);
  op.angle = angle;
  return op;
}

GateOp GateOp::from_channel(std::shared_ptr<const TwoQubitChannel> ch, int q0, int q1) {
  if (!ch) throw ConfigError("null channel");
  if (q0 == q1) throw ConfigError("two-qubit gate needs distinct targets");
  GateOp op;
  op.kind = GateKind::channel;
  op.targets = {q0, q1};
  op.angle = ch->theta;
  op.label = "channel";
  op.channel = std::move(ch);
  return op;
}

std::string to_string(Scheme s) {
  return s == Scheme::small_angle_cp ? "small-angle-cp" : "two-cz";
}

Scheme parse_scheme(const std::string& s) {
  if (s == "small-angle-cp") return Scheme::small_angle_cp;
  if (s == "two-cz") return Scheme::two_cz;
  throw ConfigError("unknown scheme: " + s);
}

CMatrix rz(double angle) {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 0) = std::polar(1.0, -angle / 2);
  m(1, 1) = std::polar(1.0, angle / 2);
  return m;
}

CMatrix rx(double angle) {
  CMatrix m(2, 2);
  const double c = std::cos(angle / 2), s = std::sin(angle / 2);
  m << c, -kI * s, -kI * s, c;
  return m;
}

CMatrix phase_gate(double phi) {
  CMatrix m = CMatrix::Identity(2, 2);
  m(1, 1) = std::polar(1.0, phi);
  return m;
}

CMatrix cz() { return controlled_phase(std::numbers::pi); }

Schedule rzz_via_cp(double a, int q0, int q1) {
  return {GateOp::two("cp", controlled_phase(2 * a), q0, q1, 2 * a),
          GateOp::single("p", phase_gate(a), q0, a),
          GateOp::single("p", phase_gate(a), q1, a)};
}

Schedule rzz_via_cz(double a, int q0, int q1) {
  const CMatrix h = pauli::hadamard();
  const double pi = std::numbers::pi;
  return {GateOp::single("h", h, q1),      GateOp::two("cz", cz(), q0, q1, pi),
          GateOp::single("h", h, q1),      GateOp::single("rz", rz(a), q1, a),
          GateOp::single("h", h, q1),      GateOp::two("cz", cz(), q0, q1, pi),
          GateOp::single("h", h, q1)};
}

Schedule phase_separation_schedule(const IsingHamiltonian& hp, double dt, Scheme scheme) {
  Schedule s;
  for (const auto& c : hp.couplings) {
    // exp(-i dt J ZZ) = R_zz(2 J dt).
    const double a = 2.0 * c.value * dt;
    auto part = scheme == Scheme::small_angle_cp ? rzz_via_cp(a, c.i, c.j) : rzz_via_cz(a, c.i, c.j);
    s.insert(s.end(), part.begin(), part.end());
  }
  for (int q = 0; q < hp.n; ++q) {
    const double h = hp.fields.size() > q ? hp.fields(q) : 0.0;
    if (h != 0.0) s.push_back(GateOp::single("rz", rz(2.0 * h * dt), q, 2.0 * h * dt));
  }
  return s;
}

Schedule mixer_schedule(int n, double beta, double dt) {
  // exp(i beta dt X / 2) = Rx(-beta dt).
  Schedule s;
  for (int q = 0; q < n; ++q) s.push_back(GateOp::single("rx", rx(-beta * dt), q, -beta * dt));
  return s;
}

CMatrix schedule_unitary(const Schedule& schedule, int n) {
  const auto dim = Eigen::Index{1} << n;
  CMatrix u = CMatrix::Identity(dim, dim);
  for (const auto& op : schedule) {
    if (op.kind == GateKind::channel) throw ConfigError("schedule_unitary: schedule contains a channel");
    check_targets(op, n);
    left_apply(u, op, n);
  }
  return u;
}

void apply_gate_inplace(StateVector& psi, const GateOp& op, int n) {
  if (psi.size() != (Eigen::Index{1} << n)) throw ConfigError("apply_gate: state dimension mismatch");
  check_targets(op, n);
  if (op.kind == GateKind::channel) throw ConfigError("apply_gate: channels need a density matrix");
  CMatrix view = psi;  // one column
  left_apply(view, op, n);
  psi = view.col(0);
}

void apply_gate_inplace(DensityMatrix& rho, const GateOp& op, int n) {
  if (rho.rows() != (Eigen::Index{1} << n) || rho.cols() != rho.rows()) {
    throw ConfigError("apply_gate: density matrix dimension mismatch");
  }
  check_targets(op, n);
  if (op.kind == GateKind::channel) {
    apply_channel(rho, *op.channel, op.targets[0], op.targets[1], n);
    return;
  }
  // U rho U^dagger = (U (U rho)^dagger)^dagger.
  left_apply(rho, op, n);
  CMatrix tmp = rho.adjoint();
  left_apply(tmp, op, n);
  rho = tmp.adjoint();
}

StateVector apply_gate(StateVector psi, const GateOp& op, int n) {
  apply_gate_inplace(psi, op, n);
  return psi;
}

DensityMatrix apply_gate(DensityMatrix rho, const GateOp& op, int n) {
  apply_gate_inplace(rho, op, n);
  return rho;
}

int entangling_gate_count(const Schedule& schedule) {
  int count = 0;
  for (const auto& op : schedule) count += op.entangling() ? 1 : 0;
  return count;
}

double total_entangling_time(const Schedule& schedule, const EntanglingDurations& d) {
  double t = 0.0;
  for (const auto& op : schedule) {
    if (op.kind == GateKind::channel) {
      t += op.channel->duration_us;
    } else if (op.kind == GateKind::two_qubit) {
      t += op.label == "cz" ? d.cz_us : d.cp_us;
    }
  }
  return t;
}

CMatrix align_global_phase(const CMatrix& u, const CMatrix& reference) {
  if (u.rows() != reference.rows() || u.cols() != reference.cols()) {
    throw ConfigError("align_global_phase: shape mismatch");
  }
  // Best phase in the least-squares sense: arg tr(reference^dagger u).
  const Complex overlap = (reference.adjoint() * u).trace();
  if (std::abs(overlap) == 0.0) return u;
  return u * std::conj(overlap / std::abs(overlap));
}

nlohmann::json schedule_to_json(const Schedule& schedule) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& op : schedule) {
    nlohmann::json j;
    switch (op.kind) {
      case GateKind::single_qubit: j["kind"] = "single-qubit"; break;
      case GateKind::two_qubit: j["kind"] = "two-qubit"; break;
      case GateKind::channel: j["kind"] = "two-qubit-channel"; break;
    }
    j["label"] = op.label;
    j["targets"] = op.targets;
    j["angle"] = op.angle;
    if (op.kind == GateKind::channel) {
      j["channel_id"] = op.channel->parameters.value("id", std::string("anonymous"));
    }
    out.push_back(std::move(j));
  }
  return out;
}

}  // namespace rydfalqon
