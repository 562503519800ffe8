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

#include "rydfalqon/falqon.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "rydfalqon/ode.hpp"

namespace rydfalqon {

namespace {

constexpr Complex kI(0.0, 1.0);

// H_d psi with H_d = -1/2 sum X_i.
StateVector apply_driver(const StateVector& psi, int n) {
  StateVector out = StateVector::Zero(psi.size());
  for (int q = 0; q < n; ++q) {
    const Eigen::Index bit = Eigen::Index{1} << (n - 1 - q);
    for (Eigen::Index i = 0; i < psi.size(); ++i) out(i) -= 0.5 * psi(i ^ bit);
  }
  return out;
}

// exp(-i beta dt H_d) = prod_q (cos(beta dt/2) + i sin(beta dt/2) X_q).
void apply_mixer(StateVector& psi, int n, double angle) {
  const double c = std::cos(angle / 2), s = std::sin(angle / 2);
  for (int q = 0; q < n; ++q) {
    const Eigen::Index bit = Eigen::Index{1} << (n - 1 - q);
    for (Eigen::Index i = 0; i < psi.size(); ++i) {
      if (i & bit) continue;
      const Complex a = psi(i), b = psi(i | bit);
      psi(i) = c * a + kI * s * b;
      psi(i | bit) = kI * s * a + c * b;
    }
  }
}

FalqonTrace make_trace(const IsingHamiltonian& hp) {
  FalqonTrace t;
  t.n = hp.n;
  const GroundSet g = ground_set(hp);
  t.ground_energy = g.energy;
  t.ground_states = g.states;
  t.ratio_defined = g.energy != 0.0;
  return t;
}

double ratio(const FalqonTrace& t, double energy) {
  return t.ratio_defined ? energy / t.ground_energy : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

void FalqonParams::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt must be positive and finite");
  if (!(k > 0.0) || !std::isfinite(k)) throw ConfigError("k must be positive and finite");
  if (layers < 1) throw ConfigError("layer count must be positive");
  if (!std::isfinite(beta1)) throw ConfigError("beta1 must be finite");
}

int FalqonTrace::peak_success_layer() const {
  int best = 0;
  double value = -1.0;
  for (const auto& l : layers) {
    if (l.success > value) {
      value = l.success;
      best = l.layer;
    }
  }
  return best;
}

double feedback_signal(const StateVector& psi, const RVector& hp_diagonal) {
  const int n = qubit_count(psi.size());
  // <i[H_d, H_p]> = i(<H_d psi|H_p psi> - c.c.) = -2 Im <H_d psi|H_p psi>.
  const StateVector hd = apply_driver(psi, n);
  const StateVector hpsi = hp_diagonal.cast<Complex>().cwiseProduct(psi);
  return -2.0 * hd.dot(hpsi).imag() / psi.squaredNorm();
}

FalqonTrace run_ideal(const IsingHamiltonian& hp, const FalqonParams& p) {
  p.validate();
  if (hp.n > 14) throw ConfigError("run_ideal: statevector limited to n <= 14");
  FalqonTrace trace = make_trace(hp);
  const RVector diag = diagonal(hp);
  const CVector phases = (-kI * p.dt * diag.cast<Complex>()).array().exp();

  StateVector psi = StateVector::Constant(diag.size(), 1.0 / std::sqrt(static_cast<double>(diag.size())));
  double beta = p.beta1;
  for (int j = 1; j <= p.layers; ++j) {
    psi = psi.cwiseProduct(phases);
    apply_mixer(psi, hp.n, beta * p.dt);

    LayerRecord rec;
    rec.layer = j;
    rec.beta = beta;
    rec.distribution = psi.cwiseAbs2();
    rec.trace = rec.distribution.sum();
    rec.energy = rec.distribution.dot(diag) / rec.trace;
    rec.ratio = ratio(trace, rec.energy);
    rec.success = success_probability(rec.distribution, trace.ground_states);
    rec.feedback = feedback_signal(psi, diag);
    beta = -p.k * rec.feedback;
    trace.layers.push_back(std::move(rec));
  }
  return trace;
}

void ChannelSet::add(std::shared_ptr<const TwoQubitChannel> ch) {
  if (!ch) throw ConfigError("null channel");
  for (auto& existing : channels_) {
    if (std::abs(existing->theta - ch->theta) <= 1e-9) {
      existing = std::move(ch);
      return;
    }
  }
  channels_.push_back(std::move(ch));
}

std::shared_ptr<const TwoQubitChannel> ChannelSet::find(double theta) const {
  for (const auto& ch : channels_) {
    if (std::abs(ch->theta - theta) <= 1e-9) return ch;
  }
  return nullptr;
}

ChannelSet ChannelSet::ideal(const IsingHamiltonian& hp, double dt, Scheme scheme,
                             const EntanglingDurations& d) {
  ChannelSet set;
  for (const auto& op : phase_separation_schedule(hp, dt, scheme)) {
    if (op.kind != GateKind::two_qubit || set.find(op.angle)) continue;
    set.add(TwoQubitChannel::from_unitary(op.matrix, op.angle, op.label == "cz" ? d.cz_us : d.cp_us));
  }
  return set;
}

Schedule bind_channels(const Schedule& schedule, const ChannelSet& channels) {
  Schedule out;
  out.reserve(schedule.size());
  for (const auto& op : schedule) {
    if (op.kind != GateKind::two_qubit) {
      out.push_back(op);
      continue;
    }
    auto ch = channels.find(op.angle);
    if (!ch) throw ConfigError("no channel for entangling angle " + std::to_string(op.angle) + " rad");
    out.push_back(GateOp::from_channel(std::move(ch), op.targets[0], op.targets[1]));
  }
  return out;
}

Schedule layer_schedule(const IsingHamiltonian& hp, const FalqonParams& p, Scheme scheme, double beta) {
  Schedule s = phase_separation_schedule(hp, p.dt, scheme);
  const Schedule mix = mixer_schedule(hp.n, beta, p.dt);
  s.insert(s.end(), mix.begin(), mix.end());
  return s;
}

FalqonTrace run_noisy(const IsingHamiltonian& hp, const FalqonParams& p, Scheme scheme,
                      const ChannelSet& channels) {
  p.validate();
  if (hp.n > 6) throw ConfigError("run_noisy: density matrix limited to n <= 6");
  FalqonTrace trace = make_trace(hp);
  const RVector diag = diagonal(hp);
  const CMatrix observable = feedback_observable(hp);
  const Schedule phase = bind_channels(phase_separation_schedule(hp, p.dt, scheme), channels);

  const auto dim = diag.size();
  DensityMatrix rho = DensityMatrix::Constant(dim, dim, 1.0 / static_cast<double>(dim));
  double beta = p.beta1;
  for (int j = 1; j <= p.layers; ++j) {
    for (const auto& op : phase) apply_gate_inplace(rho, op, hp.n);
    for (const auto& op : mixer_schedule(hp.n, beta, p.dt)) apply_gate_inplace(rho, op, hp.n);

    LayerRecord rec;
    rec.layer = j;
    rec.beta = beta;
    rec.distribution = rho.diagonal().real();
    rec.trace = rec.distribution.sum();
    if (!(rec.trace > 0.0)) throw NumericalError("run_noisy: all population lost");
    rec.energy = rec.distribution.dot(diag) / rec.trace;
    rec.ratio = ratio(trace, rec.energy);
    rec.success = success_probability(rec.distribution, trace.ground_states);
    rec.feedback = expectation(rho, observable);
    beta = -p.k * rec.feedback;
    trace.layers.push_back(std::move(rec));
  }
  return trace;
}

ContinuousTrajectory oracle_continuous(const IsingHamiltonian& hp, double k, double t_final,
                                       double dt_sample, double rtol) {
  if (!(k > 0.0)) throw ConfigError("oracle: k must be positive");
  if (!(t_final >= 0.0) || !(dt_sample > 0.0)) throw ConfigError("oracle: bad time grid");
  if (hp.n > 12) throw ConfigError("oracle: limited to n <= 12");
  const RVector diag = diagonal(hp);
  const CVector hp_diag = diag.cast<Complex>();
  auto rhs = [&](double, const StateVector& y, StateVector& dy) {
    const double beta = -k * feedback_signal(y, diag);
    dy = -kI * (hp_diag.cwiseProduct(y) + beta * apply_driver(y, hp.n));
  };

  ContinuousTrajectory traj;
  StateVector psi = StateVector::Constant(diag.size(), 1.0 / std::sqrt(static_cast<double>(diag.size())));
  auto record = [&](double t) {
    traj.time.push_back(t);
    traj.energy.push_back(psi.cwiseAbs2().dot(diag) / psi.squaredNorm());
    traj.beta.push_back(-k * feedback_signal(psi, diag));
  };
  record(0.0);
  const auto samples = static_cast<std::int64_t>(std::llround(std::ceil(t_final / dt_sample - 1e-9)));
  ode::AdaptiveOptions opt;
  opt.rtol = rtol;
  opt.atol = rtol * 1e-2;
  opt.initial_step = std::min(dt_sample, 1e-3);
  double t = 0.0;
  for (std::int64_t s = 1; s <= samples; ++s) {
    const double next = std::min(t_final, static_cast<double>(s) * dt_sample);
    ode::dopri5(psi, t, next, rhs, opt);
    t = next;
    record(t);
  }
  return traj;
}

double success_probability(const RVector& distribution, const std::vector<std::uint64_t>& ground) {
  double s = 0.0;
  for (auto idx : ground) {
    if (idx >= static_cast<std::uint64_t>(distribution.size())) {
      throw ConfigError("ground state index outside the distribution");
    }
    s += distribution(static_cast<Eigen::Index>(idx));
  }
  return s;
}

std::string trace_to_csv(const FalqonTrace& t) {
  std::ostringstream out;
  out.precision(17);
  out << "layer,beta,energy,r_A,phi,trace\n";
  for (const auto& l : t.layers) {
    out << l.layer << ',' << l.beta << ',' << l.energy << ',';
    if (std::isfinite(l.ratio)) out << l.ratio;
    out << ',' << l.success << ',' << l.trace << '\n';
  }
  return out.str();
}

nlohmann::json to_json(const FalqonTrace& t) {
  nlohmann::json ground = nlohmann::json::array();
  for (auto g : t.ground_states) ground.push_back(bitstring(g, t.n));
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& l : t.layers) {
    std::vector<double> dist(l.distribution.data(), l.distribution.data() + l.distribution.size());
    layers.push_back({{"layer", l.layer},
                      {"beta", l.beta},
                      {"energy", l.energy},
                      {"r_A", std::isfinite(l.ratio) ? nlohmann::json(l.ratio) : nlohmann::json(nullptr)},
                      {"phi", l.success},
                      {"trace", l.trace},
                      {"feedback", l.feedback},
                      {"distribution", dist}});
  }
  return {{"n", t.n},
          {"ground_energy", t.ground_energy},
          {"ground_states", ground},
          {"ratio_defined", t.ratio_defined},
          {"peak_phi_layer", t.peak_success_layer()},
          {"layers", layers}};
}

}  // namespace rydfalqon
