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

#include "rydfalqon/atomgate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <thread>

namespace rydfalqon {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr Level kLevels[5] = {Level::g0, Level::g1, Level::d, Level::p, Level::r};

double angular_mhz(double mhz) { return kTwoPi * mhz; }
double angular_khz(double khz) { return kTwoPi * khz * 1e-3; }

double gamma_p(const AtomModel& m) { return m.spontaneous_emission ? 1.0 / m.tau_p_us : 0.0; }
double gamma_r(const AtomModel& m) { return m.spontaneous_emission ? 1.0 / m.tau_r_us : 0.0; }
// Dephasing rates are given in kHz (= 1/ms).
double gamma1(const AtomModel& m) { return m.gamma1_dp_khz * 1e-3; }
double gamma2(const AtomModel& m) { return m.gamma2_dp_khz * 1e-3; }

struct Decay {
  Level from;
  Level to;
  double rate;
};

std::vector<Decay> decays(const AtomModel& m) {
  const double gp = gamma_p(m), gr = gamma_r(m);
  return {{Level::p, Level::g0, m.b0p * gp}, {Level::p, Level::g1, m.b1p * gp},
          {Level::p, Level::d, m.bdp * gp},  {Level::r, Level::g0, m.b0r * gr},
          {Level::r, Level::g1, m.b1r * gr}, {Level::r, Level::d, m.bdr * gr},
          {Level::r, Level::p, m.bpr * gr}};
}

// Single-atom energy in rad/us (without the interaction).
double level_energy(const AtomModel& m, Level l) {
  switch (l) {
    case Level::g1: return -angular_khz(m.delta2ph_khz);
    case Level::p: return -angular_mhz(m.delta1ph_mhz);
    default: return 0.0;
  }
}

// Diagonal entries of the dephasing operators |p><p| - |1><1| and |r><r| - |p><p|.
double dephase1(Level l) { return l == Level::p ? 1.0 : (l == Level::g1 ? -1.0 : 0.0); }
double dephase2(Level l) { return l == Level::r ? 1.0 : (l == Level::p ? -1.0 : 0.0); }

CMatrix single_atom_op(Level to, Level from) {
  CMatrix m = CMatrix::Zero(5, 5);
  m(static_cast<int>(to), static_cast<int>(from)) = 1.0;
  return m;
}

std::int64_t rk4_steps(double duration, double step) {
  if (!(step > 0.0)) throw ConfigError("integrator step must be positive");
  return std::max<std::int64_t>(1, std::llround(std::ceil(duration / step - 1e-9)));
}

}  // namespace

void AtomModel::validate() const {
  const double vals[] = {omega2_mhz, delta1ph_mhz, delta2ph_khz, urr_mhz, tau_p_us, tau_r_us,
                         gamma1_dp_khz, gamma2_dp_khz};
  for (double v : vals) {
    if (!std::isfinite(v)) throw ConfigError("atom model parameters must be finite");
  }
  if (!(tau_p_us > 0.0) || !(tau_r_us > 0.0)) throw ConfigError("lifetimes must be positive");
  const double branch[] = {b0p, b1p, bdp, b0r, b1r, bdr, bpr};
  for (double b : branch) {
    if (!(b >= 0.0)) throw ConfigError("branching ratios must be non-negative");
  }
  if (std::abs(b0p + b1p + bdp - 1.0) > 1e-12) throw ConfigError("|p> branching ratios must sum to 1");
  if (std::abs(b0r + b1r + bdr + bpr - 1.0) > 1e-12) {
    throw ConfigError("|r> branching ratios must sum to 1");
  }
  if (gamma1_dp_khz < 0.0 || gamma2_dp_khz < 0.0) throw ConfigError("dephasing rates must be >= 0");
  if (omega2_mhz < 0.0) throw ConfigError("omega2 must be non-negative");
  if (platform_constrained && omega2_mhz > 50.0) {
    throw ConfigError("omega2 exceeds the 50 MHz platform limit");
  }
}

void PulseParams::validate() const {
  if (!(omega0_mhz > 0.0) || !std::isfinite(omega0_mhz)) throw ConfigError("omega0 must be positive");
  if (!(t_quarter_us > 0.0) || !std::isfinite(t_quarter_us)) {
    throw ConfigError("t_quarter must be positive");
  }
  if (!std::isfinite(d_omega1) || !std::isfinite(d_omega2)) {
    throw ConfigError("intensity offsets must be finite");
  }
}

void GateSpec::validate() const {
  if (!(theta > 0.0 && theta <= std::numbers::pi)) throw ConfigError("theta must lie in (0, pi]");
  if (!(duration_us > 0.0)) throw ConfigError("gate duration must be positive");
}

double pulse_rabi(const PulseParams& pulse, double t_us) {
  const double T = pulse.t_quarter_us;
  const double x = (t_us - 2.0 * T) / T;
  return (1.0 + pulse.d_omega1) * angular_mhz(pulse.omega0_mhz) * std::exp(-x * x);
}

CMatrix hamiltonian_at(const AtomModel& model, const PulseParams& pulse, double t_us) {
  const double tend = pulse.duration_us();
  if (t_us < -1e-12 || t_us > tend * (1 + 1e-12)) throw ConfigError("hamiltonian_at: t outside [0, 4T]");
  const double omega1 = pulse_rabi(pulse, t_us);
  const double omega2 = (1.0 + pulse.d_omega2) * angular_mhz(model.omega2_mhz);

  CMatrix h1 = CMatrix::Zero(5, 5);
  const int g1 = static_cast<int>(Level::g1), p = static_cast<int>(Level::p),
            r = static_cast<int>(Level::r);
  h1(p, g1) = h1(g1, p) = 0.5 * omega1;
  h1(r, p) = h1(p, r) = 0.5 * omega2;
  for (Level l : kLevels) h1(static_cast<int>(l), static_cast<int>(l)) = level_energy(model, l);

  const CMatrix id = CMatrix::Identity(5, 5);
  CMatrix h = kron(h1, id) + kron(id, h1);
  const int rr = atom_pair_index(Level::r, Level::r);
  h(rr, rr) += angular_mhz(model.urr_mhz);
  return h;
}

std::vector<CMatrix> jump_operators(const AtomModel& model) {
  const CMatrix id = CMatrix::Identity(5, 5);
  std::vector<CMatrix> ops;
  auto both = [&](const CMatrix& single) {
    ops.push_back(kron(single, id));
    ops.push_back(kron(id, single));
  };
  for (const auto& d : decays(model)) {
    if (d.rate > 0.0) both(std::sqrt(d.rate) * single_atom_op(d.to, d.from));
  }
  if (gamma1(model) > 0.0) {
    both(std::sqrt(gamma1(model)) *
         (single_atom_op(Level::p, Level::p) - single_atom_op(Level::g1, Level::g1)));
  }
  if (gamma2(model) > 0.0) {
    both(std::sqrt(gamma2(model)) *
         (single_atom_op(Level::r, Level::r) - single_atom_op(Level::p, Level::p)));
  }
  return ops;
}

CMatrix lindblad_rhs(const CMatrix& rho, const CMatrix& h, const AtomModel& model) {
  if (rho.rows() != h.rows() || rho.cols() != h.cols() || h.rows() != 25 || h.cols() != 25) {
    throw ConfigError("lindblad_rhs: expected 25x25 operands");
  }
  constexpr Complex kI(0.0, 1.0);
  CMatrix out = -kI * (h * rho - rho * h);
  for (const auto& l : jump_operators(model)) {
    const CMatrix ldl = l.adjoint() * l;
    out += l * rho * l.adjoint() - 0.5 * (ldl * rho + rho * ldl);
  }
  return out;
}

LindbladGenerator::LindbladGenerator(const AtomModel& model, const PulseParams& pulse, LevelSet levels)
    : levels_(levels), pulse_(pulse) {
  model.validate();
  pulse.validate();
  if (levels == LevelSet::full) {
    per_atom_ = 5;
    for (int i = 0; i < 5; ++i) local_[i] = i;
  } else {
    per_atom_ = 4;
    local_[0] = 0;
    local_[1] = 1;
    local_[2] = -1;
    local_[3] = 2;
    local_[4] = 3;
  }
  dim_ = per_atom_ * per_atom_;
  pulse_scale_ = (1.0 + pulse.d_omega1) * angular_mhz(pulse.omega0_mhz);

  std::vector<Level> kept;
  for (Level l : kLevels) {
    if (local_[static_cast<int>(l)] >= 0) kept.push_back(l);
  }

  // Per-atom loss rates (diagonal of sum L^dagger L) and dephasing amplitudes.
  double loss[5] = {};
  for (const auto& d : decays(model)) loss[static_cast<int>(d.from)] += d.rate;
  const double g1 = gamma1(model), g2 = gamma2(model);
  for (Level l : kLevels) {
    loss[static_cast<int>(l)] += g1 * std::abs(dephase1(l)) + g2 * std::abs(dephase2(l));
  }

  const double urr = angular_mhz(model.urr_mhz);
  std::vector<double> energy(static_cast<std::size_t>(dim_)), gamma(static_cast<std::size_t>(dim_));
  std::vector<double> s1a(energy.size()), s1b(energy.size()), s2a(energy.size()), s2b(energy.size());
  for (Level a : kept) {
    for (Level b : kept) {
      const auto k = static_cast<std::size_t>(index(a, b));
      energy[k] = level_energy(model, a) + level_energy(model, b) +
                  (a == Level::r && b == Level::r ? urr : 0.0);
      gamma[k] = loss[static_cast<int>(a)] + loss[static_cast<int>(b)];
      s1a[k] = dephase1(a);
      s1b[k] = dephase1(b);
      s2a[k] = dephase2(a);
      s2b[k] = dephase2(b);
    }
  }
  factor_.resize(dim_, dim_);
  for (int i = 0; i < dim_; ++i) {
    for (int j = 0; j < dim_; ++j) {
      const auto ui = static_cast<std::size_t>(i), uj = static_cast<std::size_t>(j);
      const double sandwich =
          g1 * (s1a[ui] * s1a[uj] + s1b[ui] * s1b[uj]) + g2 * (s2a[ui] * s2a[uj] + s2b[ui] * s2b[uj]);
      factor_(i, j) = Complex(-0.5 * (gamma[ui] + gamma[uj]) + sandwich, -(energy[ui] - energy[uj]));
    }
  }

  const double omega2 = (1.0 + pulse.d_omega2) * angular_mhz(model.omega2_mhz);
  for (Level x : kept) {
    // Atom a transitions with atom b spectating in x, then the mirror image.
    static_links_.push_back({index(Level::p, x), index(Level::r, x), 0.5 * omega2});
    static_links_.push_back({index(x, Level::p), index(x, Level::r), 0.5 * omega2});
    pulse_links_.push_back({index(Level::g1, x), index(Level::p, x), 0.5});
    pulse_links_.push_back({index(x, Level::g1), index(x, Level::p), 0.5});
  }

  for (const auto& d : decays(model)) {
    if (d.rate <= 0.0 || local_[static_cast<int>(d.to)] < 0) continue;
    Transfer ta{d.rate, {}, {}}, tb{d.rate, {}, {}};
    for (Level x : kept) {
      ta.src.push_back(index(d.from, x));
      ta.dst.push_back(index(d.to, x));
      tb.src.push_back(index(x, d.from));
      tb.dst.push_back(index(x, d.to));
    }
    transfers_.push_back(std::move(ta));
    transfers_.push_back(std::move(tb));
  }
}

int LindbladGenerator::index(Level a, Level b) const {
  const int la = local_[static_cast<int>(a)], lb = local_[static_cast<int>(b)];
  if (la < 0 || lb < 0) return -1;
  return la * per_atom_ + lb;
}

CMatrix LindbladGenerator::restrict(const CMatrix& full) const {
  if (full.rows() != 25 || full.cols() != 25) throw ConfigError("restrict: expected a 25x25 matrix");
  if (levels_ == LevelSet::full) return full;
  std::vector<int> keep;
  for (Level a : kLevels) {
    for (Level b : kLevels) {
      if (index(a, b) >= 0) keep.push_back(atom_pair_index(a, b));
    }
  }
  CMatrix out(dim_, dim_);
  for (int i = 0; i < dim_; ++i) {
    for (int j = 0; j < dim_; ++j) out(i, j) = full(keep[static_cast<std::size_t>(i)], keep[static_cast<std::size_t>(j)]);
  }
  return out;
}

void LindbladGenerator::rhs(double t, const CMatrix& rho, CMatrix& out) const {
  const int n = dim_;
  const Complex* r = rho.data();
  Complex* o = out.data();
  const Complex* f = factor_.data();
  const int nn = n * n;
  for (int k = 0; k < nn; ++k) {
    const double fr = f[k].real(), fi = f[k].imag(), xr = r[k].real(), xi = r[k].imag();
    o[k] = Complex(fr * xr - fi * xi, fr * xi + fi * xr);
  }

  // -i(V rho - rho V) for one real symmetric coupling V_ij = V_ji = v. Column-major storage.
  auto couple = [&](int i, int j, double v) {
    for (int c = 0; c < n; ++c) {
      const Complex rj = r[c * n + j], ri = r[c * n + i];
      o[c * n + i] += Complex(v * rj.imag(), -v * rj.real());
      o[c * n + j] += Complex(v * ri.imag(), -v * ri.real());
    }
    const Complex* ci = r + i * n;
    const Complex* cj = r + j * n;
    Complex* oi = o + i * n;
    Complex* oj = o + j * n;
    for (int row = 0; row < n; ++row) {
      oj[row] += Complex(-v * ci[row].imag(), v * ci[row].real());
      oi[row] += Complex(-v * cj[row].imag(), v * cj[row].real());
    }
  };
  for (const auto& l : static_links_) couple(l.i, l.j, l.value);
  const double T = pulse_.t_quarter_us;
  const double x = (t - 2.0 * T) / T;
  const double envelope = pulse_scale_ * std::exp(-x * x);
  for (const auto& l : pulse_links_) couple(l.i, l.j, envelope * l.value);

  for (const auto& tr : transfers_) {
    const std::size_t m = tr.src.size();
    for (std::size_t y = 0; y < m; ++y) {
      const Complex* src_col = r + tr.src[y] * n;
      Complex* dst_col = o + tr.dst[y] * n;
      for (std::size_t xx = 0; xx < m; ++xx) dst_col[tr.dst[xx]] += tr.rate * src_col[tr.src[xx]];
    }
  }
}

CMatrix evolve_in(const LindbladGenerator& gen, const CMatrix& rho0, double duration_us,
                  const IntegratorOptions& options, IntegratorStats* stats) {
  if (rho0.rows() != gen.dim() || rho0.cols() != gen.dim()) {
    throw ConfigError("evolve: initial state dimension does not match the level set");
  }
  CMatrix rho = rho0;
  auto rhs = [&gen](double t, const CMatrix& y, CMatrix& dy) { gen.rhs(t, y, dy); };
  if (options.method == IntegratorMethod::rk4) {
    ode::rk4(rho, 0.0, duration_us, rk4_steps(duration_us, options.step_us), rhs, stats);
  } else {
    ode::AdaptiveOptions ao;
    ao.rtol = options.rtol;
    ao.atol = options.atol;
    ao.initial_step = 1e-5;
    ode::dopri5(rho, 0.0, duration_us, rhs, ao, stats);
  }
  if (!rho.allFinite()) throw NumericalError("evolve: state became non-finite");
  return rho;
}

CMatrix evolve(const CMatrix& rho0, const AtomModel& model, const PulseParams& pulse,
               const IntegratorOptions& options, IntegratorStats* stats) {
  if (rho0.rows() != 25 || rho0.cols() != 25) throw ConfigError("evolve: expected a 25x25 state");
  const LindbladGenerator gen(model, pulse, LevelSet::full);
  return evolve_in(gen, rho0, pulse.duration_us(), options, stats);
}

namespace {

// Computational states |00>, |01>, |10>, |11> in a generator's basis.
std::array<int, 4> computational_indices(const LindbladGenerator& gen) {
  return {gen.index(Level::g0, Level::g0), gen.index(Level::g0, Level::g1),
          gen.index(Level::g1, Level::g0), gen.index(Level::g1, Level::g1)};
}

void check_spec(const PulseParams& pulse, const GateSpec& spec) {
  spec.validate();
  if (std::abs(spec.duration_us - pulse.duration_us()) > 1e-9 * std::max(1.0, spec.duration_us)) {
    throw ConfigError("gate duration must equal the pulse length 4T");
  }
}

}  // namespace

double gate_fidelity(const AtomModel& model, const PulseParams& pulse, const GateSpec& spec,
                     const IntegratorOptions& options, IntegratorStats* stats) {
  check_spec(pulse, spec);
  const LindbladGenerator gen(model, pulse, LevelSet::no_leakage);
  const auto comp = computational_indices(gen);
  CVector init = CVector::Zero(gen.dim());
  for (int k : comp) init(k) = 0.5;
  CVector target = init;
  target(comp[3]) = 0.5 * std::polar(1.0, -spec.theta);
  const CMatrix rho = evolve_in(gen, init * init.adjoint(), pulse.duration_us(), options, stats);
  return target.dot(rho * target).real();
}

double fidelity_step_sensitivity(const AtomModel& model, const PulseParams& pulse,
                                 const GateSpec& spec, const IntegratorOptions& options) {
  IntegratorOptions coarse = options, fine = options;
  coarse.method = fine.method = IntegratorMethod::rk4;
  fine.step_us = 0.5 * coarse.step_us;
  return std::abs(gate_fidelity(model, pulse, spec, coarse) - gate_fidelity(model, pulse, spec, fine));
}

std::vector<double> AxisRange::values() const {
  if (!std::isfinite(start) || !std::isfinite(stop) || !std::isfinite(step)) {
    throw ConfigError("range bounds must be finite");
  }
  if (stop < start) throw ConfigError("range stop is below start");
  if (stop == start) return {start};
  if (!(step > 0.0)) throw ConfigError("range step must be positive");
  const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  std::vector<double> v(count);
  for (std::size_t i = 0; i < count; ++i) v[i] = start + static_cast<double>(i) * step;
  return v;
}

void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, jobs)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            body(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

namespace {

double evaluate_point(AtomModel model, PulseParams pulse, const GateSpec& spec,
                      const GatePoint& pt, const IntegratorOptions& options) {
  pulse.omega0_mhz = pt.omega0_mhz;
  model.delta1ph_mhz = pt.delta1ph_mhz;
  model.delta2ph_khz = pt.delta2ph_khz;
  try {
    return gate_fidelity(model, pulse, spec, options);
  } catch (const NumericalError& e) {
    throw NumericalError("grid point (omega0=" + std::to_string(pt.omega0_mhz) +
                         " MHz, delta=" + std::to_string(pt.delta1ph_mhz) +
                         " MHz, delta2=" + std::to_string(pt.delta2ph_khz) + " kHz): " + e.what());
  }
}

bool better(const GatePoint& a, const GatePoint& b) {
  if (a.fidelity > b.fidelity + 1e-12) return true;
  if (a.fidelity < b.fidelity - 1e-12) return false;
  return a.omega0_mhz < b.omega0_mhz;
}

}  // namespace

GateOptimum optimize_gate(const AtomModel& model, const PulseParams& pulse, const GateSpec& spec,
                          const GateGrid& grid, const IntegratorOptions& options, int jobs, bool refine) {
  const auto om = grid.omega0_mhz.values();
  const auto de = grid.delta1ph_mhz.values();
  const auto d2 = grid.delta2ph_khz ? grid.delta2ph_khz->values() : std::vector<double>{model.delta2ph_khz};

  GateOptimum result;
  for (double o : om) {
    for (double d : de) {
      for (double z : d2) result.map.push_back({o, d, z, 0.0});
    }
  }
  parallel_for(result.map.size(), jobs, [&](std::size_t i) {
    result.map[i].fidelity = evaluate_point(model, pulse, spec, result.map[i], options);
  });
  result.best = result.map.front();
  for (const auto& p : result.map) {
    if (better(p, result.best)) result.best = p;
  }
  if (!refine) return result;

  // Coordinate refinement: steps halve each round, axes visited in order.
  double steps[3] = {om.size() > 1 ? grid.omega0_mhz.step : 0.0,
                     de.size() > 1 ? grid.delta1ph_mhz.step : 0.0,
                     d2.size() > 1 ? grid.delta2ph_khz->step : 0.0};
  for (int round = 0; round < 2; ++round) {
    for (double& s : steps) s *= 0.5;
    for (int axis = 0; axis < 3; ++axis) {
      if (steps[axis] == 0.0) continue;
      std::vector<GatePoint> trial;
      for (double sign : {-1.0, 1.0}) {
        GatePoint p = result.best;
        double* coord = axis == 0 ? &p.omega0_mhz : axis == 1 ? &p.delta1ph_mhz : &p.delta2ph_khz;
        *coord += sign * steps[axis];
        if (axis == 0 && p.omega0_mhz <= 0.0) continue;
        trial.push_back(p);
      }
      parallel_for(trial.size(), jobs, [&](std::size_t i) {
        trial[i].fidelity = evaluate_point(model, pulse, spec, trial[i], options);
      });
      for (const auto& p : trial) {
        result.refinement.push_back(p);
        if (better(p, result.best)) result.best = p;
      }
    }
  }
  return result;
}

Superoperator raw_superoperator(const AtomModel& model, const PulseParams& pulse,
                                const IntegratorOptions& options, int jobs, IntegratorStats* stats) {
  const LindbladGenerator gen(model, pulse, LevelSet::no_leakage);
  const auto comp = computational_indices(gen);
  // Hermiticity preservation: E(|j><i|) = E(|i><j|)^dagger, so i <= j suffices.
  std::vector<std::pair<int, int>> dyads;
  for (int i = 0; i < 4; ++i) {
    for (int j = i; j < 4; ++j) dyads.emplace_back(i, j);
  }
  std::vector<CMatrix> outputs(dyads.size());
  std::vector<IntegratorStats> dyad_stats(dyads.size());
  parallel_for(dyads.size(), jobs, [&](std::size_t k) {
    CMatrix rho0 = CMatrix::Zero(gen.dim(), gen.dim());
    rho0(comp[static_cast<std::size_t>(dyads[k].first)], comp[static_cast<std::size_t>(dyads[k].second)]) = 1.0;
    outputs[k] = evolve_in(gen, rho0, pulse.duration_us(), options, &dyad_stats[k]);
  });

  Superoperator s;
  for (std::size_t k = 0; k < dyads.size(); ++k) {
    const auto [i, j] = dyads[k];
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) {
        const Complex v = outputs[k](comp[static_cast<std::size_t>(a)], comp[static_cast<std::size_t>(b)]);
        s(4 * a + b, 4 * i + j) = v;
        s(4 * b + a, 4 * j + i) = std::conj(v);
      }
    }
  }
  if (stats) {
    for (const auto& st : dyad_stats) {
      stats->steps += st.steps;
      stats->rejected += st.rejected;
      stats->rhs_evaluations += st.rhs_evaluations;
    }
  }
  return s;
}

TwoQubitChannel compensate_single_qubit_phases(const TwoQubitChannel& ch) {
  const CMatrix k = ch.leading_kraus();
  const double ref = std::arg(k(0, 0));
  const double a = ref - std::arg(k(1, 1));  // phase on the second qubit
  const double b = ref - std::arg(k(2, 2));  // phase on the first qubit
  CMatrix u = CMatrix::Zero(4, 4);
  u(0, 0) = 1.0;
  u(1, 1) = std::polar(1.0, a);
  u(2, 2) = std::polar(1.0, b);
  u(3, 3) = std::polar(1.0, a + b);
  TwoQubitChannel out = ch;
  out.superop = unitary_superoperator(u) * ch.superop;
  out.parameters["virtual_z_rad"] = {b, a};
  return out;
}

TwoQubitChannel extract_channel(const AtomModel& model, const PulseParams& pulse, const GateSpec& spec,
                                const IntegratorOptions& options, int jobs, IntegratorStats* stats) {
  check_spec(pulse, spec);
  TwoQubitChannel raw;
  raw.superop = raw_superoperator(model, pulse, options, jobs, stats);
  raw.theta = spec.theta;
  raw.duration_us = spec.duration_us;
  raw.fidelity = channel_state_fidelity(raw, spec.theta);
  raw.parameters = {{"source", "master-equation"},
                    {"atom", to_json(model)},
                    {"pulse", to_json(pulse)},
                    {"gate", to_json(spec)},
                    {"integrator", to_json(options)}};
  TwoQubitChannel ch = compensate_single_qubit_phases(raw);
  ch.parameters["compensated_fidelity"] = channel_state_fidelity(ch, spec.theta);
  const CMatrix k = ch.leading_kraus();
  ch.parameters["effective_theta"] = -std::arg(k(3, 3) / k(0, 0));
  ch.validate();
  return ch;
}

std::string to_string(ScanAxis a) {
  switch (a) {
    case ScanAxis::intensity1: return "intensity1";
    case ScanAxis::intensity2: return "intensity2";
    case ScanAxis::two_photon_detuning: return "two-photon-detuning";
    case ScanAxis::dephasing: return "dephasing";
  }
  return "unknown";
}

ScanAxis parse_scan_axis(const std::string& s) {
  if (s == "intensity1") return ScanAxis::intensity1;
  if (s == "intensity2") return ScanAxis::intensity2;
  if (s == "two-photon-detuning") return ScanAxis::two_photon_detuning;
  if (s == "dephasing") return ScanAxis::dephasing;
  throw ConfigError("unknown scan axis: " + s);
}

std::vector<ScanPoint> scan_robustness(const AtomModel& model, const PulseParams& pulse,
                                       const GateSpec& spec, ScanAxis axis,
                                       const std::vector<double>& xs, const std::vector<double>& ys,
                                       const IntegratorOptions& options, int jobs) {
  if (xs.empty()) throw ConfigError("scan needs at least one point");
  if (axis == ScanAxis::dephasing && ys.empty()) throw ConfigError("dephasing scan needs gamma2 values");
  std::vector<ScanPoint> points;
  for (double x : xs) {
    if (axis == ScanAxis::dephasing) {
      for (double y : ys) points.push_back({x, y, 0.0});
    } else {
      points.push_back({x, 0.0, 0.0});
    }
  }
  parallel_for(points.size(), jobs, [&](std::size_t i) {
    AtomModel m = model;
    PulseParams p = pulse;
    switch (axis) {
      case ScanAxis::intensity1: p.d_omega1 = points[i].x; break;
      case ScanAxis::intensity2: p.d_omega2 = points[i].x; break;
      case ScanAxis::two_photon_detuning: m.delta2ph_khz = points[i].x; break;
      case ScanAxis::dephasing:
        m.gamma1_dp_khz = points[i].x;
        m.gamma2_dp_khz = points[i].y;
        break;
    }
    points[i].fidelity = gate_fidelity(m, p, spec, options);
  });
  return points;
}

nlohmann::json to_json(const AtomModel& m) {
  return {{"omega2_mhz", m.omega2_mhz},
          {"delta1ph_mhz", m.delta1ph_mhz},
          {"delta2ph_khz", m.delta2ph_khz},
          {"urr_mhz", m.urr_mhz},
          {"tau_p_us", m.tau_p_us},
          {"tau_r_us", m.tau_r_us},
          {"branching_p", {m.b0p, m.b1p, m.bdp}},
          {"branching_r", {m.b0r, m.b1r, m.bdr, m.bpr}},
          {"gamma1_dp_khz", m.gamma1_dp_khz},
          {"gamma2_dp_khz", m.gamma2_dp_khz},
          {"spontaneous_emission", m.spontaneous_emission},
          {"platform_constrained", m.platform_constrained}};
}

nlohmann::json to_json(const PulseParams& p) {
  return {{"omega0_mhz", p.omega0_mhz},
          {"t_quarter_us", p.t_quarter_us},
          {"d_omega1", p.d_omega1},
          {"d_omega2", p.d_omega2}};
}

nlohmann::json to_json(const GateSpec& g) { return {{"theta", g.theta}, {"duration_us", g.duration_us}}; }

nlohmann::json to_json(const IntegratorOptions& o) {
  return {{"method", o.method == IntegratorMethod::rk4 ? "rk4" : "dopri5"},
          {"step_us", o.step_us},
          {"rtol", o.rtol},
          {"atol", o.atol}};
}

}  // namespace rydfalqon
