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

#include "rydfalqon/linops.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <bit>
#include <cmath>
#include <vector>

namespace rydfalqon {

namespace pauli {
CMatrix identity() { return CMatrix::Identity(2, 2); }

CMatrix x() {
  CMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

CMatrix y() {
  CMatrix m(2, 2);
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}

CMatrix z() {
  CMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

CMatrix hadamard() {
  CMatrix m(2, 2);
  m << 1, 1, 1, -1;
  return m / std::sqrt(2.0);
}
}  // namespace pauli

CMatrix embed(const CMatrix& op, std::span<const int> targets, int n) {
  if (n < 1 || n > 20) throw ConfigError("embed: qubit count out of range");
  const auto k = static_cast<int>(targets.size());
  if (k == 0 || op.rows() != (Eigen::Index{1} << k) || op.cols() != op.rows()) {
    throw ConfigError("embed: operator dimension does not match target count");
  }
  std::uint64_t target_mask = 0;
  for (int t : targets) {
    if (t < 0 || t >= n) throw ConfigError("embed: target out of range");
    const std::uint64_t bit = std::uint64_t{1} << (n - 1 - t);
    if (target_mask & bit) throw ConfigError("embed: duplicate target");
    target_mask |= bit;
  }

  // Sub-index of a full basis index: target bits gathered in `targets` order.
  auto sub_index = [&](std::uint64_t full) {
    std::uint64_t s = 0;
    for (int t : targets) s = (s << 1) | ((full >> (n - 1 - t)) & 1U);
    return s;
  };
  auto scatter = [&](std::uint64_t rest, std::uint64_t sub) {
    std::uint64_t full = rest;
    for (int i = 0; i < k; ++i) {
      const std::uint64_t bit = (sub >> (k - 1 - i)) & 1U;
      full |= bit << (n - 1 - targets[static_cast<std::size_t>(i)]);
    }
    return full;
  };

  const std::uint64_t dim = std::uint64_t{1} << n;
  const auto sub_dim = static_cast<std::uint64_t>(op.rows());
  CMatrix out = CMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::uint64_t col = 0; col < dim; ++col) {
    const std::uint64_t rest = col & ~target_mask;
    const std::uint64_t c = sub_index(col);
    for (std::uint64_t r = 0; r < sub_dim; ++r) {
      const Complex v = op(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
      if (v != Complex(0)) {
        out(static_cast<Eigen::Index>(scatter(rest, r)), static_cast<Eigen::Index>(col)) = v;
      }
    }
  }
  return out;
}

double expectation(const StateVector& psi, const CMatrix& obs) {
  if (obs.rows() != psi.size() || obs.cols() != psi.size()) {
    throw ConfigError("expectation: dimension mismatch");
  }
  const double norm = psi.squaredNorm();
  if (norm <= 0.0) throw ConfigError("expectation: zero state");
  return psi.dot(obs * psi).real() / norm;
}

double expectation(const DensityMatrix& rho, const CMatrix& obs) {
  if (rho.rows() != obs.rows() || rho.cols() != obs.cols() || rho.rows() != rho.cols()) {
    throw ConfigError("expectation: dimension mismatch");
  }
  const double tr = rho.trace().real();
  if (tr <= 0.0) throw ConfigError("expectation: zero trace");
  // tr(rho obs) without forming the product.
  const Complex value = (rho.transpose().array() * obs.array()).sum();
  return value.real() / tr;
}

double min_eigenvalue_hermitian(const CMatrix& m) {
  if (hermiticity_error(m) > 1e-10) {
    throw ConfigError("min_eigenvalue_hermitian: matrix is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

void check_density_matrix(const DensityMatrix& rho, double tol) {
  if (rho.rows() != rho.cols() || rho.rows() == 0) {
    throw ConfigError("density matrix must be square and non-empty");
  }
  if (hermiticity_error(rho) > tol) throw ConfigError("density matrix is not Hermitian");
  const double tr = rho.trace().real();
  if (!(tr > 0.0) || tr > 1.0 + tol) throw ConfigError("density matrix trace out of (0, 1]");
  const CMatrix sym = 0.5 * (rho + rho.adjoint());
  if (min_eigenvalue_hermitian(sym) < -tol) {
    throw ConfigError("density matrix has a negative eigenvalue");
  }
}

int qubit_count(Eigen::Index dim) {
  const auto udim = static_cast<std::uint64_t>(dim);
  if (dim < 2 || !std::has_single_bit(udim)) {
    throw ConfigError("dimension is not a power of two");
  }
  return std::countr_zero(udim);
}

std::string bitstring(std::uint64_t index, int n) {
  std::string s(static_cast<std::size_t>(n), '0');
  for (int q = 0; q < n; ++q) {
    if ((index >> (n - 1 - q)) & 1U) s[static_cast<std::size_t>(q)] = '1';
  }
  return s;
}

std::uint64_t parse_bitstring(const std::string& bits) {
  std::uint64_t v = 0;
  for (char c : bits) {
    if (c != '0' && c != '1') throw ConfigError("bitstring contains characters other than 0/1");
    v = (v << 1) | static_cast<std::uint64_t>(c - '0');
  }
  return v;
}

}  // namespace rydfalqon
