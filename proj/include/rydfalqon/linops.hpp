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

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <type_traits>

#include "rydfalqon/error.hpp"

namespace rydfalqon {

using Complex = std::complex<double>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using CMatrix = Matrix<Complex>;
using CVector = Vector<Complex>;
using RVector = Vector<double>;

// Pure states are plain complex vectors and mixed states plain complex
// matrices; the aliases document intent at API boundaries.
using StateVector = CVector;
using DensityMatrix = CMatrix;

namespace pauli {
CMatrix identity();
CMatrix x();
CMatrix y();
CMatrix z();
CMatrix hadamard();
}  // namespace pauli

/// Kronecker product a ⊗ b. Works for any pair of dense Eigen expressions.
template <typename DerivedA, typename DerivedB>
auto kron(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = std::common_type_t<typename DerivedA::Scalar, typename DerivedB::Scalar>;
  Matrix<Scalar> out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) =
          Scalar(a(i, j)) * b.template cast<Scalar>();
    }
  }
  return out;
}

/// Largest absolute entry of m - m^dagger.
template <typename Derived>
double hermiticity_error(const Eigen::MatrixBase<Derived>& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

/// Operator acting as `op` on `targets` of an n-qubit register and as the
/// identity elsewhere. Qubit 0 is the most significant bit of the basis label.
CMatrix embed(const CMatrix& op, std::span<const int> targets, int n);
inline CMatrix embed(const CMatrix& op, std::initializer_list<int> targets, int n) {
  return embed(op, std::span<const int>(targets.begin(), targets.size()), n);
}

/// <psi|obs|psi> for a normalized or unnormalized pure state (divided by <psi|psi>).
double expectation(const StateVector& psi, const CMatrix& obs);
/// tr(rho obs) / tr(rho).
double expectation(const DensityMatrix& rho, const CMatrix& obs);

double min_eigenvalue_hermitian(const CMatrix& m);

/// Throws ConfigError unless rho is a valid (possibly sub-normalized) density matrix.
void check_density_matrix(const DensityMatrix& rho, double tol = 1e-8);

/// Integer qubit count for a power-of-two dimension; throws otherwise.
int qubit_count(Eigen::Index dim);

/// Bitstring label of basis index `index` in an n-qubit register, qubit 0 first.
std::string bitstring(std::uint64_t index, int n);
std::uint64_t parse_bitstring(const std::string& bits);

}  // namespace rydfalqon
