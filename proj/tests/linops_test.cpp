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
#include "rydfalqon/linops.hpp"
#include "rydfalqon/problem.hpp"

namespace rydfalqon {
namespace {

CMatrix random_matrix(int rows, int cols, std::mt19937& rng) {
  std::normal_distribution<double> n;
  CMatrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = {n(rng), n(rng)};
  return m;
}

StateVector basis(int index, int dim) {
  StateVector v = StateVector::Zero(dim);
  v(index) = 1.0;
  return v;
}

TEST(Kron, IdentityTimesIdentity) {
  EXPECT_TRUE(kron(pauli::identity(), pauli::identity()).isApprox(CMatrix::Identity(4, 4)));
}

TEST(Kron, ZZDiagonal) {
  const CMatrix zz = kron(pauli::z(), pauli::z());
  const Eigen::Vector4cd expected(1, -1, -1, 1);
  EXPECT_LT((zz.diagonal() - expected).norm(), 1e-15);
  EXPECT_LT((zz - CMatrix(zz.diagonal().asDiagonal())).norm(), 1e-15);
}

TEST(Kron, BitFlipOnFirstFactor) {
  const StateVector out = kron(pauli::x(), pauli::identity()) * basis(0, 4);
  EXPECT_LT((out - basis(2, 4)).norm(), 1e-15);
}

TEST(Kron, MixedScalarTypes) {
  Eigen::MatrixXd a(1, 2);
  a << 1, 2;
  const CMatrix b = pauli::y();
  const CMatrix k = kron(a, b);
  EXPECT_EQ(k.rows(), 2);
  EXPECT_EQ(k.cols(), 4);
  EXPECT_EQ(k(0, 3), Complex(0, -2));
}

TEST(Kron, Associative) {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const CMatrix a = random_matrix(2, 3, rng), b = random_matrix(3, 2, rng), c = random_matrix(2, 2, rng);
    EXPECT_LE((kron(kron(a, b), c) - kron(a, kron(b, c))).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Embed, SingleQubitZ) {
  EXPECT_LT((embed(pauli::z(), {0}, 2).diagonal() - Eigen::Vector4cd(1, 1, -1, -1)).norm(), 1e-15);
  EXPECT_LT((embed(pauli::z(), {1}, 2).diagonal() - Eigen::Vector4cd(1, -1, 1, -1)).norm(), 1e-15);
}

TEST(Embed, CzOnThreeQubits) {
  const StateVector s = basis(0b110, 8);
  EXPECT_LT((embed(cz(), {0, 1}, 3) * s + s).norm(), 1e-15);
  const StateVector t = basis(0b101, 8);
  EXPECT_LT((embed(cz(), {0, 1}, 3) * t - t).norm(), 1e-15);
}

TEST(Embed, ReversedTargetsSwapRoles) {
  const CMatrix xz = kron(pauli::x(), pauli::z());
  EXPECT_LE((embed(xz, {1, 0}, 2) - kron(pauli::z(), pauli::x())).cwiseAbs().maxCoeff(), 1e-15);
  // Non-adjacent targets with a spectator in between.
  const CMatrix expected = kron(kron(pauli::x(), pauli::identity()), pauli::z());
  EXPECT_LE((embed(xz, {0, 2}, 3) - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Embed, CommutesOnDisjointQubits) {
  std::mt19937 rng(3);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (i == j) continue;
      const CMatrix a = embed(random_matrix(2, 2, rng), {i}, 3);
      const CMatrix b = embed(random_matrix(2, 2, rng), {j}, 3);
      EXPECT_LE((a * b - b * a).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(Embed, RejectsBadInput) {
  EXPECT_THROW(embed(pauli::z(), {0, 1}, 2), ConfigError);
  EXPECT_THROW(embed(cz(), {1, 1}, 3), ConfigError);
  EXPECT_THROW(embed(pauli::z(), {2}, 2), ConfigError);
  EXPECT_THROW(embed(pauli::z(), {-1}, 2), ConfigError);
}

TEST(Expectation, PaulisOnPlus) {
  const StateVector plus = StateVector::Constant(2, 1.0 / std::sqrt(2.0));
  EXPECT_NEAR(expectation(plus, pauli::x()), 1.0, 1e-15);
  EXPECT_NEAR(expectation(plus, pauli::y()), 0.0, 1e-15);
}

TEST(Expectation, ZZOnBasisState) {
  EXPECT_NEAR(expectation(basis(1, 4), kron(pauli::z(), pauli::z())), -1.0, 1e-15);
}

TEST(Expectation, DensityMatrixIsTraceNormalized) {
  const StateVector s = basis(1, 4);
  const DensityMatrix rho = 0.6 * s * s.adjoint();
  EXPECT_NEAR(expectation(rho, kron(pauli::z(), pauli::z())), -1.0, 1e-15);
}

TEST(Expectation, DimensionMismatchThrows) {
  EXPECT_THROW(expectation(basis(0, 4), pauli::z()), ConfigError);
  EXPECT_THROW(expectation(DensityMatrix(CMatrix::Identity(4, 4)), pauli::z()), ConfigError);
}

TEST(Expectation, HermitianObservableHasRealExpectation) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const CMatrix a = random_matrix(8, 8, rng);
    const CMatrix h = a + a.adjoint();
    StateVector psi = random_matrix(8, 1, rng);
    psi.normalize();
    EXPECT_LE(std::abs(psi.dot(h * psi).imag()), 1e-10);
    const double e = expectation(psi, h);
    EXPECT_NEAR(e, psi.dot(h * psi).real(), 1e-12);
  }
}

TEST(MinEigenvalue, Examples) {
  EXPECT_NEAR(min_eigenvalue_hermitian(kron(pauli::z(), pauli::z())), -1.0, 1e-12);
  EXPECT_NEAR(min_eigenvalue_hermitian(CMatrix::Identity(4, 4)), 1.0, 1e-12);
  EXPECT_NEAR(min_eigenvalue_hermitian(to_matrix(maxcut_hamiltonian(graph_preset("path3")))), -2.0, 1e-12);
}

TEST(MinEigenvalue, RejectsNonHermitian) {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 1) = 1.0;
  EXPECT_THROW(min_eigenvalue_hermitian(m), ConfigError);
}

TEST(DensityMatrixCheck, AcceptsAndRejects) {
  DensityMatrix rho = CMatrix::Identity(4, 4) / 4.0;
  EXPECT_NO_THROW(check_density_matrix(rho));
  DensityMatrix heavy = CMatrix::Identity(4, 4) / 2.0;
  EXPECT_THROW(check_density_matrix(heavy), ConfigError);
  DensityMatrix negative = rho;
  negative(0, 0) = -0.1;
  negative(1, 1) = 0.6;
  EXPECT_THROW(check_density_matrix(negative), ConfigError);
}

TEST(Bitstrings, RoundTrip) {
  EXPECT_EQ(bitstring(0b010, 3), "010");
  EXPECT_EQ(bitstring(1, 2), "01");
  EXPECT_EQ(parse_bitstring("101"), 5u);
  for (std::uint64_t i = 0; i < 16; ++i) EXPECT_EQ(parse_bitstring(bitstring(i, 4)), i);
  EXPECT_THROW(parse_bitstring("01x"), ConfigError);
  EXPECT_EQ(qubit_count(16), 4);
  EXPECT_THROW(qubit_count(12), ConfigError);
}

}  // namespace
}  // namespace rydfalqon
