// Copyright 2026 The hamcert Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "hamcert/linalg.hpp"
#include "hamcert/pauli.hpp"
#include "test_util.hpp"

namespace hamcert {
namespace {

using testing_util::random_hermitian;
using testing_util::random_unitary;

Matrix diag2(double a, double b) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

TEST(DenseOperator, RejectsBadShapes) {
  EXPECT_THROW(DenseOperator(Matrix::Zero(3, 3)), DimensionError);
  EXPECT_THROW(DenseOperator(Matrix::Zero(2, 4)), DimensionError);
  EXPECT_THROW(DenseOperator::identity(11), DimensionError);
  Matrix bad = Matrix::Zero(2, 2);
  bad(0, 0) = std::nan("");
  EXPECT_THROW(DenseOperator{bad}, InvalidArgument);
  EXPECT_THROW(DenseOperator::identity(1) + DenseOperator::identity(2),
               DimensionError);
  EXPECT_EQ(DenseOperator::identity(3).qubits(), 3);
}

TEST(EigHermitian, KnownSpectra) {
  auto z = eig_hermitian(DenseOperator(diag2(1, -1)));
  EXPECT_NEAR(z.eigenvalues(0), -1.0, 1e-15);
  EXPECT_NEAR(z.eigenvalues(1), 1.0, 1e-15);

  auto zero = eig_hermitian(DenseOperator::zero(2));
  EXPECT_EQ(zero.eigenvalues.cwiseAbs().maxCoeff(), 0.0);

  auto xx = eig_hermitian(to_dense(LocalHamiltonian(2, 1, {{"XI", 0.5}, {"IX", 0.5}})));
  // Hand diagonalization: 0.5(X+X') has eigenvalues (+-1 +- 1)/2.
  const double expected[] = {-1.0, 0.0, 0.0, 1.0};
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(xx.eigenvalues(i), expected[i], 1e-12);
}

TEST(EigHermitian, ReconstructsInputAndSortsAscending) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const int n = 1 + static_cast<int>(seed % 5);
    const DenseOperator h = random_hermitian(n, seed);
    const Spectrum s = eig_hermitian(h);
    for (Eigen::Index i = 1; i < s.dim(); ++i) {
      EXPECT_LE(s.eigenvalues(i - 1), s.eigenvalues(i));
    }
    const double residual =
        max_abs_entry(s.reconstruct().matrix() - h.matrix());
    EXPECT_LE(residual, 1e-9 * static_cast<double>(h.dim()));
  }
}

TEST(EigHermitian, RejectsNonHermitian) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = 1.0;
  EXPECT_THROW(eig_hermitian(DenseOperator(m)), NotHermitian);
}

TEST(ExpIHermitian, IdentityAtZeroAndMinusIdentityAtPi) {
  const DenseOperator h = random_hermitian(3, 4);
  EXPECT_LE(max_abs_entry(exp_i_hermitian(h, 0.0).matrix() - Matrix::Identity(8, 8)),
            1e-12);
  const DenseOperator u = exp_i_hermitian(DenseOperator(diag2(1, -1)), std::numbers::pi);
  EXPECT_LE(max_abs_entry(u.matrix() + Matrix::Identity(2, 2)), 1e-12);
}

TEST(ExpIHermitian, UnitaryAndGroupLaw) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const int n = 1 + static_cast<int>(seed % 4);
    const DenseOperator h = random_hermitian(n, seed + 3);
    const double t1 = 0.37 * static_cast<double>(seed % 7);
    const double t2 = 1.1 - 0.05 * static_cast<double>(seed);
    const Matrix u1 = exp_i_hermitian(h, t1).matrix();
    const Matrix u2 = exp_i_hermitian(h, t2).matrix();
    const Matrix u12 = exp_i_hermitian(h, t1 + t2).matrix();
    EXPECT_LE(max_abs_entry(u1 * u1.adjoint() - Matrix::Identity(u1.rows(), u1.cols())),
              1e-9);
    EXPECT_LE(max_abs_entry(u1 * u2 - u12), 1e-8);
  }
}

TEST(SchattenNorm, KnownValues) {
  for (const auto& p : enumerate_local_paulis(2, 2)) {
    for (double pp : {1.0, 2.0, 3.5, 4.0}) {
      EXPECT_NEAR(schatten_p_normalized(pauli_dense(p), pp), 1.0, 1e-12);
    }
  }
  EXPECT_EQ(schatten_p_normalized(DenseOperator::zero(2), 4.0), 0.0);
  EXPECT_NEAR(schatten_p_normalized(DenseOperator(diag2(2, 0)), 4.0),
              std::pow(8.0, 0.25), 1e-12);
  EXPECT_THROW(schatten_p_normalized(DenseOperator::identity(1), 0.5),
               InvalidArgument);
}

TEST(SchattenNorm, TwoEqualsFrobeniusAndMonotoneInP) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const int n = 1 + static_cast<int>(seed % 4);
    const DenseOperator a = testing_util::random_operator(n, seed);
    EXPECT_NEAR(schatten_p_normalized(a, 2.0), frobenius_normalized(a), 1e-10);
    // Two paths for ||A||_F^2: entrywise vs Tr[A^dagger A] / 2^n.
    const double via_trace =
        (a.matrix().adjoint() * a.matrix()).trace().real() /
        static_cast<double>(a.dim());
    EXPECT_NEAR(frobenius_normalized(a) * frobenius_normalized(a), via_trace,
                1e-10 * std::max(1.0, via_trace));
    double prev = 0.0;
    for (double p : {1.0, 1.5, 2.0, 3.0, 4.0, 8.0, 16.0}) {
      const double v = schatten_p_normalized(a, p);
      EXPECT_GE(v, prev - 1e-12);
      prev = v;
    }
  }
}

TEST(Norms, OperatorAndTraceNorm) {
  EXPECT_NEAR(operator_norm(DenseOperator::identity(1)), 1.0, 1e-15);
  EXPECT_NEAR(trace_norm(DenseOperator::identity(1)), 2.0, 1e-15);
  EXPECT_NEAR(operator_norm(DenseOperator(diag2(3, -1))), 3.0, 1e-15);
  EXPECT_NEAR(trace_norm(DenseOperator(diag2(3, -1))), 4.0, 1e-15);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const DenseOperator h = random_hermitian(3, seed);
    const Spectrum s = eig_hermitian(h, false);
    EXPECT_NEAR(trace_norm(h), s.eigenvalues.cwiseAbs().sum(), 1e-9);
  }
}

TEST(Norms, NonHermitianUsesSvd) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = 2.0;
  const DenseOperator a(m);
  EXPECT_NEAR(operator_norm(a), 2.0, 1e-14);
  EXPECT_NEAR(trace_norm(a), 2.0, 1e-14);
}

TEST(Norms, FrobeniusUnitarilyInvariant) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const DenseOperator a = random_hermitian(3, seed);
    const DenseOperator u = random_unitary(3, seed + 50);
    const DenseOperator rotated = u * a * u.adjoint();
    EXPECT_NEAR(frobenius_normalized(rotated), frobenius_normalized(a), 1e-10);
  }
}

TEST(MatrixPower, MatchesRepeatedProduct) {
  const Matrix u = random_unitary(2, 8).matrix();
  Matrix acc = Matrix::Identity(4, 4);
  for (unsigned long long e = 0; e < 13; ++e) {
    EXPECT_LE(max_abs_entry(matrix_power(u, e) - acc), 1e-12);
    acc = acc * u;
  }
}

}  // namespace
}  // namespace hamcert
