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

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <utility>

#include "hamcert/error.hpp"

namespace hamcert {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

/// Largest qubit count a dense operator may carry (4^n complex entries).
inline constexpr int kMaxQubits = 10;

/// Relative tolerance for the Hermiticity check, scaled by max |entry|.
inline constexpr double kHermitianTolerance = 1e-9;

/**
 * A 2^n x 2^n complex matrix acting on n qubits.
 *
 * Site 0 is the most significant bit of the row/column index, so the
 * operator for the word "ZX" is kron(Z, X).
 */
class DenseOperator {
 public:
  DenseOperator() : qubits_(0), m_(Matrix::Identity(1, 1)) {}

  explicit DenseOperator(Matrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols()) {
      throw DimensionError("dense operator must be square, got " +
                           std::to_string(m_.rows()) + "x" +
                           std::to_string(m_.cols()));
    }
    const Eigen::Index dim = m_.rows();
    if (dim < 1 || (dim & (dim - 1)) != 0) {
      throw DimensionError("dense operator dimension " + std::to_string(dim) +
                           " is not a power of two");
    }
    qubits_ = 0;
    while ((Eigen::Index{1} << qubits_) < dim) ++qubits_;
    if (qubits_ > kMaxQubits) {
      throw DimensionError("dense simulation is capped at " +
                           std::to_string(kMaxQubits) + " qubits, got " +
                           std::to_string(qubits_));
    }
    if (!m_.allFinite()) {
      throw InvalidArgument("dense operator has non-finite entries");
    }
  }

  static DenseOperator identity(int n) {
    check_qubits(n);
    return DenseOperator(Matrix::Identity(Eigen::Index{1} << n,
                                          Eigen::Index{1} << n));
  }

  static DenseOperator zero(int n) {
    check_qubits(n);
    return DenseOperator(
        Matrix::Zero(Eigen::Index{1} << n, Eigen::Index{1} << n));
  }

  int qubits() const { return qubits_; }
  Eigen::Index dim() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }
  Complex operator()(Eigen::Index r, Eigen::Index c) const { return m_(r, c); }

  DenseOperator adjoint() const { return DenseOperator(m_.adjoint(), qubits_); }
  Complex trace() const { return m_.trace(); }

  friend DenseOperator operator+(const DenseOperator& a,
                                 const DenseOperator& b) {
    same_dims(a, b);
    return DenseOperator(a.m_ + b.m_, a.qubits_);
  }
  friend DenseOperator operator-(const DenseOperator& a,
                                 const DenseOperator& b) {
    same_dims(a, b);
    return DenseOperator(a.m_ - b.m_, a.qubits_);
  }
  friend DenseOperator operator*(const DenseOperator& a,
                                 const DenseOperator& b) {
    same_dims(a, b);
    return DenseOperator(a.m_ * b.m_, a.qubits_);
  }
  friend DenseOperator operator*(Complex s, const DenseOperator& a) {
    return DenseOperator(s * a.m_, a.qubits_);
  }

  static void same_dims(const DenseOperator& a, const DenseOperator& b) {
    if (a.dim() != b.dim()) {
      throw DimensionError("operator dimension mismatch: " +
                           std::to_string(a.dim()) + " vs " +
                           std::to_string(b.dim()));
    }
  }

  static void check_qubits(int n) {
    if (n < 0 || n > kMaxQubits) {
      throw DimensionError("qubit count " + std::to_string(n) +
                           " outside [0, " + std::to_string(kMaxQubits) + "]");
    }
  }

 private:
  // Trusted constructor for results of arithmetic on validated operands.
  DenseOperator(Matrix m, int qubits) : qubits_(qubits), m_(std::move(m)) {}

  int qubits_;
  Matrix m_;
};

/// Largest |entry| of a matrix.
inline double max_abs_entry(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline bool is_hermitian(const DenseOperator& a,
                         double rel_tol = kHermitianTolerance) {
  const double scale = max_abs_entry(a.matrix());
  const double defect = max_abs_entry(a.matrix() - a.matrix().adjoint());
  return defect <= rel_tol * scale;
}

/**
 * Eigenvalues (ascending) and optionally eigenvectors of a Hermitian
 * operator. Columns of `eigenvectors` are the eigenvectors.
 */
struct Spectrum {
  int qubits = 0;
  RealVector eigenvalues;
  std::optional<Matrix> eigenvectors;

  Eigen::Index dim() const { return eigenvalues.size(); }

  /// Normalized Schatten-p norm from the eigenvalues: (mean |l|^p)^(1/p).
  double normalized_moment_norm(double p) const {
    if (dim() == 0) return 0.0;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < dim(); ++i) {
      acc += std::pow(std::abs(eigenvalues(i)), p);
    }
    return std::pow(acc / static_cast<double>(dim()), 1.0 / p);
  }

  /// Normalized Frobenius norm sqrt(mean l^2).
  double frobenius() const {
    return dim() == 0 ? 0.0
                      : std::sqrt(eigenvalues.squaredNorm() /
                                  static_cast<double>(dim()));
  }

  DenseOperator reconstruct() const {
    if (!eigenvectors) {
      throw InvalidArgument("spectrum was computed without eigenvectors");
    }
    const Matrix& v = *eigenvectors;
    return DenseOperator(v * eigenvalues.cast<Complex>().asDiagonal() *
                         v.adjoint());
  }
};

/// Eigendecomposition of a Hermitian operator. Throws NotHermitian when the
/// anti-Hermitian part exceeds kHermitianTolerance * max |entry|.
inline Spectrum eig_hermitian(const DenseOperator& a,
                              bool with_vectors = true) {
  if (!is_hermitian(a)) {
    throw NotHermitian("eig_hermitian: input is not Hermitian within " +
                       std::to_string(kHermitianTolerance) +
                       " relative tolerance");
  }
  // Symmetrize so the solver sees an exactly Hermitian matrix.
  const Matrix herm = 0.5 * (a.matrix() + a.matrix().adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(
      herm, with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error("eig_hermitian: eigensolver failed to converge");
  }
  Spectrum s;
  s.qubits = a.qubits();
  s.eigenvalues = solver.eigenvalues();
  if (with_vectors) s.eigenvectors = solver.eigenvectors();
  return s;
}

/// V diag(exp(-i scale l)) V^dagger from a spectrum with eigenvectors.
inline DenseOperator exp_i_hermitian(const Spectrum& s, double scale) {
  if (!s.eigenvectors) {
    throw InvalidArgument("exp_i_hermitian needs eigenvectors");
  }
  Eigen::VectorXcd phases(s.dim());
  for (Eigen::Index i = 0; i < s.dim(); ++i) {
    phases(i) = std::polar(1.0, -scale * s.eigenvalues(i));
  }
  const Matrix& v = *s.eigenvectors;
  return DenseOperator(v * phases.asDiagonal() * v.adjoint());
}

/// exp(-i scale H) for Hermitian H.
inline DenseOperator exp_i_hermitian(const DenseOperator& h, double scale) {
  return exp_i_hermitian(eig_hermitian(h, true), scale);
}

/// Singular values, descending. Hermitian input goes through the
/// eigensolver (|l|); everything else through a divide-and-conquer SVD.
inline RealVector singular_values(const DenseOperator& a) {
  RealVector sv;
  if (is_hermitian(a)) {
    sv = eig_hermitian(a, false).eigenvalues.cwiseAbs();
  } else {
    Eigen::BDCSVD<Matrix> svd(a.matrix());
    sv = svd.singularValues();
  }
  std::sort(sv.data(), sv.data() + sv.size(), std::greater<>());
  return sv;
}

/// (sum_i sigma_i^p / 2^n)^(1/p), p >= 1.
inline double schatten_p_normalized(const DenseOperator& a, double p) {
  if (!(p >= 1.0)) {
    throw InvalidArgument("schatten_p_normalized: p must be >= 1");
  }
  const RealVector sv = singular_values(a);
  const double top = sv.size() ? sv(0) : 0.0;
  if (top == 0.0) return 0.0;
  // Factor out the largest singular value so large p cannot overflow.
  double acc = 0.0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) acc += std::pow(sv(i) / top, p);
  return top * std::pow(acc / static_cast<double>(a.dim()), 1.0 / p);
}

inline double operator_norm(const DenseOperator& a) {
  const RealVector sv = singular_values(a);
  return sv.size() ? sv(0) : 0.0;
}

inline double trace_norm(const DenseOperator& a) {
  return singular_values(a).sum();
}

/// sqrt(Tr[A^dagger A] / 2^n), computed entrywise.
inline double frobenius_normalized(const DenseOperator& a) {
  return std::sqrt(a.matrix().squaredNorm() / static_cast<double>(a.dim()));
}

/// Kronecker product of two dense matrices.
inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

/// Integer power by repeated squaring; power(U, 0) is the identity.
inline Matrix matrix_power(const Matrix& base, unsigned long long exponent) {
  Matrix result = Matrix::Identity(base.rows(), base.cols());
  Matrix square = base;
  while (exponent > 0) {
    if (exponent & 1ULL) result = result * square;
    exponent >>= 1;
    if (exponent > 0) square = square * square;
  }
  return result;
}

}  // namespace hamcert
