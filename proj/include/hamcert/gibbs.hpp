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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <iterator>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "hamcert/error.hpp"
#include "hamcert/linalg.hpp"
#include "hamcert/pauli.hpp"

namespace hamcert {

/*******************************************************************************
 * Gibbs states
 ******************************************************************************/

struct GibbsState {
  DenseOperator rho;
  double beta = 0.0;
  std::optional<LocalHamiltonian> source;

  int qubits() const { return rho.qubits(); }
};

/// Tr[P rho], i.e. 2^n times the Pauli coefficient rho_P.
inline double pauli_expectation(const DenseOperator& rho, const PauliString& p) {
  return pauli_coefficient(rho, p).real() * static_cast<double>(rho.dim());
}

/// Throws unless rho is Hermitian, PSD (min eigenvalue >= -1e-10) and has
/// unit trace within 1e-10.
inline void check_density_matrix(const DenseOperator& rho) {
  if (!is_hermitian(rho)) throw NotHermitian("density matrix is not Hermitian");
  const Spectrum s = eig_hermitian(rho, false);
  if (s.dim() > 0 && s.eigenvalues.minCoeff() < -1e-10) {
    throw InvalidArgument("density matrix has eigenvalue " +
                          std::to_string(s.eigenvalues.minCoeff()));
  }
  if (std::abs(rho.trace().real() - 1.0) > 1e-10) {
    throw InvalidArgument("density matrix trace is not 1");
  }
}

/**
 * exp(-beta H) / Tr exp(-beta H) through the eigendecomposition. Exponents
 * are shifted by their maximum so large beta cannot overflow.
 */
inline GibbsState gibbs_state(const LocalHamiltonian& h, double beta) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    throw InvalidArgument("gibbs_state: beta must be finite and >= 0");
  }
  const Spectrum s = eig_hermitian(to_dense(h));
  RealVector w = -beta * s.eigenvalues;
  w = (w.array() - w.maxCoeff()).exp().matrix();
  w /= w.sum();
  const Matrix& v = *s.eigenvectors;
  Matrix rho = v * w.cast<Complex>().asDiagonal() * v.adjoint();
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return {DenseOperator(std::move(rho)), beta, h};
}

/// Sum of singular values of rho - sigma, in [0, 2] for states.
inline double trace_distance(const DenseOperator& rho, const DenseOperator& sigma) {
  if (rho.dim() != sigma.dim()) {
    throw DimensionError("trace_distance: dimensions " + std::to_string(rho.dim()) + " and " +
                         std::to_string(sigma.dim()));
  }
  return trace_norm(rho - sigma);
}

inline double trace_distance(const GibbsState& a, const GibbsState& b) {
  return trace_distance(a.rho, b.rho);
}

struct PinskerBounds {
  double lhs;                    // trace distance
  double bound0;                 // sqrt(2 beta Tr[(rho - rho')(H' - H)])
  double bound1;                 // 200 beta n^k max_P |h_P - h'_P|
  std::optional<double> bound2;  // sqrt(400 beta n^k max_P |Tr P(rho - rho')|)
};

/**
 * Trace distance between two Gibbs states and the three upper bounds on it.
 * bound2 is only defined when every coefficient of both Hamiltonians is
 * bounded by 1; it is empty otherwise.
 */
inline PinskerBounds pinsker_bounds(const GibbsState& a, const GibbsState& b) {
  if (!a.source || !b.source) {
    throw InvalidArgument("pinsker_bounds: both states need their source Hamiltonian");
  }
  if (a.qubits() != b.qubits()) throw DimensionError("pinsker_bounds: qubit counts differ");
  if (a.beta != b.beta) throw InvalidArgument("pinsker_bounds: states have different beta");
  const LocalHamiltonian& h = *a.source;
  const LocalHamiltonian& hp = *b.source;
  const int n = a.qubits();
  const int k = std::max(h.locality(), hp.locality());
  const double beta = a.beta;
  const double nk = std::pow(static_cast<double>(n), k);

  PinskerBounds out{};
  out.lhs = trace_distance(a, b);

  const DenseOperator diff_rho = a.rho - b.rho;
  const DenseOperator diff_h = to_dense(hp - h);
  // Nonnegative in exact arithmetic (a symmetrized relative entropy).
  const double overlap = (diff_rho.matrix() * diff_h.matrix()).trace().real();
  out.bound0 = std::sqrt(2.0 * beta * std::max(overlap, 0.0));

  out.bound1 = 200.0 * beta * nk * (h - hp).max_abs_coefficient();

  if (h.is_bounded() && hp.is_bounded()) {
    double worst = 0.0;
    for (const auto& p : enumerate_local_paulis(n, k)) {
      worst = std::max(worst, std::abs(pauli_expectation(diff_rho, p)));
    }
    out.bound2 = std::sqrt(400.0 * beta * nk * worst);
  }
  return out;
}

/*******************************************************************************
 * Covering net
 ******************************************************************************/

inline constexpr std::uint64_t kDefaultNetCap = 10'000'000;

/**
 * The grid Hamiltonians sum_P h_P P with every h_P in eta*Z cap [-1, 1],
 * over the k-local Paulis P in enumeration order. Members are numbered in
 * mixed radix with the first Pauli as the least significant digit and grid
 * values in ascending order.
 */
class NetIndex {
 public:
  /// eta = eps_net / (200 beta n^k); beta = 0 gives the single member 0.
  NetIndex(int n, int k, double beta, double eps_net)
      : NetIndex(n, k, beta, spacing_for(n, k, beta, eps_net), eps_net) {}

  /// Net with an explicit grid spacing. eps_net is then the covering radius
  /// 200 beta n^k eta that the spacing guarantees.
  static NetIndex with_spacing(int n, int k, double beta, double eta) {
    if (!(eta > 0.0)) throw InvalidArgument("net spacing must be > 0");
    const double eps_net = 200.0 * beta * std::pow(static_cast<double>(n), k) * eta;
    return NetIndex(n, k, beta, eta, eps_net);
  }

  int qubits() const { return n_; }
  int locality() const { return k_; }
  double beta() const { return beta_; }
  double eps_net() const { return eps_net_; }
  double eta() const { return eta_; }
  const std::vector<double>& grid() const { return grid_; }
  const std::vector<PauliString>& paulis() const { return paulis_; }
  double max_grid_value() const { return grid_.back(); }

  /// grid^(number of Paulis) as a double; may be astronomically large.
  double size_estimate() const {
    return std::pow(static_cast<double>(grid_.size()), static_cast<double>(paulis_.size()));
  }

  /// Exact size. Throws NetTooLarge when it exceeds `cap`.
  std::uint64_t size(std::uint64_t cap = kDefaultNetCap) const {
    const double est = size_estimate();
    if (est > static_cast<double>(cap)) {
      throw NetTooLarge("net has " + format_size(est) + " members, cap is " +
                        std::to_string(cap) +
                        "; use a coarser net spacing or fewer qubits");
    }
    std::uint64_t s = 1;
    for (std::size_t i = 0; i < paulis_.size(); ++i) s *= grid_.size();
    return s;
  }

  /// Decodes a member index. Requires the net to fit in 64 bits.
  LocalHamiltonian member(std::uint64_t index) const {
    const std::uint64_t radix = grid_.size();
    LocalHamiltonian::Terms terms;
    for (const auto& p : paulis_) {
      const double v = grid_[index % radix];
      index /= radix;
      if (v != 0.0) terms[p] = v;
    }
    if (index != 0) throw InvalidArgument("net index out of range");
    return LocalHamiltonian(n_, k_, terms);
  }

  /// Index of a member; throws when some coefficient is not a grid value.
  std::uint64_t encode(const LocalHamiltonian& h) const {
    check_shape(h);
    const std::uint64_t radix = grid_.size();
    if (size_estimate() >= 1.8e19) throw NetTooLarge("net index does not fit in 64 bits");
    std::uint64_t index = 0;
    for (auto it = paulis_.rbegin(); it != paulis_.rend(); ++it) {
      const double c = h.coefficient(*it);
      const std::size_t g = nearest(c);
      if (std::abs(grid_[g] - c) > 1e-9 * std::min(eta_, 1.0)) {
        throw InvalidArgument("coefficient " + std::to_string(c) + " of " + it->str() +
                              " is not on the net grid");
      }
      index = index * radix + g;
    }
    return index;
  }

  /// Member obtained by rounding each coefficient to the nearest grid value.
  LocalHamiltonian round(const LocalHamiltonian& h) const {
    check_shape(h);
    LocalHamiltonian::Terms terms;
    for (const auto& p : paulis_) {
      const double v = grid_[nearest(h.coefficient(p))];
      if (v != 0.0) terms[p] = v;
    }
    return LocalHamiltonian(n_, k_, terms);
  }

  /// Position of the grid value closest to v (values beyond the range clamp).
  std::size_t nearest(double v) const {
    const auto half = static_cast<long long>(grid_.size() / 2);
    if (!std::isfinite(eta_)) return 0;
    long long j = std::llround(v / eta_);
    j = std::clamp(j, -half, half);
    return static_cast<std::size_t>(j + half);
  }

  class Iterator {
   public:
    using iterator_category = std::input_iterator_tag;
    using value_type = LocalHamiltonian;
    using difference_type = std::ptrdiff_t;
    using pointer = void;
    using reference = LocalHamiltonian;

    Iterator(const NetIndex* net, std::uint64_t index) : net_(net), index_(index) {}
    LocalHamiltonian operator*() const { return net_->member(index_); }
    std::uint64_t index() const { return index_; }
    Iterator& operator++() {
      ++index_;
      return *this;
    }
    Iterator operator++(int) {
      Iterator old = *this;
      ++index_;
      return old;
    }
    friend bool operator==(const Iterator& a, const Iterator& b) { return a.index_ == b.index_; }

   private:
    const NetIndex* net_;
    std::uint64_t index_;
  };

  class Range {
   public:
    Range(const NetIndex* net, std::uint64_t size) : net_(net), size_(size) {}
    Iterator begin() const { return {net_, 0}; }
    Iterator end() const { return {net_, size_}; }
    std::uint64_t size() const { return size_; }

   private:
    const NetIndex* net_;
    std::uint64_t size_;
  };

 private:
  NetIndex(int n, int k, double beta, double eta, double eps_net)
      : n_(n), k_(k), beta_(beta), eps_net_(eps_net), eta_(eta) {
    if (n < 1 || k < 1 || k > n) throw InvalidArgument("net needs 1 <= k <= n");
    if (!(beta >= 0.0) || !std::isfinite(beta)) {
      throw InvalidArgument("net needs finite beta >= 0");
    }
    paulis_ = enumerate_local_paulis(n, k);
    const long long half =
        std::isfinite(eta) ? static_cast<long long>(std::floor(1.0 / eta + 1e-12)) : 0;
    for (long long j = -half; j <= half; ++j) {
      const double v = static_cast<double>(j) * (std::isfinite(eta) ? eta : 0.0);
      grid_.push_back(std::clamp(v, -1.0, 1.0));
    }
  }

  static double spacing_for(int n, int k, double beta, double eps_net) {
    if (!(eps_net > 0.0)) throw InvalidArgument("net needs eps_net > 0");
    if (beta == 0.0) return std::numeric_limits<double>::infinity();
    return eps_net / (200.0 * beta * std::pow(static_cast<double>(n), k));
  }

  static std::string format_size(double s) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", s);
    return buf;
  }

  void check_shape(const LocalHamiltonian& h) const {
    if (h.qubits() != n_) throw DimensionError("Hamiltonian and net have different n");
    for (const auto& [p, c] : h.terms()) {
      if (p.weight() > k_) throw InvalidArgument("term " + p.str() + " exceeds net locality");
    }
  }

  int n_;
  int k_;
  double beta_;
  double eps_net_;
  double eta_;
  std::vector<double> grid_;
  std::vector<PauliString> paulis_;
};

/// Every member of the net, lazily, in index order. Throws NetTooLarge
/// when the net exceeds `cap`.
inline NetIndex::Range net_iter(const NetIndex& net, std::uint64_t cap = kDefaultNetCap) {
  return NetIndex::Range(&net, net.size(cap));
}

}  // namespace hamcert
