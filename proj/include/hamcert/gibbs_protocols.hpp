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
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "hamcert/certify_dynamics.hpp"
#include "hamcert/error.hpp"
#include "hamcert/gibbs.hpp"
#include "hamcert/pauli.hpp"
#include "hamcert/rng.hpp"
#include "hamcert/shadows.hpp"

namespace hamcert {

/// sum_P ((h_i)_P - (h_j)_P) * estimate(P): estimates Tr[(H_i - H_j) rho].
inline double estimate_observable_gaps(const ShadowEstimate& sh, const LocalHamiltonian& hi,
                                       const LocalHamiltonian& hj) {
  if (hi.qubits() != hj.qubits() || hi.qubits() != sh.n) {
    throw DimensionError("estimate_observable_gaps: qubit counts differ");
  }
  const LocalHamiltonian diff = hi - hj;
  double acc = 0.0;
  for (const auto& [p, c] : diff.terms()) acc += c * sh.at(p);
  return acc;
}

namespace detail {

inline void check_unit_interval(double v, const char* what) {
  if (!(v > 0.0 && v < 1.0)) throw InvalidArgument(std::string(what) + " must be in (0, 1)");
}

inline double n_pow_k(int n, int k) { return std::pow(static_cast<double>(n), k); }

}  // namespace detail

/*******************************************************************************
 * Learning
 ******************************************************************************/

struct LearnConfig {
  int n = 1;
  int k = 1;
  double beta = 1.0;
  double eps = 0.2;
  double delta = 0.1;
  std::uint64_t seed = 0;
  // Replaces the net spacing eps'/(200 beta n^k), which is infeasibly fine
  // at any useful eps.
  std::optional<double> net_spacing;
  // May only raise the copy count above the requirement.
  std::optional<std::uint64_t> copies_override;
  double guarantee_factor = 5.0;  // trace-distance guarantee is factor * eps
  std::uint64_t net_cap = kDefaultNetCap;
  double shadow_constant = kShadowCopyConstant;

  double beta_floor() const { return std::max(beta, 1.0); }
  double net_eps() const { return eps * eps / (100.0 * beta_floor() * detail::n_pow_k(n, k)); }
  double gap_accuracy() const { return eps * eps / beta_floor(); }
  double per_pauli_accuracy() const { return gap_accuracy() / (200.0 * detail::n_pow_k(n, k)); }
  double guarantee() const { return guarantee_factor * eps; }

  std::uint64_t required_copies() const {
    return shadow_copies(n, k, per_pauli_accuracy(), delta, shadow_constant);
  }

  NetIndex net() const {
    return net_spacing ? NetIndex::with_spacing(n, k, beta, *net_spacing)
                       : NetIndex(n, k, beta, net_eps());
  }

  void validate() const {
    if (n < 1 || k < 1 || k > n) throw InvalidArgument("learn_gibbs: need 1 <= k <= n");
    if (!(beta >= 0.0) || !std::isfinite(beta)) throw InvalidArgument("learn_gibbs: beta >= 0");
    detail::check_unit_interval(eps, "learn_gibbs: eps");
    detail::check_unit_interval(delta, "learn_gibbs: delta");
    if (!(guarantee_factor > 0.0)) throw InvalidArgument("learn_gibbs: guarantee factor > 0");
  }
};

struct LearnResult {
  std::uint64_t index = 0;
  LocalHamiltonian hamiltonian{1, 1};
  GibbsState state;
  double objective = 0.0;  // max_{i,j} |gap estimate - Tr[dH_ij tau]| at the argmin
  std::uint64_t copies = 0;
  std::uint64_t net_size = 0;
  double eta = 0.0;
  double guarantee = 0.0;
  ShadowEstimate shadow;
};

/**
 * max over net pairs (i, j) of |sum_P (h_i - h_j)_P (s_P - Tr[P tau])|.
 * Each coefficient difference ranges independently over [-2g, 2g] with g
 * the largest grid value, so the maximum is 2g sum_P |s_P - Tr[P tau]|.
 */
inline double net_objective(const ShadowEstimate& sh, const DenseOperator& tau,
                            const NetIndex& net) {
  double l1 = 0.0;
  for (const auto& p : net.paulis()) l1 += std::abs(sh.at(p) - pauli_expectation(tau, p));
  return 2.0 * net.max_grid_value() * l1;
}

/**
 * Hypothesis selection over the covering net: acquire shadows accurate to
 * eps^2/(max(beta,1) 200 n^k) per Pauli, then return the net member whose
 * Gibbs state minimizes net_objective (ties to the smallest index).
 */
inline LearnResult learn_gibbs(ShadowSource& source, const LearnConfig& cfg) {
  cfg.validate();
  if (source.qubits() != cfg.n) throw DimensionError("learn_gibbs: source has wrong qubit count");
  const NetIndex net = cfg.net();
  const std::uint64_t size = net.size(cfg.net_cap);

  const std::uint64_t required = cfg.required_copies();
  std::uint64_t copies = required;
  if (cfg.copies_override) {
    if (*cfg.copies_override < required) {
      throw InsufficientCopies("learn_gibbs: " + std::to_string(*cfg.copies_override) +
                               " copies requested, at least " + std::to_string(required) +
                               " required");
    }
    copies = *cfg.copies_override;
  }

  LearnResult out;
  out.shadow = source.acquire(copies, cfg.k, cfg.delta, make_rng({cfg.seed, 0x1EA4ULL})());
  out.copies = copies;
  out.net_size = size;
  out.eta = net.eta();
  out.guarantee = cfg.guarantee();

  double best = std::numeric_limits<double>::infinity();
  for (auto it = net_iter(net, cfg.net_cap).begin(); it != net_iter(net, cfg.net_cap).end();
       ++it) {
    const GibbsState tau = gibbs_state(*it, cfg.beta);
    const double obj = net_objective(out.shadow, tau.rho, net);
    if (obj < best) {
      best = obj;
      out.index = it.index();
    }
  }
  out.hamiltonian = net.member(out.index);
  out.state = gibbs_state(out.hamiltonian, cfg.beta);
  out.objective = best;
  return out;
}

/*******************************************************************************
 * Certification
 ******************************************************************************/

struct GibbsCertifyConfig {
  int n = 1;
  int k = 1;
  double beta = 1.0;
  double eps = 0.5;
  double delta = 0.05;
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> copies_override;  // per state, may only raise
  // Reject configurations where the close radius reaches 2 eps, in which
  // case no pair of valid states can be far.
  bool assert_far_promise = false;
  double shadow_constant = kShadowCopyConstant;

  double scale() const { return 400.0 * beta * detail::n_pow_k(n, k); }
  double close_radius() const { return eps * eps / scale(); }
  double far_radius() const { return 2.0 * eps; }
  double per_pauli_accuracy() const { return eps * eps / (2.0 * scale()); }
  double threshold() const { return 3.0 * eps * eps / scale(); }

  /// Per state; each state's estimates get failure budget delta / 2.
  std::uint64_t required_copies() const {
    return shadow_copies(n, k, per_pauli_accuracy(), delta / 2.0, shadow_constant);
  }

  void validate() const {
    if (n < 1 || k < 1 || k > n) throw InvalidArgument("certify_gibbs: need 1 <= k <= n");
    if (!(beta >= 0.0) || !std::isfinite(beta)) throw InvalidArgument("certify_gibbs: beta >= 0");
    detail::check_unit_interval(eps, "certify_gibbs: eps");
    detail::check_unit_interval(delta, "certify_gibbs: delta");
    if (assert_far_promise && beta > 0.0 && close_radius() >= far_radius()) {
      throw InvalidArgument(
          "certify_gibbs: close radius eps^2/(400 beta n^k) >= 2 eps, so the far case cannot "
          "occur; drop the far promise or lower beta * n^k");
    }
  }
};

struct GibbsVerdict {
  Decision decision = Decision::Close;
  double max_gap = 0.0;  // max_P |estimate_rho(P) - estimate_rho0(P)|
  std::optional<PauliString> witness;
  double threshold = 0.0;
  std::uint64_t copies_per_state = 0;
};

/**
 * Decides trace distance <= eps^2/(400 beta n^k) (CLOSE) versus >= 2 eps
 * (FAR) from shadows of both states: FAR iff some weight-<=k Pauli has
 * estimate gap >= 3 eps^2/(400 beta n^k). At beta = 0 both states are
 * maximally mixed and CLOSE is returned without measuring.
 */
inline GibbsVerdict certify_gibbs(ShadowSource& rho, ShadowSource& rho0,
                                  const GibbsCertifyConfig& cfg) {
  cfg.validate();
  if (rho.qubits() != cfg.n || rho0.qubits() != cfg.n) {
    throw DimensionError("certify_gibbs: sources have wrong qubit count");
  }
  GibbsVerdict out;
  if (cfg.beta == 0.0) return out;

  const std::uint64_t required = cfg.required_copies();
  std::uint64_t copies = required;
  if (cfg.copies_override) {
    if (*cfg.copies_override < required) {
      throw InsufficientCopies("certify_gibbs: " + std::to_string(*cfg.copies_override) +
                               " copies per state requested, at least " +
                               std::to_string(required) + " required");
    }
    copies = *cfg.copies_override;
  }
  const double half = cfg.delta / 2.0;
  const ShadowEstimate a = rho.acquire(copies, cfg.k, half, make_rng({cfg.seed, 1})());
  const ShadowEstimate b = rho0.acquire(copies, cfg.k, half, make_rng({cfg.seed, 2})());

  out.threshold = cfg.threshold();
  out.copies_per_state = copies;
  for (const auto& p : enumerate_local_paulis(cfg.n, cfg.k)) {
    const double gap = std::abs(a.at(p) - b.at(p));
    if (!out.witness || gap > out.max_gap) {
      out.max_gap = gap;
      out.witness = p;
    }
  }
  out.decision = out.max_gap >= out.threshold ? Decision::Far : Decision::Close;
  return out;
}

}  // namespace hamcert
