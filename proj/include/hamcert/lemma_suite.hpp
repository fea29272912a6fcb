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
#include <random>
#include <string>
#include <vector>

#include "hamcert/dynamics.hpp"
#include "hamcert/error.hpp"
#include "hamcert/linalg.hpp"
#include "hamcert/pauli.hpp"
#include "hamcert/rng.hpp"

namespace hamcert {

/// Fraction of `draws` uniform t in [0, 2/eps] with I(t) <= level.
inline double fraction_below(const Spectrum& spec, double eps, double level,
                             std::uint64_t draws, Rng& rng) {
  if (!(eps > 0.0)) throw InvalidArgument("fraction_below: eps must be > 0");
  if (draws == 0) throw InvalidArgument("fraction_below: draws must be >= 1");
  std::uniform_real_distribution<double> time_dist(0.0, 2.0 / eps);
  std::uint64_t hits = 0;
  for (std::uint64_t i = 0; i < draws; ++i) {
    hits += identity_probability_fast(spec, time_dist(rng)) <= level;
  }
  return static_cast<double>(hits) / static_cast<double>(draws);
}

/// Empirical Pr_t[I(t) <= 1 - Lambda(dH, eps)/4] over t ~ U[0, 2/eps].
inline double spectral_condition_fraction(const Spectrum& spec, double eps,
                                          std::uint64_t draws, Rng& rng) {
  const double lambda = separated_pair_fraction(spec, eps);
  return fraction_below(spec, eps, 1.0 - lambda / 4.0, draws, rng);
}

struct PaleyZygmundTerms {
  double probability;  // Pr_{r,s}[F^2 > E F^2 / 2]
  double bound;        // (E F^2)^2 / (4 E F^4)
};

/// Exhaustive evaluation over all eigenvalue pairs, Z = F(r,s)^2, theta = 1/2.
inline PaleyZygmundTerms paley_zygmund_terms(const Spectrum& spec) {
  const Eigen::Index d = spec.dim();
  double m2 = 0.0, m4 = 0.0;
  for (Eigen::Index r = 0; r < d; ++r) {
    for (Eigen::Index s = 0; s < d; ++s) {
      const double f2 = std::pow(spec.eigenvalues(r) - spec.eigenvalues(s), 2);
      m2 += f2;
      m4 += f2 * f2;
    }
  }
  const double pairs = static_cast<double>(d) * static_cast<double>(d);
  m2 /= pairs;
  m4 /= pairs;
  if (m4 == 0.0) return {0.0, 0.0};
  std::uint64_t above = 0;
  for (Eigen::Index r = 0; r < d; ++r) {
    for (Eigen::Index s = 0; s < d; ++s) {
      above += std::pow(spec.eigenvalues(r) - spec.eigenvalues(s), 2) > 0.5 * m2;
    }
  }
  return {static_cast<double>(above) / pairs, m2 * m2 / (4.0 * m4)};
}

/// One inequality tracked over many instances. A margin is rhs - lhs
/// oriented so that a satisfied inequality has margin >= 0.
struct InequalityCheck {
  std::string name;
  std::uint64_t evaluations = 0;
  std::uint64_t violations = 0;
  double worst_margin = std::numeric_limits<double>::infinity();

  void record(double margin, double slack) {
    ++evaluations;
    worst_margin = std::min(worst_margin, margin);
    if (margin < -slack) ++violations;
  }
  bool passed() const { return violations == 0; }
};

struct LemmaSuiteOptions {
  double t_max = 10.0;                 // range for the exact identities
  std::uint64_t t_draws = 4000;        // per instance, statistical checks
  double statistical_slack = 0.05;     // below 1/3 for the t-fraction checks
  double numeric_slack = 1e-9;
};

struct LemmaReport {
  std::uint64_t instances = 0;
  std::vector<InequalityCheck> checks;

  bool passed() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const InequalityCheck& c) { return c.passed(); });
  }
  std::uint64_t violations() const {
    std::uint64_t v = 0;
    for (const auto& c : checks) v += c.violations;
    return v;
  }
  InequalityCheck& at(const std::string& name) {
    for (auto& c : checks) {
      if (c.name == name) return c;
    }
    checks.push_back({name});
    return checks.back();
  }
  const InequalityCheck* find(const std::string& name) const {
    for (const auto& c : checks) {
      if (c.name == name) return &c;
    }
    return nullptr;
  }
};

/**
 * Runs every dynamics inequality on one instance dH with declared
 * locality k. Checks that need ||dH||_F > 0 are skipped for dH = 0.
 */
inline void check_lemma_instance(const LocalHamiltonian& dh, Rng& rng,
                                 const LemmaSuiteOptions& opt, LemmaReport& report) {
  const int k = dh.locality();
  const double nine_k = std::pow(9.0, k);
  const double tol = opt.numeric_slack;
  const DenseOperator dense = to_dense(dh);
  const Spectrum spec = eig_hermitian(dense);
  const double f = spec.frobenius();
  std::uniform_real_distribution<double> t_dist(0.0, opt.t_max);
  ++report.instances;

  {
    const double t = t_dist(rng);
    const double spectral = identity_probability_spectral(spec, t);
    const double trace = identity_probability_trace(dense, t);
    const double fast = identity_probability_fast(spec, t);
    report.at("two_path_identity").record(tol - std::abs(spectral - trace), 0.0);
    report.at("fast_path_identity").record(tol - std::abs(spectral - fast), 0.0);

    report.at("frobenius_lower_bound").record(spectral - (1.0 - t * t * f * f), tol);

    const DenseOperator u = exp_i_hermitian(spec, t);
    const double dist = frobenius_normalized(u - DenseOperator::identity(dh.qubits()));
    report.at("identity_vs_distance").record(spectral - (1.0 - dist * dist), tol);
    report.at("duhamel").record(t * f - dist, tol * std::max(1.0, t * f));
  }

  if (f == 0.0) return;

  const double m2 = spec.normalized_moment_norm(2.0);
  const double m4 = spec.normalized_moment_norm(4.0);
  const double bonami_rhs = nine_k * std::pow(m2, 4);
  report.at("bonami").record(bonami_rhs - std::pow(m4, 4), tol * bonami_rhs);

  const PaleyZygmundTerms pz = paley_zygmund_terms(spec);
  report.at("paley_zygmund").record(pz.probability - pz.bound, tol);

  // Pairs whose gap equals ||dH||_F up to rounding still count as separated.
  const double lambda = separated_pair_fraction(spec, f * (1.0 - tol));
  report.at("separated_pairs_lower_bound").record(lambda - 1.0 / (3.0 * nine_k), 0.0);

  const double third = 1.0 / 3.0 - opt.statistical_slack;
  report.at("spectral_condition")
      .record(spectral_condition_fraction(spec, f, opt.t_draws, rng) - third, 0.0);
  report.at("far_detector")
      .record(fraction_below(spec, f, 1.0 - 1.0 / (12.0 * nine_k), opt.t_draws, rng) - third,
              0.0);

  // Close floor: rescale so ||dH||_F = eps/(8*3^k) with eps = 1; the worst
  // t in [0, 2] for the lower bound is the endpoint.
  {
    const double eps = 1.0;
    const double radius = eps / (8.0 * std::pow(3.0, k));
    Spectrum scaled = spec;
    scaled.eigenvalues *= radius / f;
    scaled.eigenvectors.reset();
    std::uniform_real_distribution<double> close_t(0.0, 2.0 / eps);
    const double floor = 1.0 - 1.0 / (16.0 * nine_k);
    double worst = identity_probability_spectral(scaled, 2.0 / eps);
    for (int i = 0; i < 16; ++i) {
      worst = std::min(worst, identity_probability_spectral(scaled, close_t(rng)));
    }
    report.at("close_floor").record(worst - floor, tol);
  }
}

/**
 * Instance i of the property sweep, checked into `report`. Instance i has
 * random sparsity and a random overall scale in [1e-2, 10]; instance 0 is
 * dH = 0 and instance 1 is the near-degenerate 1e-6 * Z on site 0.
 */
inline void check_lemma_sample(std::uint64_t i, int n, int k, std::uint64_t seed,
                               const LemmaSuiteOptions& opt, LemmaReport& report) {
  Rng rng = make_rng({seed, i, 0x1E33ULL});
  LocalHamiltonian dh(n, k);
  if (i == 1) {
    LocalHamiltonian::Terms t;
    t[PauliString("Z" + std::string(static_cast<std::size_t>(n - 1), 'I'))] = 1e-6;
    dh = LocalHamiltonian(n, k, t);
  } else if (i > 1) {
    const double sparsity = std::uniform_real_distribution<double>(0.2, 1.0)(rng);
    const double scale = std::pow(10.0, std::uniform_real_distribution<double>(-2.0, 1.0)(rng));
    dh = random_local_hamiltonian(n, k, 1.0, sparsity, draw_seed(rng)).scaled(scale);
  }
  check_lemma_instance(dh, rng, opt, report);
}

/// Adds `part` into `into`; counts add and worst margins take the minimum,
/// so merging is order-independent.
inline void merge_lemma_reports(LemmaReport& into, const LemmaReport& part) {
  into.instances += part.instances;
  for (const auto& c : part.checks) {
    InequalityCheck& d = into.at(c.name);
    d.evaluations += c.evaluations;
    d.violations += c.violations;
    d.worst_margin = std::min(d.worst_margin, c.worst_margin);
  }
}

inline void check_lemma_dims(int n, int k) {
  if (n < 1 || n > kMaxQubits || k < 1 || k > n) {
    throw InvalidArgument("verify_lemma_suite: need 1 <= k <= n <= " +
                          std::to_string(kMaxQubits));
  }
}

/// Batch property sweep over `samples` instances of check_lemma_sample.
inline LemmaReport verify_lemma_suite(std::uint64_t samples, int n, int k, std::uint64_t seed,
                                      const LemmaSuiteOptions& opt = {}) {
  check_lemma_dims(n, k);
  LemmaReport report;
  for (std::uint64_t i = 0; i < samples; ++i) check_lemma_sample(i, n, k, seed, opt, report);
  return report;
}

}  // namespace hamcert
