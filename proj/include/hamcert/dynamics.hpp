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
#include <utility>

#include "hamcert/error.hpp"
#include "hamcert/linalg.hpp"
#include "hamcert/pauli.hpp"
#include "hamcert/rng.hpp"

namespace hamcert {

/*******************************************************************************
 * Bell-sampling identity probability
 ******************************************************************************/

/**
 * Probability of the all-identity outcome when Bell sampling exp(-i dH t):
 *
 *   I(t) = 4^-n sum_{r,s} cos((l_r - l_s) t)
 *
 * evaluated as the literal double sum over eigenvalue pairs.
 */
inline double identity_probability_spectral(const Spectrum& spec, double t) {
  if (!(t >= 0.0)) throw InvalidArgument("identity_probability: t must be >= 0");
  const Eigen::Index d = spec.dim();
  double acc = 0.0;
  for (Eigen::Index r = 0; r < d; ++r) {
    const double lr = spec.eigenvalues(r);
    acc += 1.0;  // r == s
    for (Eigen::Index s = r + 1; s < d; ++s) {
      acc += 2.0 * std::cos((lr - spec.eigenvalues(s)) * t);
    }
  }
  const double v = acc / (static_cast<double>(d) * static_cast<double>(d));
  return std::clamp(v, 0.0, 1.0);
}

/// Same quantity as |sum_s exp(-i l_s t)|^2 / 4^n, O(2^n) per call. Used for
/// dense t-sweeps.
inline double identity_probability_fast(const Spectrum& spec, double t) {
  Complex acc = 0.0;
  for (Eigen::Index s = 0; s < spec.dim(); ++s) acc += std::polar(1.0, -spec.eigenvalues(s) * t);
  const double d = static_cast<double>(spec.dim());
  return std::clamp(std::norm(acc) / (d * d), 0.0, 1.0);
}

/// |Tr exp(-i dH t)|^2 / 4^n through the dense matrix exponential.
inline double identity_probability_trace(const DenseOperator& delta_h, double t) {
  const Complex tr = exp_i_hermitian(delta_h, t).trace();
  const double d = static_cast<double>(delta_h.dim());
  return std::norm(tr) / (d * d);
}

/// |<I|U>|^2 with <I|U> = Tr[U]/2^n: identity weight of a unitary.
inline double identity_weight(const DenseOperator& u) {
  const double d = static_cast<double>(u.dim());
  return std::clamp(std::norm(u.trace()) / (d * d), 0.0, 1.0);
}

/**
 * Fraction of ordered eigenvalue pairs (r, s) with |l_r - l_s| >= eps.
 * Eigenvalues are sorted, so each row is counted with a binary search.
 */
inline double separated_pair_fraction(const Spectrum& spec, double eps) {
  if (!(eps > 0.0)) throw InvalidArgument("separated_pair_fraction: eps must be > 0");
  const Eigen::Index d = spec.dim();
  const double* begin = spec.eigenvalues.data();
  const double* end = begin + d;
  std::uint64_t count = 0;
  for (Eigen::Index r = 0; r < d; ++r) {
    const double lr = spec.eigenvalues(r);
    // l_s <= lr - eps  or  l_s >= lr + eps
    const auto low = std::upper_bound(begin, end, lr - eps) - begin;
    const auto high = end - std::lower_bound(begin, end, lr + eps);
    count += static_cast<std::uint64_t>(low + high);
  }
  return static_cast<double>(count) /
         (static_cast<double>(d) * static_cast<double>(d));
}

struct IdentityLowerBound {
  double identity_probability;
  double lower_bound;  // 1 - t^2 ||dH||_F^2
};

/// Evaluates both sides of I(t) >= 1 - t^2 ||dH||_F^2.
inline IdentityLowerBound frobenius_lower_bound_check(const Spectrum& spec, double t) {
  const double f = spec.frobenius();
  return {identity_probability_spectral(spec, t), 1.0 - t * t * f * f};
}

/*******************************************************************************
 * Resource accounting
 ******************************************************************************/

/**
 * Resources consumed by time-evolution experiments. "Target" is the hidden
 * Hamiltonian H; "reference" is the known H0 used in the Trotter product.
 */
struct Ledger {
  double target_evolution_time = 0.0;
  double reference_evolution_time = 0.0;
  std::uint64_t target_queries = 0;
  std::uint64_t reference_queries = 0;
  std::uint64_t experiments = 0;
  // Minimum queried duration; +inf until a query with t > 0 happens.
  double time_resolution = std::numeric_limits<double>::infinity();

  double total_evolution_time() const {
    return target_evolution_time + reference_evolution_time;
  }
  std::uint64_t query_count() const { return target_queries + reference_queries; }

  void merge(const Ledger& o) {
    target_evolution_time += o.target_evolution_time;
    reference_evolution_time += o.reference_evolution_time;
    target_queries += o.target_queries;
    reference_queries += o.reference_queries;
    experiments += o.experiments;
    time_resolution = std::min(time_resolution, o.time_resolution);
  }

  /// Counter differences against an earlier snapshot. The resolution field
  /// is left cumulative; callers that need a per-run value set it.
  Ledger since(const Ledger& before) const {
    Ledger d = *this;
    d.target_evolution_time -= before.target_evolution_time;
    d.reference_evolution_time -= before.reference_evolution_time;
    d.target_queries -= before.target_queries;
    d.reference_queries -= before.reference_queries;
    d.experiments -= before.experiments;
    return d;
  }
};

/// What one execution of a circuit costs against the oracle.
struct ExperimentCost {
  double target_time = 0.0;
  double reference_time = 0.0;
  std::uint64_t target_queries = 0;
  std::uint64_t reference_queries = 0;
  double min_query_time = std::numeric_limits<double>::infinity();

  void charge(Ledger& ledger, std::uint64_t runs) const {
    const double r = static_cast<double>(runs);
    ledger.target_evolution_time += r * target_time;
    ledger.reference_evolution_time += r * reference_time;
    ledger.target_queries += runs * target_queries;
    ledger.reference_queries += runs * reference_queries;
    ledger.experiments += runs;
    if (runs > 0) ledger.time_resolution = std::min(ledger.time_resolution, min_query_time);
  }
};

/*******************************************************************************
 * Trotterization
 ******************************************************************************/

/**
 * V = (exp(-itH/2l) exp(itH0/l) exp(-itH/2l))^l from precomputed spectra
 * (with eigenvectors) of H and H0.
 */
inline DenseOperator trotter_unitary(const Spectrum& h, const Spectrum& h0, double t,
                                     std::uint64_t steps) {
  if (steps < 1) throw InvalidArgument("trotter_unitary: need at least one step");
  if (h.dim() != h0.dim()) throw DimensionError("trotter_unitary: dimension mismatch");
  const double l = static_cast<double>(steps);
  const Matrix half = exp_i_hermitian(h, t / (2.0 * l)).matrix();
  const Matrix back = exp_i_hermitian(h0, -t / l).matrix();
  const Matrix step = half * back * half;
  return DenseOperator(matrix_power(step, steps));
}

inline DenseOperator trotter_unitary(const LocalHamiltonian& h, const LocalHamiltonian& h0,
                                     double t, std::uint64_t steps) {
  if (h.qubits() != h0.qubits()) {
    throw DimensionError("trotter_unitary: H and H0 act on different qubit counts");
  }
  return trotter_unitary(eig_hermitian(to_dense(h)), eig_hermitian(to_dense(h0)), t, steps);
}

/// ||exp(-it(H - H0)) - V||_op for the l-step product.
inline double trotter_error(const Spectrum& h, const Spectrum& h0, const DenseOperator& delta,
                            double t, std::uint64_t steps) {
  const DenseOperator exact = exp_i_hermitian(delta, t);
  return operator_norm(exact - trotter_unitary(h, h0, t, steps));
}

/**
 * Analytic step count l = ceil(c0 sqrt((c t)^3 / eps)), at least 1.
 * With c >= max(||H||, ||H0||) and c0 = 1 the symmetric product error is
 * at most eps / 2 (nested-commutator bound).
 */
inline std::uint64_t trotter_steps(double c_op, double t, double eps_trott,
                                   double constant = 1.0) {
  if (!(eps_trott > 0.0)) throw InvalidArgument("trotter_steps: eps_trott must be > 0");
  if (!(c_op >= 0.0) || !(t >= 0.0) || !(constant > 0.0)) {
    throw InvalidArgument("trotter_steps: c_op, t must be >= 0 and constant > 0");
  }
  const double ct = c_op * t;
  const double raw = std::ceil(constant * std::sqrt(ct * ct * ct / eps_trott));
  if (raw > 1e15) throw InvalidArgument("trotter_steps: step count overflows");
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(raw));
}

struct TrotterStepChoice {
  std::uint64_t steps;           // doubling-search result
  std::uint64_t analytic_steps;  // closed-form result
  double measured_error;         // error at `steps`
  double analytic_error;         // error at `analytic_steps`
};

/**
 * Desk-scale variant: doubles l from 1 until the measured operator-norm
 * error is <= eps_trott, and also measures the analytic l. Throws when the
 * analytic count fails the bound (the constant is too small for this
 * instance).
 */
inline TrotterStepChoice trotter_steps_checked(const LocalHamiltonian& h,
                                               const LocalHamiltonian& h0, double c_op,
                                               double t, double eps_trott,
                                               double constant = 1.0) {
  const std::uint64_t analytic = trotter_steps(c_op, t, eps_trott, constant);
  const Spectrum sh = eig_hermitian(to_dense(h));
  const Spectrum sh0 = eig_hermitian(to_dense(h0));
  const DenseOperator delta = to_dense(h) - to_dense(h0);
  std::uint64_t l = 1;
  double err = trotter_error(sh, sh0, delta, t, l);
  while (err > eps_trott) {
    if (l >= (std::uint64_t{1} << 40)) {
      throw Error("trotter_steps_checked: no step count below 2^40 meets the bound");
    }
    l *= 2;
    err = trotter_error(sh, sh0, delta, t, l);
  }
  const double analytic_err = trotter_error(sh, sh0, delta, t, analytic);
  if (analytic_err > eps_trott) {
    throw Error("trotter_steps_checked: analytic step count " + std::to_string(analytic) +
                " gives error " + std::to_string(analytic_err) + " > " +
                std::to_string(eps_trott) + "; raise the Trotter constant");
  }
  return {l, analytic, err, analytic_err};
}

/*******************************************************************************
 * Oracle access and the identity-probability estimator
 ******************************************************************************/

enum class NoiseMode { None, RandomShift, AdversarialLow, AdversarialHigh };

inline std::string to_string(NoiseMode m) {
  switch (m) {
    case NoiseMode::None: return "none";
    case NoiseMode::RandomShift: return "random";
    case NoiseMode::AdversarialLow: return "adversarial-low";
    case NoiseMode::AdversarialHigh: return "adversarial-high";
  }
  return "none";
}

inline NoiseMode noise_mode_from_string(const std::string& s) {
  if (s == "none") return NoiseMode::None;
  if (s == "random") return NoiseMode::RandomShift;
  if (s == "adversarial-low") return NoiseMode::AdversarialLow;
  if (s == "adversarial-high") return NoiseMode::AdversarialHigh;
  throw InvalidArgument("unknown noise mode '" + s +
                        "' (none, random, adversarial-low, adversarial-high)");
}

/**
 * SPAM error as a bounded bias on the identity-outcome probability of one
 * estimate. RandomShift draws one uniform shift in [-b, b] per estimate;
 * the adversarial modes apply -b or +b.
 */
struct NoiseModel {
  double spam_budget = 0.0;
  NoiseMode mode = NoiseMode::None;

  void validate() const {
    if (!(spam_budget >= 0.0) || !std::isfinite(spam_budget)) {
      throw InvalidArgument("spam budget must be a finite value >= 0");
    }
  }

  double shift(Rng& rng) const {
    switch (mode) {
      case NoiseMode::None: return 0.0;
      case NoiseMode::RandomShift:
        return spam_budget == 0.0
                   ? 0.0
                   : std::uniform_real_distribution<double>(-spam_budget, spam_budget)(rng);
      case NoiseMode::AdversarialLow: return -spam_budget;
      case NoiseMode::AdversarialHigh: return spam_budget;
    }
    return 0.0;
  }
};

class EvolutionOracle;

/// A unitary built from oracle queries, plus what one run of it costs.
class EvolutionCircuit {
 public:
  const DenseOperator& unitary() const { return unitary_; }
  const ExperimentCost& cost() const { return cost_; }

  /// Records `runs` executions against the oracle's ledger.
  void charge(std::uint64_t runs) const { cost_.charge(*ledger_, runs); }

 private:
  friend class EvolutionOracle;
  EvolutionCircuit(DenseOperator u, ExperimentCost cost, Ledger* ledger)
      : unitary_(std::move(u)), cost_(cost), ledger_(ledger) {}

  DenseOperator unitary_;
  ExperimentCost cost_;
  Ledger* ledger_;
};

/**
 * Time-evolution access to a hidden Hamiltonian. Circuits charge the
 * oracle's ledger when they are executed, never when they are built.
 */
class EvolutionOracle {
 public:
  explicit EvolutionOracle(LocalHamiltonian target)
      : target_(std::move(target)), spectrum_(eig_hermitian(to_dense(target_))) {}

  // The ledger is referenced by circuits; the oracle is pinned in memory.
  EvolutionOracle(const EvolutionOracle&) = delete;
  EvolutionOracle& operator=(const EvolutionOracle&) = delete;

  int qubits() const { return target_.qubits(); }
  const Ledger& ledger() const { return ledger_; }

  /// One query of exp(-itH), charged immediately.
  DenseOperator query(double t) {
    if (!(t >= 0.0)) throw InvalidArgument("query: t must be >= 0");
    if (t > 0.0) {
      ledger_.target_evolution_time += t;
      ledger_.target_queries += 1;
      ledger_.time_resolution = std::min(ledger_.time_resolution, t);
    }
    return exp_i_hermitian(spectrum_, t);
  }

  /**
   * Circuit for the l-step symmetric product approximating
   * exp(-it(H - H0)): 2l queries to H at t/2l, l evolutions under -H0 at t/l.
   */
  EvolutionCircuit trotterized_difference(const Spectrum& h0, double t,
                                          std::uint64_t steps) {
    if (h0.dim() != spectrum_.dim()) {
      throw DimensionError("oracle acts on " + std::to_string(qubits()) +
                           " qubits but H0 has dimension " + std::to_string(h0.dim()));
    }
    if (!(t >= 0.0)) throw InvalidArgument("trotterized_difference: t must be >= 0");
    ExperimentCost cost;
    if (t > 0.0) {
      const double l = static_cast<double>(steps);
      cost.target_time = t;
      cost.reference_time = t;
      cost.target_queries = 2 * steps;
      cost.reference_queries = steps;
      cost.min_query_time = t / (2.0 * l);
    }
    return EvolutionCircuit(trotter_unitary(spectrum_, h0, t, steps), cost, &ledger_);
  }

  EvolutionCircuit trotterized_difference(const LocalHamiltonian& h0, double t,
                                          std::uint64_t steps) {
    return trotterized_difference(eig_hermitian(to_dense(h0)), t, steps);
  }

 private:
  LocalHamiltonian target_;
  Spectrum spectrum_;
  Ledger ledger_;
};

/// Shots so a mean of Bernoulli draws is within `accuracy` w.p. >= 1 - failure.
inline std::uint64_t hoeffding_shots(double accuracy, double failure) {
  if (!(accuracy > 0.0) || !(failure > 0.0 && failure < 1.0)) {
    throw InvalidArgument("hoeffding_shots: need accuracy > 0 and failure in (0,1)");
  }
  return static_cast<std::uint64_t>(
      std::ceil(std::log(2.0 / failure) / (2.0 * accuracy * accuracy)));
}

struct IdentityEstimate {
  double estimate;   // empirical frequency of the identity outcome
  double exact;      // |v_I|^2 of the circuit (simulator-side)
  double perturbed;  // exact after the SPAM shift, clamped to [0, 1]
};

/**
 * Runs `shots` Bell-sampling experiments on the circuit, each recording
 * only whether the identity outcome occurred. The count of identity
 * outcomes is drawn as Binomial(shots, p) in one call, which has the same
 * law as `shots` independent Bernoulli draws.
 */
inline IdentityEstimate estimate_identity_probability(const EvolutionCircuit& circuit,
                                                      std::uint64_t shots,
                                                      const NoiseModel& noise, Rng& rng) {
  if (shots < 1) throw InvalidArgument("estimate_identity_probability: shots must be >= 1");
  noise.validate();
  const double exact = identity_weight(circuit.unitary());
  const double p = std::clamp(exact + noise.shift(rng), 0.0, 1.0);
  std::uint64_t hits = 0;
  if (p >= 1.0) {
    hits = shots;
  } else if (p > 0.0) {
    hits = std::binomial_distribution<std::uint64_t>(shots, p)(rng);
  }
  circuit.charge(shots);
  return {static_cast<double>(hits) / static_cast<double>(shots), exact, p};
}

}  // namespace hamcert
