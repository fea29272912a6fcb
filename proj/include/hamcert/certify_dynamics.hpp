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
#include "hamcert/pauli.hpp"
#include "hamcert/rng.hpp"

namespace hamcert {

enum class Decision { Close, Far };

inline std::string to_string(Decision d) { return d == Decision::Close ? "CLOSE" : "FAR"; }

/**
 * Parameters of one tolerant-certification run. All thresholds are derived
 * from (eps, k) on every call.
 */
struct CertificationConfig {
  double eps = 0.5;
  int n = 1;
  int k = 1;
  int repetitions = 8;  // outer loop length N; (2/3)^8 < 0.04
  double c_op = 1.0;    // bound on ||H||_op and ||H0||_op, for Trotter sizing
  NoiseModel noise{};
  std::uint64_t seed = 0;
  double trotter_constant = 1.0;
  // Union-bound budget for estimate failures, split evenly over the N
  // estimates: each estimate fails with probability <= failure_budget / N.
  double failure_budget = 0.05;

  double nine_k() const { return std::pow(9.0, k); }
  double trotter_tolerance() const { return 1.0 / (384.0 * nine_k()); }
  double estimate_accuracy() const { return 1.0 / (192.0 * nine_k()); }
  double decision_threshold() const { return 1.0 - 7.0 / (96.0 * nine_k()); }
  double close_radius() const { return eps / (8.0 * std::pow(3.0, k)); }
  double max_time() const { return 2.0 / eps; }

  std::uint64_t shots_per_estimate() const {
    return hoeffding_shots(estimate_accuracy(), failure_budget / repetitions);
  }

  void validate() const {
    if (!(eps > 0.0) || !std::isfinite(eps)) throw InvalidArgument("certify: eps must be > 0");
    if (n < 1 || k < 1 || k > n) throw InvalidArgument("certify: need 1 <= k <= n");
    if (repetitions < 1) throw InvalidArgument("certify: repetitions must be >= 1");
    if (!(c_op >= 0.0) || !std::isfinite(c_op)) {
      throw InvalidArgument("certify: c_op must be finite and >= 0");
    }
    if (!(failure_budget > 0.0 && failure_budget < 1.0)) {
      throw InvalidArgument("certify: failure budget must be in (0, 1)");
    }
    noise.validate();
  }
};

struct IterationRecord {
  double t;
  std::uint64_t steps;
  std::uint64_t shots;
  double estimate;
};

struct Verdict {
  Decision decision = Decision::Close;
  std::vector<IterationRecord> transcript;
  Ledger ledger;  // resources consumed by this run only
};

namespace detail {

inline int max_weight(const LocalHamiltonian& h) {
  int w = 0;
  for (const auto& [p, c] : h.terms()) w = std::max(w, p.weight());
  return w;
}

inline Verdict certify_with_spectrum(const Spectrum& h0_spectrum, EvolutionOracle& oracle,
                                     const CertificationConfig& cfg) {
  Rng rng = make_rng({cfg.seed, 0xCE27ULL});
  std::uniform_real_distribution<double> time_dist(0.0, cfg.max_time());
  const std::uint64_t shots = cfg.shots_per_estimate();
  const double threshold = cfg.decision_threshold();
  const Ledger before = oracle.ledger();

  Verdict v;
  double resolution = std::numeric_limits<double>::infinity();
  for (int i = 0; i < cfg.repetitions; ++i) {
    const double t = time_dist(rng);
    const std::uint64_t steps =
        trotter_steps(cfg.c_op, t, cfg.trotter_tolerance(), cfg.trotter_constant);
    const EvolutionCircuit circuit = oracle.trotterized_difference(h0_spectrum, t, steps);
    const IdentityEstimate est = estimate_identity_probability(circuit, shots, cfg.noise, rng);
    v.transcript.push_back({t, steps, shots, est.estimate});
    resolution = std::min(resolution, circuit.cost().min_query_time);
    if (est.estimate <= threshold) {
      v.decision = Decision::Far;
      break;
    }
  }
  v.ledger = oracle.ledger().since(before);
  v.ledger.time_resolution = resolution;
  return v;
}

}  // namespace detail

/**
 * Tolerant certification of a k-local Hamiltonian from time-evolution
 * access. Decides ||H - H0||_F <= eps/(8*3^k) (CLOSE) versus >= eps (FAR)
 * with success probability >= 0.9.
 *
 * Each of the N iterations samples t ~ U[0, 2/eps], builds the symmetric
 * Trotter product for exp(-it(H - H0)) at tolerance 1/(384*9^k), estimates
 * its identity probability to 1/(192*9^k) and returns FAR as soon as an
 * estimate is <= 1 - 7/(96*9^k).
 */
inline Verdict certify(const LocalHamiltonian& h0, EvolutionOracle& oracle,
                       const CertificationConfig& cfg) {
  cfg.validate();
  if (h0.qubits() != cfg.n || oracle.qubits() != cfg.n) {
    throw DimensionError("certify: config has n=" + std::to_string(cfg.n) + ", H0 has " +
                         std::to_string(h0.qubits()) + ", oracle has " +
                         std::to_string(oracle.qubits()) + " qubits");
  }
  if (detail::max_weight(h0) > cfg.k) {
    throw InvalidArgument("certify: H0 has terms of weight > k=" + std::to_string(cfg.k));
  }
  return detail::certify_with_spectrum(eig_hermitian(to_dense(h0)), oracle, cfg);
}

/**
 * Number of independent runs for a majority vote with failure <= delta
 * from per-run success 0.9: Hoeffding gives exp(-2R(0.4)^2) <= delta.
 * For delta >= 0.1 one run already suffices. Always odd.
 */
inline int amplification_runs(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw InvalidArgument("amplification: delta must be in (0, 1)");
  }
  if (delta >= 0.1) return 1;
  int r = static_cast<int>(std::ceil(std::log(1.0 / delta) / (2.0 * 0.4 * 0.4)));
  if (r % 2 == 0) ++r;
  return r;
}

struct AmplifiedVerdict {
  Decision decision = Decision::Close;
  int far_votes = 0;
  std::vector<Verdict> runs;
  Ledger ledger;  // sum over runs
};

/// Majority vote over amplification_runs(delta) runs with derived seeds.
inline AmplifiedVerdict certify_amplified(const LocalHamiltonian& h0, EvolutionOracle& oracle,
                                          const CertificationConfig& cfg, double delta) {
  const int runs = amplification_runs(delta);
  cfg.validate();
  if (h0.qubits() != cfg.n || oracle.qubits() != cfg.n) {
    throw DimensionError("certify_amplified: qubit counts disagree with config");
  }
  const Spectrum h0_spectrum = eig_hermitian(to_dense(h0));
  AmplifiedVerdict out;
  for (int r = 0; r < runs; ++r) {
    CertificationConfig run_cfg = cfg;
    run_cfg.seed = make_rng({cfg.seed, static_cast<std::uint64_t>(r), 0xA3ULL})();
    Verdict v = detail::certify_with_spectrum(h0_spectrum, oracle, run_cfg);
    out.far_votes += v.decision == Decision::Far;
    out.ledger.merge(v.ledger);
    out.runs.push_back(std::move(v));
  }
  out.decision = 2 * out.far_votes > runs ? Decision::Far : Decision::Close;
  return out;
}

}  // namespace hamcert
