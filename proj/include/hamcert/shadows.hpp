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
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "hamcert/error.hpp"
#include "hamcert/gibbs.hpp"
#include "hamcert/linalg.hpp"
#include "hamcert/pauli.hpp"
#include "hamcert/rng.hpp"

namespace hamcert {

/// Largest register the shadow simulator tabulates (3^n bases x 2^n outcomes).
inline constexpr int kMaxShadowQubits = 8;

/**
 * Copy-count constant for random-Pauli shadows:
 *   copies = ceil(C * 3^k * k * ln(n/delta) / eps^2).
 * Frozen output of calibrate_shadow_constant() with its defaults.
 */
inline constexpr double kShadowCopyConstant = 2.05;

enum class SamplingMode {
  PerRound,    // one basis and one outcome drawn per copy
  Aggregated,  // per-batch multinomial over (basis, outcome) cells
};

/**
 * Outcome distributions p(o|b) of a state under every product Pauli basis.
 * Basis b has one digit per site (0 = X, 1 = Y, 2 = Z), site 0 most
 * significant; outcome o has one bit per site, site 0 most significant,
 * bit 1 meaning eigenvalue -1.
 */
class MeasurementTable {
 public:
  explicit MeasurementTable(const DenseOperator& rho) : n_(rho.qubits()) {
    if (n_ < 1 || n_ > kMaxShadowQubits) {
      throw InvalidArgument("shadows support 1 <= n <= " + std::to_string(kMaxShadowQubits));
    }
    const std::size_t nb = bases(), no = outcomes();
    probs_.assign(nb, std::vector<double>(no, 0.0));
    std::vector<double> f(no);
    std::vector<Pauli> word(static_cast<std::size_t>(n_));
    for (std::size_t b = 0; b < nb; ++b) {
      const std::vector<int> digits = basis_digits(b);
      // f(S) = Tr[P_{b,S} rho], P_{b,S} carrying the basis letter on S.
      for (std::size_t s = 0; s < no; ++s) {
        for (int i = 0; i < n_; ++i) {
          const bool on = (s >> (n_ - 1 - i)) & 1u;
          word[static_cast<std::size_t>(i)] =
              on ? static_cast<Pauli>(digits[static_cast<std::size_t>(i)] + 1) : Pauli::I;
        }
        f[s] = s == 0 ? 1.0 : pauli_expectation(rho, PauliString(word));
      }
      // p(o) = 2^-n sum_S (-1)^{|S & o|} f(S): a Walsh-Hadamard transform.
      for (std::size_t h = 1; h < no; h <<= 1) {
        for (std::size_t i = 0; i < no; i += 2 * h) {
          for (std::size_t j = i; j < i + h; ++j) {
            const double x = f[j], y = f[j + h];
            f[j] = x + y;
            f[j + h] = x - y;
          }
        }
      }
      double total = 0.0;
      for (std::size_t o = 0; o < no; ++o) {
        probs_[b][o] = std::max(f[o] / static_cast<double>(no), 0.0);
        total += probs_[b][o];
      }
      for (double& p : probs_[b]) p /= total;
      outcome_params_.emplace_back(probs_[b].begin(), probs_[b].end());
    }
  }

  int qubits() const { return n_; }
  std::size_t bases() const {
    std::size_t b = 1;
    for (int i = 0; i < n_; ++i) b *= 3;
    return b;
  }
  std::size_t outcomes() const { return std::size_t{1} << n_; }
  double probability(std::size_t basis, std::size_t outcome) const {
    return probs_[basis][outcome];
  }

  std::vector<int> basis_digits(std::size_t b) const {
    std::vector<int> d(static_cast<std::size_t>(n_));
    for (int i = n_ - 1; i >= 0; --i) {
      d[static_cast<std::size_t>(i)] = static_cast<int>(b % 3);
      b /= 3;
    }
    return d;
  }

  /// One measurement round: uniform basis, then an outcome from p(.|b).
  std::pair<std::size_t, std::size_t> sample(Rng& rng) const {
    const std::size_t b = std::uniform_int_distribution<std::size_t>(0, bases() - 1)(rng);
    std::discrete_distribution<std::size_t> dist;
    return {b, dist(rng, outcome_params_[b])};
  }

  /// Counts per cell (b * outcomes() + o) for `copies` rounds.
  std::vector<std::uint64_t> sample_counts(std::uint64_t copies, SamplingMode mode,
                                           Rng& rng) const {
    const std::size_t nb = bases(), no = outcomes();
    std::vector<std::uint64_t> counts(nb * no, 0);
    if (mode == SamplingMode::PerRound) {
      for (std::uint64_t c = 0; c < copies; ++c) {
        const auto [b, o] = sample(rng);
        ++counts[b * no + o];
      }
      return counts;
    }
    // Multinomial by sequential conditional binomials: first over bases
    // (uniform), then over outcomes within each basis.
    std::uint64_t remaining = copies;
    for (std::size_t b = 0; b < nb && remaining > 0; ++b) {
      std::uint64_t in_basis = remaining;
      if (b + 1 < nb) {
        in_basis = std::binomial_distribution<std::uint64_t>(
            remaining, 1.0 / static_cast<double>(nb - b))(rng);
      }
      remaining -= in_basis;
      double mass = 1.0;
      for (std::size_t o = 0; o < no && in_basis > 0; ++o) {
        const double p = probs_[b][o];
        std::uint64_t x = in_basis;
        if (o + 1 < no && p < mass) {
          x = p <= 0.0 ? 0
                       : std::binomial_distribution<std::uint64_t>(in_basis, p / mass)(rng);
        }
        counts[b * no + o] = x;
        in_basis -= x;
        mass -= p;
      }
    }
    return counts;
  }

 private:
  int n_;
  std::vector<std::vector<double>> probs_;
  std::vector<std::discrete_distribution<std::size_t>::param_type> outcome_params_;
};

/// Single-round estimator of Tr[P rho]: prod over supp(P) of 3 * (+-1) when
/// the measured basis matches P on its support, 0 otherwise.
inline double snapshot_value(const PauliString& p, const std::vector<int>& basis,
                             std::size_t outcome) {
  const int n = p.qubits();
  double v = 1.0;
  for (int i = 0; i < n; ++i) {
    const Pauli s = p[i];
    if (s == Pauli::I) continue;
    if (static_cast<int>(s) - 1 != basis[static_cast<std::size_t>(i)]) return 0.0;
    v *= ((outcome >> (n - 1 - i)) & 1u) ? -3.0 : 3.0;
  }
  return v;
}

struct ShadowEstimate {
  int n = 0;
  int k = 0;
  std::map<PauliString, double> estimates;  // Tr[P rho] = 2^n rho_P, identity included
  std::uint64_t copies_used = 0;
  std::uint64_t batches = 0;

  double at(const PauliString& p) const {
    auto it = estimates.find(p);
    if (it == estimates.end()) {
      throw InvalidArgument("shadow estimate has no entry for " + p.str());
    }
    return it->second;
  }
};

/// Median-of-means batch count for |P| simultaneous estimates at failure delta.
inline std::uint64_t shadow_batches(std::uint64_t num_paulis, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("shadows: delta must be in (0,1)");
  return static_cast<std::uint64_t>(
      std::ceil(2.0 * std::log(2.0 * static_cast<double>(num_paulis) / delta)));
}

/// Copies for every weight-<=k estimate within eps w.p. >= 1 - delta; never
/// fewer than the batch count.
inline std::uint64_t shadow_copies(int n, int k, double eps, double delta,
                                   double constant = kShadowCopyConstant) {
  if (n < 1 || k < 1 || k > n) throw InvalidArgument("shadows: need 1 <= k <= n");
  if (!(eps > 0.0)) throw InvalidArgument("shadows: eps must be > 0");
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("shadows: delta must be in (0,1)");
  if (!(constant > 0.0)) throw InvalidArgument("shadows: constant must be > 0");
  const double raw = constant * std::pow(3.0, k) * k *
                     std::log(static_cast<double>(n) / delta) / (eps * eps);
  if (!(raw < 1.8e19)) throw InsufficientCopies("shadow copy count overflows 64 bits");
  const auto copies = static_cast<std::uint64_t>(std::ceil(raw));
  return std::max(copies, shadow_batches(count_local_paulis(n, k), delta));
}

inline double median_of(std::vector<double> v) {
  const std::size_t m = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(m), v.end());
  if (v.size() % 2) return v[m];
  const double hi = v[m];
  return 0.5 * (hi + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(m)));
}

/**
 * Random-Pauli classical shadows of a tabulated state. Copies are split
 * into B = ceil(2 ln(2|P|/delta)) nearly equal batches; each weight-<=k
 * estimate is the median of the batch means of its snapshot values.
 */
inline ShadowEstimate shadow_acquire(const MeasurementTable& table, std::uint64_t copies, int k,
                                     double delta, std::uint64_t seed,
                                     SamplingMode mode = SamplingMode::Aggregated) {
  const int n = table.qubits();
  if (k < 1 || k > n) throw InvalidArgument("shadow_acquire: need 1 <= k <= n");
  const std::vector<PauliString> paulis = enumerate_local_paulis(n, k);
  const std::uint64_t batches = shadow_batches(paulis.size(), delta);
  if (copies < batches) {
    throw InsufficientCopies("shadow_acquire: " + std::to_string(copies) +
                             " copies cannot fill " + std::to_string(batches) + " batches");
  }
  Rng rng = make_rng({seed, 0x5AD0ULL});
  const std::size_t no = table.outcomes();
  std::vector<std::vector<int>> digits;
  for (std::size_t b = 0; b < table.bases(); ++b) digits.push_back(table.basis_digits(b));

  std::vector<std::vector<double>> means(paulis.size(), std::vector<double>(batches));
  for (std::uint64_t j = 0; j < batches; ++j) {
    const std::uint64_t m = copies / batches + (j < copies % batches ? 1 : 0);
    const std::vector<std::uint64_t> counts = table.sample_counts(m, mode, rng);
    for (std::size_t pi = 0; pi < paulis.size(); ++pi) {
      double sum = 0.0;
      for (std::size_t c = 0; c < counts.size(); ++c) {
        if (counts[c] == 0) continue;
        sum += static_cast<double>(counts[c]) * snapshot_value(paulis[pi], digits[c / no], c % no);
      }
      means[pi][j] = sum / static_cast<double>(m);
    }
  }

  ShadowEstimate out;
  out.n = n;
  out.k = k;
  out.copies_used = copies;
  out.batches = batches;
  out.estimates[PauliString::identity(n)] = 1.0;
  for (std::size_t pi = 0; pi < paulis.size(); ++pi) {
    out.estimates[paulis[pi]] = median_of(std::move(means[pi]));
  }
  return out;
}

inline ShadowEstimate shadow_acquire(const DenseOperator& rho, std::uint64_t copies, int k,
                                     double delta, std::uint64_t seed,
                                     SamplingMode mode = SamplingMode::Aggregated) {
  return shadow_acquire(MeasurementTable(rho), copies, k, delta, seed, mode);
}

/// The estimates an infinitely large shadow would converge to.
inline ShadowEstimate exact_shadow(const DenseOperator& rho, int k) {
  const int n = rho.qubits();
  ShadowEstimate out;
  out.n = n;
  out.k = k;
  out.estimates[PauliString::identity(n)] = 1.0;
  for (const auto& p : enumerate_local_paulis(n, k)) out.estimates[p] = pauli_expectation(rho, p);
  return out;
}

/// Largest |estimate - Tr[P rho]| over weight-<=k P.
inline double max_shadow_error(const ShadowEstimate& sh, const DenseOperator& rho) {
  double worst = 0.0;
  for (const auto& p : enumerate_local_paulis(sh.n, sh.k)) {
    worst = std::max(worst, std::abs(sh.at(p) - pauli_expectation(rho, p)));
  }
  return worst;
}

/**
 * Copy access to an unknown state, as seen by a protocol. Each acquire
 * consumes `copies` copies.
 */
class ShadowSource {
 public:
  virtual ~ShadowSource() = default;
  virtual int qubits() const = 0;
  virtual ShadowEstimate acquire(std::uint64_t copies, int k, double delta,
                                 std::uint64_t seed) = 0;
  std::uint64_t copies_consumed() const { return consumed_; }

 protected:
  std::uint64_t consumed_ = 0;
};

/// Simulated random-Pauli measurements on a known density matrix.
class SampledShadowSource : public ShadowSource {
 public:
  explicit SampledShadowSource(const DenseOperator& rho,
                               SamplingMode mode = SamplingMode::Aggregated)
      : table_(rho), mode_(mode) {}

  int qubits() const override { return table_.qubits(); }
  ShadowEstimate acquire(std::uint64_t copies, int k, double delta,
                         std::uint64_t seed) override {
    ShadowEstimate sh = shadow_acquire(table_, copies, k, delta, seed, mode_);
    consumed_ += copies;
    return sh;
  }

 private:
  MeasurementTable table_;
  SamplingMode mode_;
};

/// Returns exact expectations regardless of copies; for dry runs.
class ExactShadowSource : public ShadowSource {
 public:
  explicit ExactShadowSource(DenseOperator rho) : rho_(std::move(rho)) {}

  int qubits() const override { return rho_.qubits(); }
  ShadowEstimate acquire(std::uint64_t copies, int k, double, std::uint64_t) override {
    ShadowEstimate sh = exact_shadow(rho_, k);
    sh.copies_used = copies;
    consumed_ += copies;
    return sh;
  }

 private:
  DenseOperator rho_;
};

struct ShadowCalibration {
  std::vector<std::pair<double, double>> curve;  // (constant, all-within-eps rate)
  double constant;  // NaN when even the largest grid value misses the target
};

/**
 * Scans C over [lo, hi] in `step` increments at (n=3, k=2, eps=0.2,
 * delta=0.1). Run s uses the beta=1 Gibbs state of a random 2-local H with
 * seed seed_base + s and shadow seed 2*seed_base + s. Returns the smallest C
 * such that it and every larger grid value reach `target`.
 */
inline ShadowCalibration calibrate_shadow_constant(double lo = 1.8, double hi = 2.5,
                                                   double step = 0.05, int runs = 400,
                                                   double target = 0.95,
                                                   std::uint64_t seed_base = 1'000'000) {
  constexpr int n = 3, k = 2;
  constexpr double eps = 0.2, delta = 0.1;
  std::vector<DenseOperator> rhos;
  std::vector<MeasurementTable> tables;
  for (int s = 0; s < runs; ++s) {
    const auto h = random_local_hamiltonian(n, k, 1.0, 1.0, seed_base + static_cast<std::uint64_t>(s));
    rhos.push_back(gibbs_state(h, 1.0).rho);
    tables.emplace_back(rhos.back());
  }
  ShadowCalibration out{{}, std::nan("")};
  const int points = static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
  for (int i = 0; i < points; ++i) {
    const double c = lo + step * i;
    const std::uint64_t copies = shadow_copies(n, k, eps, delta, c);
    int ok = 0;
    for (int s = 0; s < runs; ++s) {
      const ShadowEstimate sh = shadow_acquire(tables[static_cast<std::size_t>(s)], copies, k, delta,
                                               2 * seed_base + static_cast<std::uint64_t>(s));
      ok += max_shadow_error(sh, rhos[static_cast<std::size_t>(s)]) <= eps;
    }
    out.curve.emplace_back(c, static_cast<double>(ok) / runs);
  }
  for (auto it = out.curve.rbegin(); it != out.curve.rend() && it->second >= target; ++it) {
    out.constant = it->first;
  }
  return out;
}

}  // namespace hamcert
