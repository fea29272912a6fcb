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

#include "hamcert/shadows.hpp"
#include "test_util.hpp"

namespace hamcert {
namespace {

DenseOperator random_density(int n, std::uint64_t seed) {
  const Matrix a = testing_util::random_operator(n, seed).matrix();
  Matrix rho = a * a.adjoint();
  rho /= rho.trace();
  return DenseOperator(rho);
}

DenseOperator pure_state(const Eigen::VectorXcd& psi) {
  return DenseOperator(psi * psi.adjoint());
}

// Tr[Pi rho] with Pi = kron over sites of (I + s_i sigma_{b_i}) / 2.
double projector_probability(const DenseOperator& rho, const std::vector<int>& basis,
                             std::size_t outcome) {
  const int n = rho.qubits();
  Matrix pi = Matrix::Identity(1, 1);
  for (int i = 0; i < n; ++i) {
    const double s = ((outcome >> (n - 1 - i)) & 1u) ? -1.0 : 1.0;
    const Matrix local =
        0.5 * (Matrix::Identity(2, 2) +
               s * pauli_matrix(static_cast<Pauli>(basis[static_cast<std::size_t>(i)] + 1)));
    pi = kron(pi, local);
  }
  return (pi * rho.matrix()).trace().real();
}

TEST(MeasurementTable, SingleQubitStates) {
  Eigen::VectorXcd zero(2), plus_i(2);
  zero << 1.0, 0.0;
  plus_i << 1.0 / std::sqrt(2.0), Complex(0.0, 1.0 / std::sqrt(2.0));
  const MeasurementTable t0(pure_state(zero));
  EXPECT_EQ(t0.bases(), 3u);
  EXPECT_NEAR(t0.probability(2, 0), 1.0, 1e-15);  // Z basis, +1
  EXPECT_NEAR(t0.probability(0, 0), 0.5, 1e-15);  // X basis
  EXPECT_NEAR(t0.probability(1, 1), 0.5, 1e-15);  // Y basis
  const MeasurementTable ty(pure_state(plus_i));
  EXPECT_NEAR(ty.probability(1, 0), 1.0, 1e-15);
  EXPECT_NEAR(ty.probability(2, 1), 0.5, 1e-15);
}

TEST(MeasurementTable, MatchesProjectors) {
  for (int n = 1; n <= 3; ++n) {
    const DenseOperator rho = random_density(n, 40 + static_cast<std::uint64_t>(n));
    const MeasurementTable t(rho);
    for (std::size_t b = 0; b < t.bases(); ++b) {
      double total = 0.0;
      for (std::size_t o = 0; o < t.outcomes(); ++o) {
        EXPECT_NEAR(t.probability(b, o), projector_probability(rho, t.basis_digits(b), o), 1e-12);
        total += t.probability(b, o);
      }
      EXPECT_NEAR(total, 1.0, 1e-12);
    }
  }
}

TEST(MeasurementTable, BasisDigitsSiteZeroFirst) {
  const MeasurementTable t(DenseOperator(Matrix::Identity(4, 4) / 4.0));
  EXPECT_EQ(t.basis_digits(1), (std::vector<int>{0, 1}));
  EXPECT_EQ(t.basis_digits(3), (std::vector<int>{1, 0}));
  EXPECT_EQ(t.basis_digits(8), (std::vector<int>{2, 2}));
}

TEST(Snapshot, Values) {
  EXPECT_EQ(snapshot_value(PauliString("ZI"), {2, 0}, 0b00), 3.0);
  EXPECT_EQ(snapshot_value(PauliString("ZI"), {2, 0}, 0b10), -3.0);
  EXPECT_EQ(snapshot_value(PauliString("ZX"), {2, 0}, 0b11), 9.0);
  EXPECT_EQ(snapshot_value(PauliString("ZX"), {2, 1}, 0b11), 0.0);
  EXPECT_EQ(snapshot_value(PauliString("II"), {1, 1}, 0b01), 1.0);
}

TEST(Snapshot, Unbiased) {
  const DenseOperator rho = random_density(2, 91);
  const MeasurementTable t(rho);
  Rng rng = make_rng({5});
  const std::vector<PauliString> paulis = enumerate_local_paulis(2, 2);
  std::vector<double> sum(paulis.size()), sum2(paulis.size());
  const int rounds = 100000;
  for (int r = 0; r < rounds; ++r) {
    const auto [b, o] = t.sample(rng);
    const std::vector<int> digits = t.basis_digits(b);
    for (std::size_t i = 0; i < paulis.size(); ++i) {
      const double v = snapshot_value(paulis[i], digits, o);
      sum[i] += v;
      sum2[i] += v * v;
    }
  }
  for (std::size_t i = 0; i < paulis.size(); ++i) {
    const double mean = sum[i] / rounds;
    const double se = std::sqrt((sum2[i] / rounds - mean * mean) / rounds);
    EXPECT_NEAR(mean, pauli_expectation(rho, paulis[i]), 3.0 * se) << paulis[i];
  }
}

TEST(Sampling, AggregatedMatchesPerRound) {
  const DenseOperator rho = random_density(2, 17);
  const MeasurementTable t(rho);
  Rng r1 = make_rng({1}), r2 = make_rng({2});
  const std::uint64_t copies = 200000;
  const auto a = t.sample_counts(copies, SamplingMode::Aggregated, r1);
  const auto p = t.sample_counts(copies, SamplingMode::PerRound, r2);
  std::uint64_t ta = 0, tp = 0;
  for (std::size_t c = 0; c < a.size(); ++c) {
    const double q = t.probability(c / t.outcomes(), c % t.outcomes()) / t.bases();
    const double sd = std::sqrt(copies * q * (1.0 - q)) + 1.0;
    EXPECT_NEAR(static_cast<double>(a[c]), copies * q, 5.0 * sd);
    EXPECT_NEAR(static_cast<double>(p[c]), copies * q, 5.0 * sd);
    ta += a[c];
    tp += p[c];
  }
  EXPECT_EQ(ta, copies);
  EXPECT_EQ(tp, copies);
}

TEST(Sampling, AggregatedHandlesDeterministicOutcomes) {
  Eigen::VectorXcd zero(2);
  zero << 1.0, 0.0;
  const MeasurementTable t(pure_state(zero));
  Rng rng = make_rng({3});
  const auto counts = t.sample_counts(1'000'000'000ULL, SamplingMode::Aggregated, rng);
  EXPECT_EQ(counts[2 * 2 + 1], 0u);  // Z basis never reads -1
  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  EXPECT_EQ(total, 1'000'000'000ULL);
}

TEST(ShadowSizes, Formulas) {
  EXPECT_EQ(shadow_batches(36, 0.1), 14u);
  EXPECT_EQ(shadow_batches(3, 0.1), 9u);
  EXPECT_EQ(shadow_copies(3, 2, 0.2, 0.1, 1.0),
            static_cast<std::uint64_t>(std::ceil(9.0 * 2.0 * std::log(30.0) / 0.04)));
  EXPECT_EQ(shadow_copies(3, 2, 0.2, 0.1), 3138u);
  // Tiny requests are lifted to the batch count.
  EXPECT_EQ(shadow_copies(1, 1, 100.0, 0.5), shadow_batches(3, 0.5));
  EXPECT_THROW(shadow_copies(1, 1, 0.0, 0.1), InvalidArgument);
  EXPECT_THROW(shadow_copies(1, 1, 0.1, 1.0), InvalidArgument);
}

TEST(ShadowAcquire, PureZeroState) {
  Eigen::VectorXcd zero(2);
  zero << 1.0, 0.0;
  const DenseOperator rho = pure_state(zero);
  int good = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const ShadowEstimate sh = shadow_acquire(rho, 10000, 1, 0.1, seed);
    good += std::abs(sh.at(PauliString("Z")) - 1.0) <= 0.1;
    EXPECT_EQ(sh.at(PauliString("I")), 1.0);
    EXPECT_EQ(sh.estimates.size(), 4u);
  }
  EXPECT_GE(good, 95);
}

TEST(ShadowAcquire, MaximallyMixed) {
  const DenseOperator rho(Matrix::Identity(4, 4) / 4.0);
  const ShadowEstimate sh = shadow_acquire(rho, 50000, 2, 0.1, 8);
  for (const auto& p : enumerate_local_paulis(2, 2)) EXPECT_NEAR(sh.at(p), 0.0, 0.1) << p;
}

TEST(ShadowAcquire, ModesAgree) {
  const DenseOperator rho = random_density(2, 23);
  const ShadowEstimate a = shadow_acquire(rho, 40000, 2, 0.1, 4, SamplingMode::Aggregated);
  const ShadowEstimate b = shadow_acquire(rho, 40000, 2, 0.1, 4, SamplingMode::PerRound);
  EXPECT_LT(max_shadow_error(a, rho), 0.1);
  EXPECT_LT(max_shadow_error(b, rho), 0.1);
}

TEST(ShadowAcquire, DeterministicInSeed) {
  const DenseOperator rho = random_density(2, 29);
  const ShadowEstimate a = shadow_acquire(rho, 5000, 2, 0.1, 12);
  const ShadowEstimate b = shadow_acquire(rho, 5000, 2, 0.1, 12);
  EXPECT_EQ(a.estimates, b.estimates);
}

TEST(ShadowAcquire, Errors) {
  const DenseOperator rho(Matrix::Identity(2, 2) / 2.0);
  EXPECT_THROW(shadow_acquire(rho, 5, 1, 0.1, 0), InsufficientCopies);
  EXPECT_THROW(shadow_acquire(rho, 100, 2, 0.1, 0), InvalidArgument);
  EXPECT_THROW(ShadowEstimate{}.at(PauliString("X")), InvalidArgument);
}

TEST(ShadowAcquire, MedianOfMeans) {
  EXPECT_EQ(median_of({3.0, 1.0, 2.0}), 2.0);
  EXPECT_EQ(median_of({4.0, 1.0, 3.0, 2.0}), 2.5);
}

TEST(ShadowSources, ExactAndSampled) {
  const DenseOperator rho = random_density(2, 31);
  ExactShadowSource exact(rho);
  const ShadowEstimate e = exact.acquire(123, 2, 0.1, 0);
  EXPECT_EQ(e.copies_used, 123u);
  EXPECT_EQ(exact.copies_consumed(), 123u);
  EXPECT_LT(max_shadow_error(e, rho), 1e-12);

  SampledShadowSource sampled(rho);
  sampled.acquire(1000, 1, 0.1, 1);
  sampled.acquire(2000, 1, 0.1, 2);
  EXPECT_EQ(sampled.copies_consumed(), 3000u);
  EXPECT_EQ(sampled.qubits(), 2);
}

}  // namespace
}  // namespace hamcert
