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

#include "hamcert/certify_dynamics.hpp"
#include "hamcert/lemma_suite.hpp"

namespace hamcert {
namespace {

LocalHamiltonian two_qubit_h0() {
  return LocalHamiltonian(2, 1, {{"XI", 0.3}, {"IZ", -0.4}, {"ZI", 0.2}});
}

CertificationConfig config_n2(double eps, std::uint64_t seed) {
  CertificationConfig cfg;
  cfg.eps = eps;
  cfg.n = 2;
  cfg.k = 1;
  cfg.c_op = 2.0;
  cfg.seed = seed;
  return cfg;
}

TEST(CertificationConfig, DerivedConstants) {
  CertificationConfig cfg = config_n2(0.5, 0);
  EXPECT_DOUBLE_EQ(cfg.trotter_tolerance(), 1.0 / 3456.0);
  EXPECT_DOUBLE_EQ(cfg.estimate_accuracy(), 1.0 / 1728.0);
  EXPECT_NEAR(cfg.decision_threshold(), 0.9918981481481481, 1e-15);
  EXPECT_DOUBLE_EQ(cfg.close_radius(), 0.5 / 24.0);
  EXPECT_DOUBLE_EQ(cfg.max_time(), 4.0);
  EXPECT_EQ(cfg.shots_per_estimate(), 8612058u);
  cfg.k = 2;
  EXPECT_EQ(cfg.shots_per_estimate(), 697576626u);
}

TEST(CertificationConfig, Validation) {
  CertificationConfig cfg = config_n2(0.5, 0);
  cfg.eps = 0.0;
  EXPECT_THROW(cfg.validate(), InvalidArgument);
  cfg = config_n2(0.5, 0);
  cfg.k = 3;
  EXPECT_THROW(cfg.validate(), InvalidArgument);
  cfg = config_n2(0.5, 0);
  cfg.repetitions = 0;
  EXPECT_THROW(cfg.validate(), InvalidArgument);
  cfg = config_n2(0.5, 0);
  cfg.noise.spam_budget = -1.0;
  EXPECT_THROW(cfg.validate(), InvalidArgument);
}

TEST(Certify, EqualHamiltoniansAreClose) {
  const LocalHamiltonian h0 = two_qubit_h0();
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    EvolutionOracle oracle(h0);
    const Verdict v = certify(h0, oracle, config_n2(0.5, seed));
    EXPECT_EQ(v.decision, Decision::Close);
    EXPECT_EQ(v.transcript.size(), 8u);
  }
}

TEST(Certify, PlantedFarDifferenceIsDetected) {
  const LocalHamiltonian h0 = two_qubit_h0();
  const LocalHamiltonian h = h0 + LocalHamiltonian(2, 1, {{"XI", 0.5}});
  int far = 0;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    EvolutionOracle oracle(h);
    const Verdict v = certify(h0, oracle, config_n2(0.5, seed));
    if (v.decision == Decision::Far) {
      ++far;
      // First-hit: the last recorded estimate triggered the decision.
      EXPECT_LE(v.transcript.back().estimate, config_n2(0.5, seed).decision_threshold());
    }
  }
  EXPECT_GE(far, 25);
}

TEST(Certify, ReplayIsBitIdentical) {
  const LocalHamiltonian h0 = two_qubit_h0();
  const LocalHamiltonian h = h0 + LocalHamiltonian(2, 1, {{"IX", 0.1}});
  EvolutionOracle a(h), b(h);
  const Verdict va = certify(h0, a, config_n2(0.5, 42));
  const Verdict vb = certify(h0, b, config_n2(0.5, 42));
  ASSERT_EQ(va.transcript.size(), vb.transcript.size());
  EXPECT_EQ(va.decision, vb.decision);
  for (std::size_t i = 0; i < va.transcript.size(); ++i) {
    EXPECT_EQ(va.transcript[i].t, vb.transcript[i].t);
    EXPECT_EQ(va.transcript[i].steps, vb.transcript[i].steps);
    EXPECT_EQ(va.transcript[i].estimate, vb.transcript[i].estimate);
  }
}

TEST(Certify, LedgerMatchesTranscript) {
  const LocalHamiltonian h0 = two_qubit_h0();
  EvolutionOracle oracle(h0);
  const CertificationConfig cfg = config_n2(0.5, 5);
  const Verdict v = certify(h0, oracle, cfg);
  double time = 0.0, resolution = INFINITY;
  std::uint64_t queries = 0;
  for (const auto& rec : v.transcript) {
    EXPECT_GE(rec.t, 0.0);
    EXPECT_LE(rec.t, cfg.max_time());
    EXPECT_EQ(rec.steps, trotter_steps(cfg.c_op, rec.t, cfg.trotter_tolerance()));
    time += 2.0 * rec.t * static_cast<double>(rec.shots);
    queries += 3 * rec.steps * rec.shots;
    resolution = std::min(resolution, rec.t / (2.0 * static_cast<double>(rec.steps)));
  }
  EXPECT_NEAR(v.ledger.total_evolution_time(), time, 1e-6 * time);
  EXPECT_EQ(v.ledger.query_count(), queries);
  EXPECT_DOUBLE_EQ(v.ledger.time_resolution, resolution);
  EXPECT_EQ(v.ledger.experiments, 8u * cfg.shots_per_estimate());
}

TEST(Certify, RejectsMismatchedInputs) {
  const LocalHamiltonian h0 = two_qubit_h0();
  EvolutionOracle oracle(LocalHamiltonian(3, 1, {{"XII", 1.0}}));
  EXPECT_THROW(certify(h0, oracle, config_n2(0.5, 0)), DimensionError);

  const LocalHamiltonian h0_k2(2, 2, {{"XX", 0.5}});
  EvolutionOracle oracle2(h0_k2);
  EXPECT_THROW(certify(h0_k2, oracle2, config_n2(0.5, 0)), InvalidArgument);
}

TEST(Amplification, RunCounts) {
  EXPECT_EQ(amplification_runs(0.1), 1);
  EXPECT_EQ(amplification_runs(0.5), 1);
  EXPECT_EQ(amplification_runs(0.05), 11);
  EXPECT_EQ(amplification_runs(0.01), 15);
  EXPECT_THROW(amplification_runs(0.0), InvalidArgument);
  EXPECT_THROW(amplification_runs(1.0), InvalidArgument);
}

TEST(Amplification, MajorityOnEqualHamiltonians) {
  const LocalHamiltonian h0 = two_qubit_h0();
  EvolutionOracle oracle(h0);
  const AmplifiedVerdict v = certify_amplified(h0, oracle, config_n2(0.5, 9), 0.01);
  EXPECT_EQ(v.decision, Decision::Close);
  EXPECT_EQ(v.runs.size(), 15u);
  EXPECT_EQ(v.far_votes, 0);
  double time = 0.0;
  for (const auto& r : v.runs) time += r.ledger.total_evolution_time();
  EXPECT_NEAR(v.ledger.total_evolution_time(), time, 1e-9 * time);
  EXPECT_NEAR(oracle.ledger().total_evolution_time(), time, 1e-9 * time);
}

TEST(LemmaSuite, PaleyZygmundOnSinglePauli) {
  const Spectrum s = eig_hermitian(to_dense(LocalHamiltonian(1, 1, {{"X", 1.0}})));
  const PaleyZygmundTerms pz = paley_zygmund_terms(s);
  // F^2 takes 0 and 4 with equal weight: E = 2, E[F^4] = 8.
  EXPECT_DOUBLE_EQ(pz.probability, 0.5);
  EXPECT_DOUBLE_EQ(pz.bound, 0.125);
}

TEST(LemmaSuite, ZeroDifferenceIsTrivial) {
  LemmaReport report;
  Rng rng = make_rng({1});
  check_lemma_instance(LocalHamiltonian(3, 2), rng, {}, report);
  EXPECT_TRUE(report.passed());
  EXPECT_EQ(report.find("two_path_identity")->evaluations, 1u);
  EXPECT_EQ(report.find("bonami"), nullptr);
}

TEST(LemmaSuite, NearDegenerateZ) {
  LemmaReport report;
  Rng rng = make_rng({2});
  check_lemma_instance(LocalHamiltonian(2, 1, {{"ZI", 1e-6}}), rng, {}, report);
  EXPECT_TRUE(report.passed());
  EXPECT_GE(report.find("separated_pairs_lower_bound")->worst_margin, 0.0);
}

TEST(LemmaSuite, RandomSweepHasNoViolations) {
  const LemmaReport report = verify_lemma_suite(150, 3, 2, 7);
  EXPECT_EQ(report.instances, 150u);
  for (const auto& c : report.checks) {
    EXPECT_TRUE(c.passed()) << c.name << " worst margin " << c.worst_margin;
  }
  EXPECT_EQ(report.violations(), 0u);
}

TEST(LemmaSuite, FractionHelpers) {
  const Spectrum s = eig_hermitian(to_dense(LocalHamiltonian(1, 1, {{"Z", 1.0}})));
  Rng rng = make_rng({3});
  // I(t) = cos^2 t, Lambda = 1/2; I <= 7/8 on a known fraction of [0, 2].
  const double frac = spectral_condition_fraction(s, 1.0, 100000, rng);
  const double exact = (2.0 - std::acos(std::sqrt(7.0 / 8.0))) / 2.0;
  EXPECT_NEAR(frac, exact, 0.01);
  EXPECT_THROW(fraction_below(s, 0.0, 0.5, 10, rng), InvalidArgument);
}

}  // namespace
}  // namespace hamcert
