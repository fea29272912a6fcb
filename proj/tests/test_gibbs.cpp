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
#include <set>
#include <unsupported/Eigen/MatrixFunctions>

#include "hamcert/gibbs.hpp"
#include "hamcert/rng.hpp"

namespace hamcert {
namespace {

// Independent path: Pade matrix exponential of the dense Hamiltonian.
Matrix gibbs_by_expm(const LocalHamiltonian& h, double beta) {
  Matrix m = (-beta * to_dense(h).matrix()).exp();
  return m / m.trace();
}

TEST(GibbsState, InfiniteTemperatureIsMaximallyMixed) {
  const LocalHamiltonian h(2, 2, {{"XZ", 0.7}, {"IY", -0.2}});
  const GibbsState g = gibbs_state(h, 0.0);
  EXPECT_LT(max_abs_entry(g.rho.matrix() - Matrix::Identity(4, 4) / 4.0), 1e-14);
  EXPECT_EQ(g.beta, 0.0);
  ASSERT_TRUE(g.source.has_value());
  EXPECT_EQ(*g.source, h);
}

TEST(GibbsState, SingleZClosedForm) {
  for (double beta : {0.3, 1.0, 4.0}) {
    const GibbsState g = gibbs_state(LocalHamiltonian(1, 1, {{"Z", 1.0}}), beta);
    const double z = 2.0 * std::cosh(beta);
    EXPECT_NEAR(g.rho(0, 0).real(), std::exp(-beta) / z, 1e-14);
    EXPECT_NEAR(g.rho(1, 1).real(), std::exp(beta) / z, 1e-14);
    EXPECT_NEAR(std::abs(g.rho(0, 1)), 0.0, 1e-15);
  }
}

TEST(GibbsState, MatchesMatrixExponential) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const LocalHamiltonian h = random_local_hamiltonian(2, 2, 1.0, 1.0, seed);
    const GibbsState g = gibbs_state(h, 1.5);
    EXPECT_LT(max_abs_entry(g.rho.matrix() - gibbs_by_expm(h, 1.5)), 1e-12);
    EXPECT_NO_THROW(check_density_matrix(g.rho));
  }
}

TEST(GibbsState, LargeBetaStaysValid) {
  for (double beta : {10.0, 30.0, 50.0}) {
    const LocalHamiltonian h = random_local_hamiltonian(3, 2, 1.0, 0.8, 11);
    const GibbsState g = gibbs_state(h, beta);
    EXPECT_TRUE(g.rho.matrix().allFinite());
    EXPECT_NO_THROW(check_density_matrix(g.rho));
  }
  // exp(50 * 20) overflows without the shift.
  const LocalHamiltonian big = random_local_hamiltonian(2, 2, 1.0, 1.0, 4).scaled(20.0);
  EXPECT_NO_THROW(check_density_matrix(gibbs_state(big, 50.0).rho));
}

TEST(GibbsState, RejectsBadBeta) {
  const LocalHamiltonian h(1, 1, {{"Z", 1.0}});
  EXPECT_THROW(gibbs_state(h, -1.0), InvalidArgument);
  EXPECT_THROW(gibbs_state(h, std::nan("")), InvalidArgument);
}

TEST(DensityMatrix, Checks) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = 1.2;
  m(1, 1) = -0.2;
  EXPECT_THROW(check_density_matrix(DenseOperator(m)), InvalidArgument);
  m(0, 0) = 0.5;
  m(1, 1) = 0.4;
  EXPECT_THROW(check_density_matrix(DenseOperator(m)), InvalidArgument);
  m(0, 1) = 0.3;
  EXPECT_THROW(check_density_matrix(DenseOperator(m)), NotHermitian);
}

TEST(TraceDistance, Examples) {
  Matrix a = Matrix::Zero(2, 2), b = Matrix::Zero(2, 2);
  a(0, 0) = 1.0;
  b(1, 1) = 1.0;
  EXPECT_NEAR(trace_distance(DenseOperator(a), DenseOperator(a)), 0.0, 1e-15);
  EXPECT_NEAR(trace_distance(DenseOperator(a), DenseOperator(b)), 2.0, 1e-14);
  const LocalHamiltonian z(1, 1, {{"Z", 1.0}});
  for (double beta : {0.1, 1.0, 5.0}) {
    EXPECT_NEAR(trace_distance(gibbs_state(z, beta), gibbs_state(z, 0.0)), std::tanh(beta),
                1e-12);
  }
  EXPECT_THROW(trace_distance(DenseOperator(a), DenseOperator::identity(2)), DimensionError);
}

TEST(Pinsker, EqualHamiltoniansGiveZero) {
  const LocalHamiltonian h = random_local_hamiltonian(2, 2, 1.0, 1.0, 3);
  const PinskerBounds b = pinsker_bounds(gibbs_state(h, 1.0), gibbs_state(h, 1.0));
  EXPECT_NEAR(b.lhs, 0.0, 1e-14);
  EXPECT_NEAR(b.bound0, 0.0, 1e-7);
  EXPECT_EQ(b.bound1, 0.0);
  ASSERT_TRUE(b.bound2.has_value());
  EXPECT_NEAR(*b.bound2, 0.0, 1e-5);
}

TEST(Pinsker, SingleZAgainstZero) {
  const PinskerBounds b = pinsker_bounds(gibbs_state(LocalHamiltonian(1, 1, {{"Z", 1.0}}), 1.0),
                                         gibbs_state(LocalHamiltonian(1, 1), 1.0));
  EXPECT_NEAR(b.lhs, std::tanh(1.0), 1e-12);
  EXPECT_DOUBLE_EQ(b.bound1, 200.0);
  // Tr[(rho - I/2)(0 - Z)] = tanh(1).
  EXPECT_NEAR(b.bound0, std::sqrt(2.0 * std::tanh(1.0)), 1e-12);
  ASSERT_TRUE(b.bound2.has_value());
  EXPECT_NEAR(*b.bound2, std::sqrt(400.0 * std::tanh(1.0)), 1e-10);
}

TEST(Pinsker, BoundsDominateOnRandomPairs) {
  int checked = 0;
  for (int n = 1; n <= 3; ++n) {
    for (int k = 1; k <= std::min(n, 2); ++k) {
      for (double beta : {0.1, 1.0, 5.0}) {
        for (std::uint64_t s = 0; s < 8; ++s) {
          const LocalHamiltonian h = random_local_hamiltonian(n, k, 1.0, 0.7, 100 * s + n);
          const LocalHamiltonian hp = random_local_hamiltonian(n, k, 1.0, 0.7, 100 * s + n + 50);
          const GibbsState a = gibbs_state(h, beta), b = gibbs_state(hp, beta);
          const PinskerBounds pb = pinsker_bounds(a, b);
          EXPECT_LE(pb.lhs, pb.bound0 + 1e-10);
          EXPECT_LE(pb.lhs, pb.bound1 + 1e-10);
          ASSERT_TRUE(pb.bound2.has_value());
          EXPECT_LE(pb.lhs, *pb.bound2 + 1e-10);
          // Intermediate step of the proof: bound0 <= sqrt(2 beta ||dH||_op lhs).
          const double op = operator_norm(to_dense(h - hp));
          EXPECT_LE(pb.bound0, std::sqrt(2.0 * beta * op * pb.lhs) + 1e-9);
          ++checked;
        }
      }
    }
  }
  EXPECT_EQ(checked, 5 * 3 * 8);
}

TEST(Pinsker, Bound2NeedsBoundedCoefficients) {
  const GibbsState a = gibbs_state(LocalHamiltonian(1, 1, {{"Z", 2.0}}), 1.0);
  const GibbsState b = gibbs_state(LocalHamiltonian(1, 1, {{"X", 0.5}}), 1.0);
  const PinskerBounds pb = pinsker_bounds(a, b);
  EXPECT_FALSE(pb.bound2.has_value());
  EXPECT_LE(pb.lhs, pb.bound0 + 1e-12);
}

TEST(Pinsker, Errors) {
  const GibbsState a = gibbs_state(LocalHamiltonian(1, 1, {{"Z", 1.0}}), 1.0);
  GibbsState no_source = a;
  no_source.source.reset();
  EXPECT_THROW(pinsker_bounds(a, no_source), InvalidArgument);
  EXPECT_THROW(pinsker_bounds(a, gibbs_state(LocalHamiltonian(1, 1), 2.0)), InvalidArgument);
}

TEST(Net, GridAndSize) {
  // eta = eps_net / 200 at n = k = beta = 1.
  const NetIndex net(1, 1, 1.0, 100.0);
  EXPECT_DOUBLE_EQ(net.eta(), 0.5);
  EXPECT_EQ(net.grid(), (std::vector<double>{-1.0, -0.5, 0.0, 0.5, 1.0}));
  EXPECT_EQ(net.size(), 125u);

  const NetIndex coarse = NetIndex::with_spacing(1, 1, 1.0, 2.0);
  EXPECT_EQ(coarse.grid(), std::vector<double>{0.0});
  EXPECT_EQ(coarse.size(), 1u);
  EXPECT_TRUE(coarse.member(0).empty());
  EXPECT_EQ(NetIndex::with_spacing(1, 1, 1.0, 1.5).size(), 1u);
  EXPECT_EQ(NetIndex::with_spacing(1, 1, 1.0, 1.0).grid().size(), 3u);

  const NetIndex hot(2, 1, 0.0, 0.1);
  EXPECT_TRUE(std::isinf(hot.eta()));
  EXPECT_EQ(hot.size(), 1u);
}

TEST(Net, GridSpacingDividingOne) {
  // floor(1/eta) must not lose the endpoint to rounding.
  EXPECT_EQ(NetIndex::with_spacing(1, 1, 1.0, 0.1).grid().size(), 21u);
  EXPECT_EQ(NetIndex::with_spacing(1, 1, 1.0, 0.05).grid().size(), 41u);
  EXPECT_EQ(NetIndex::with_spacing(1, 1, 1.0, 0.3).grid().size(), 7u);
}

TEST(Net, EnumerationIsMixedRadixAndComplete) {
  const NetIndex net = NetIndex::with_spacing(1, 1, 1.0, 0.5);
  std::set<std::string> seen;
  std::uint64_t expected = 0;
  for (auto it = net_iter(net).begin(); it != net_iter(net).end(); ++it) {
    const LocalHamiltonian h = *it;
    EXPECT_EQ(it.index(), expected++);
    EXPECT_TRUE(h.is_bounded());
    EXPECT_EQ(net.encode(h), it.index());
    seen.insert(to_text(h));
  }
  EXPECT_EQ(seen.size(), 125u);
  // Index 1: first Pauli (X) moves to the second grid value.
  const LocalHamiltonian m1 = net.member(1);
  EXPECT_DOUBLE_EQ(m1.coefficient(PauliString("X")), -0.5);
  EXPECT_DOUBLE_EQ(m1.coefficient(PauliString("Y")), -1.0);
  EXPECT_DOUBLE_EQ(m1.coefficient(PauliString("Z")), -1.0);
  EXPECT_DOUBLE_EQ(net.member(5).coefficient(PauliString("Y")), -0.5);
  EXPECT_THROW(net.member(125), InvalidArgument);
}

TEST(Net, EncodeRejectsOffGrid) {
  const NetIndex net = NetIndex::with_spacing(1, 1, 1.0, 0.5);
  EXPECT_THROW(net.encode(LocalHamiltonian(1, 1, {{"X", 0.3}})), InvalidArgument);
  EXPECT_THROW(net.encode(LocalHamiltonian(2, 1, {{"XI", 0.5}})), DimensionError);
  const LocalHamiltonian r = net.round(LocalHamiltonian(1, 1, {{"X", 0.3}, {"Z", -0.8}}));
  EXPECT_DOUBLE_EQ(r.coefficient(PauliString("X")), 0.5);
  EXPECT_DOUBLE_EQ(r.coefficient(PauliString("Z")), -1.0);
}

TEST(Net, CapIsEnforced) {
  const NetIndex net(2, 2, 1.0, 0.01);
  try {
    net.size();
    FAIL() << "expected NetTooLarge";
  } catch (const NetTooLarge& e) {
    EXPECT_NE(std::string(e.what()).find("members"), std::string::npos);
  }
  EXPECT_THROW(net_iter(net), NetTooLarge);
  const NetIndex small = NetIndex::with_spacing(1, 1, 1.0, 0.5);
  EXPECT_THROW(small.size(124), NetTooLarge);
  EXPECT_EQ(small.size(125), 125u);
}

TEST(Net, RoundingCovers) {
  Rng rng = make_rng({77});
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  for (double beta : {0.1, 1.0}) {
    const NetIndex net(1, 1, beta, 0.5);
    for (int i = 0; i < 100; ++i) {
      const LocalHamiltonian h(1, 1, {{"X", coeff(rng)}, {"Y", coeff(rng)}, {"Z", coeff(rng)}});
      const double d = trace_distance(gibbs_state(h, beta), gibbs_state(net.round(h), beta));
      EXPECT_LE(d, net.eps_net());
    }
  }
}

}  // namespace
}  // namespace hamcert
