// Copyright 2026 The qmt Authors
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

#include "qmt/dynamics.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace qmt {
namespace {

using std::numbers::pi;
using testing::max_abs;

TEST(Propagate, ZeroHamiltonianIsIdentity) {
  const Hamiltonian h(LinearOperator::zero(3));
  for (double t : {0.0, 1.0, -7.5, 1e6}) {
    EXPECT_LT(max_abs(propagate(h, t).unitary.matrix() - Matrix::Identity(3, 3)), 1e-12);
  }
}

TEST(Propagate, PauliXHalfRotation) {
  const Hamiltonian h{LinearOperator(testing::pauli_x())};
  const Matrix u = propagate(h, pi / 2.0).unitary.matrix();
  // exp(-i sigma_x pi/2) = -i sigma_x.
  EXPECT_LT(max_abs(u - Complex(0.0, -1.0) * testing::pauli_x()), 1e-12);
  EXPECT_NEAR(std::abs(u(1, 0)), 1.0, 1e-12);
}

TEST(Propagate, RejectsNonFiniteTime) {
  const Hamiltonian h{LinearOperator(testing::pauli_z())};
  EXPECT_THROW(propagate(h, std::nan("")), Error);
}

TEST(Hamiltonian, RejectsNonHermitian) {
  Matrix m(2, 2);
  m << 0.0, 1.0, 0.0, 0.0;
  try {
    Hamiltonian h{LinearOperator(m)};
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotHermitian);
  }
}

TEST(Propagate, UnitarityGroupLawAndNorm) {
  std::mt19937_64 rng(4);
  const Hamiltonian h(random_hermitian(7, rng));
  const PureState psi = random_state(7, rng);
  for (double a : {0.3, 1.7, 12.0}) {
    for (double b : {-0.4, 2.5}) {
      const Matrix ua = propagate(h, a).unitary.matrix();
      const Matrix ub = propagate(h, b).unitary.matrix();
      EXPECT_LT(max_abs(ua.adjoint() * ua - Matrix::Identity(7, 7)), 1e-9);
      EXPECT_LT(max_abs(propagate(h, a + b).unitary.matrix() - ua * ub), 1e-9);
      EXPECT_NEAR(evolve(h, psi, a).amplitudes().norm(), 1.0, 1e-10);
    }
  }
}

TEST(Propagate, EnergyEigenstateOnlyPicksUpPhase) {
  std::mt19937_64 rng(9);
  const Hamiltonian h(random_hermitian(5, rng));
  const Vector e2 = h.eigenvectors().col(2);
  const double energy = h.energies()[2];
  const Vector out = evolve(h, e2, 3.1);
  EXPECT_LT((out - std::polar(1.0, -energy * 3.1) * e2).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(GridSpace, RejectsBadSizes) {
  EXPECT_THROW(GridSpace(6, 1.0), Error);
  EXPECT_THROW(GridSpace(9, 1.0), Error);
  EXPECT_THROW(GridSpace(16, 0.0), Error);
  const GridSpace g(16, 4.0);
  EXPECT_DOUBLE_EQ(g.dx(), 0.25);
  EXPECT_DOUBLE_EQ(g.position(0), -2.0);
}

TEST(GridOperators, FourierIsUnitaryAndDiagonalizesPlaneWaves) {
  const GridSpace g(32, 10.0);
  const GridOperators ops = build_grid_operators(g);
  const Matrix& f = ops.fourier.matrix();
  EXPECT_LT(max_abs(f.adjoint() * f - Matrix::Identity(32, 32)), 1e-10);

  // exp(i k_m x) with m = 20 has a single nonzero momentum amplitude.
  const RealVector x = g.positions();
  const double k = g.wavenumber(20);
  Vector wave(32);
  for (Index j = 0; j < 32; ++j) wave[j] = std::polar(1.0, k * x[j]);
  const Vector amps = momentum_amplitudes(g, PureState(wave));
  for (Index m = 0; m < 32; ++m) {
    EXPECT_NEAR(std::abs(amps[m]), m == 20 ? 1.0 : 0.0, 1e-12) << m;
  }
  // The same plane wave is an eigenvector of P.
  const Vector pw = ops.momentum.op().apply(PureState(wave).amplitudes());
  EXPECT_LT((pw - k * PureState(wave).amplitudes()).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(GridOperators, CanonicalCommutatorOnSmoothInteriorState) {
  const GridSpace g(256, 40.0);
  const GridOperators ops = build_grid_operators(g);
  const PureState psi = gaussian_packet(g, 0.0, 0.5, 1.5);
  const Matrix comm = ops.position.op().matrix() * ops.momentum.op().matrix() -
                      ops.momentum.op().matrix() * ops.position.op().matrix();
  const Vector lhs = comm * psi.amplitudes();
  const Vector rhs = Complex(0.0, 1.0) * psi.amplitudes();
  EXPECT_LT((lhs - rhs).norm(), 1e-6);
}

TEST(GaussianPacket, WidthLimits) {
  const GridSpace g(64, 32.0);  // dx = 0.5
  EXPECT_THROW(gaussian_packet(g, 0.0, 0.0, 1.4), Error);
  EXPECT_THROW(gaussian_packet(g, 0.0, 0.0, 3.3), Error);
  try {
    gaussian_packet(g, 0.0, 0.0, 1.0);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnresolvableWidth);
  }
}

TEST(GaussianPacket, SymmetricAndTailBound) {
  const GridSpace g(512, 60.0);
  const double width = 1.3;
  const PureState psi = gaussian_packet(g, 0.0, 0.0, width);
  EXPECT_NEAR(position_moments(g, psi).mean, 0.0, 1e-10);
  for (Index j = 1; j < g.size(); ++j) {
    EXPECT_NEAR(std::abs(psi[j] - psi[g.size() - j]), 0.0, 1e-14);
    EXPECT_NEAR(psi[j].imag(), 0.0, 1e-15);
  }
  double tail = 0.0;
  for (Index j = 0; j < g.size(); ++j) {
    if (std::abs(g.position(j)) > 5.0 * width) tail += std::norm(psi[j]);
  }
  // |psi|^2 is a normal density with sigma = L / sqrt(2): P(|x| > 5L) = erfc(5).
  EXPECT_LT(tail, 1e-5);
  EXPECT_NEAR(tail, std::erfc(5.0), 1e-12);
}

TEST(GaussianPacket, MomentumMeanIsBoost) {
  const GridSpace g(256, 40.0);
  const PureState psi = gaussian_packet(g, 3.0, 1.25, 1.5);
  EXPECT_NEAR(momentum_moments(g, psi).mean, 1.25, 1e-8);
  EXPECT_NEAR(position_moments(g, psi).mean, 3.0, 1e-8);
}

TEST(GaussianPacket, UncertaintyProductOn1024Points) {
  const GridSpace g(1024, 100.0);
  const PureState psi = gaussian_packet(g, 0.0, 0.0, 1.0);
  const double product = position_moments(g, psi).stddev * momentum_moments(g, psi).stddev;
  EXPECT_NEAR(product, 0.5, 0.01);
  // Individual widths from the analytic Fourier pair.
  EXPECT_NEAR(position_moments(g, psi).stddev, 1.0 / std::sqrt(2.0), 1e-6);
  EXPECT_NEAR(momentum_moments(g, psi).stddev, 1.0 / std::sqrt(2.0), 1e-6);
}

TEST(FreeEvolution, WidthFollowsSpreadingLaw) {
  const GridSpace g(512, 80.0);
  const double width = 1.0;
  const double mass = 2.0;
  const Hamiltonian h = free_hamiltonian(g, mass);
  const PureState psi0 = gaussian_packet(g, 0.0, 0.0, width);
  for (double t : {0.5, 2.0, 6.0, 12.0}) {
    const double numeric = std::sqrt(2.0) * position_moments(g, evolve(h, psi0, t)).stddev;
    const double law = width * std::sqrt(1.0 + std::pow(t / (mass * width * width), 2));
    EXPECT_NEAR(numeric / law, 1.0, 0.02) << t;
  }
}

TEST(FreeEvolution, BoostedPacketMovesAtGroupVelocity) {
  const GridSpace g(512, 80.0);
  const Hamiltonian h = free_hamiltonian(g, 1.0);
  const PureState psi = evolve(h, gaussian_packet(g, -10.0, 2.0, 1.5), 5.0);
  EXPECT_NEAR(position_moments(g, psi).mean, 0.0, 1e-6);
}

TEST(PotentialHamiltonian, BarrierLeaksButStaysHermitian) {
  const GridSpace g(128, 40.0);
  std::vector<double> v(128, 0.0);
  for (Index j = 70; j < 74; ++j) v[static_cast<std::size_t>(j)] = 5.0;
  const Hamiltonian h = potential_hamiltonian(g, 1.0, v);
  EXPECT_TRUE(h.op().is_hermitian());
  const PureState psi = evolve(h, gaussian_packet(g, -5.0, 1.5, 1.5), 4.0);
  double beyond = 0.0;
  for (Index j = 74; j < 100; ++j) beyond += std::norm(psi[j]);
  EXPECT_GT(beyond, 0.0);
}

}  // namespace
}  // namespace qmt
