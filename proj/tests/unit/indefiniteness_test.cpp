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

#include "qmt/indefiniteness.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "test_support.hpp"

namespace qmt {
namespace {

using std::numbers::pi;

Observable sigma_z() { return spectral_decompose(LinearOperator(testing::pauli_z())); }

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> t(n);
  for (std::size_t k = 0; k < n; ++k) t[k] = a + (b - a) * static_cast<double>(k) / static_cast<double>(n - 1);
  return t;
}

TEST(EeLink, EigenstateIsDefinite) {
  const DefinitenessReport r = ee_link_status(testing::minus_z(), sigma_z());
  EXPECT_TRUE(r.definite());
  EXPECT_EQ(r.value, -1.0);
  EXPECT_LT(r.residual, 1e-15);
}

TEST(EeLink, TinyLeakageBelowThresholdStillDefinite) {
  const PureState s = testing::ket({1.0, 1e-12});
  EXPECT_TRUE(ee_link_status(s, sigma_z()).definite());
  const PureState t = testing::ket({1.0, 1e-6});
  const DefinitenessReport r = ee_link_status(t, sigma_z());
  EXPECT_FALSE(r.definite());
  EXPECT_EQ(r.support.size(), 2u);
}

TEST(EeLink, SuperpositionListsSupport) {
  const DefinitenessReport r = ee_link_status(testing::plus_x(), sigma_z());
  ASSERT_FALSE(r.definite());
  ASSERT_EQ(r.support.size(), 2u);
  for (const auto& [value, weight] : r.support) EXPECT_NEAR(weight, 0.5, 1e-15);

  const std::array<double, 3> values{0.0, 1.0, 2.0};
  const PureState three = testing::ket({0.8, 0.6, 0.0});
  const DefinitenessReport r3 = ee_link_status(three, Observable::diagonal(values));
  ASSERT_EQ(r3.support.size(), 2u);
  EXPECT_EQ(r3.support[0].first, 0.0);
  EXPECT_EQ(r3.support[1].first, 1.0);
  EXPECT_NEAR(r3.support[0].second, 0.64, 1e-15);
}

TEST(RegionProjector, WindowsAndErrors) {
  const GridSpace g(64, 16.0);
  const Observable half = region_projector(g, {0, 32});
  ASSERT_EQ(half.size(), 2u);
  EXPECT_EQ(half.multiplicity(1), 32);
  const Observable whole = region_projector(g, {0, 64});
  EXPECT_EQ(whole.size(), 1u);
  try {
    region_projector(g, {10, 10});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyRegion);
  }
  try {
    region_projector(g, {60, 70});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidIndex);
  }
}

TEST(TruncatedGaussian, VanishesOutsideWindow) {
  const GridSpace g(128, 40.0);
  const IndexWindow w{40, 88};
  const PureState psi = truncated_gaussian(g, w, 0.0, 1.5);
  EXPECT_NEAR(psi.amplitudes().norm(), 1.0, 1e-14);
  for (Index j = 0; j < g.size(); ++j) {
    if (!w.contains(j)) {
      EXPECT_EQ(psi[j], Complex(0.0));
    }
  }
}

class Delocalization : public ::testing::Test {
 protected:
  GridSpace g{128, 40.0};
  IndexWindow w{52, 76};
  Hamiltonian h = free_hamiltonian(g, 1.0);
  PureState psi = truncated_gaussian(g, w, 0.0, 1.0);

  double outside_dense(double eps) const {
    const Vector out = (Complex(0.0, -eps) * h.op().matrix()).exp() * psi.amplitudes();
    double p = 0.0;
    for (Index j = 0; j < g.size(); ++j) {
      if (!w.contains(j)) p += std::norm(out[j]);
    }
    return p;
  }
};

TEST_F(Delocalization, MatchesDensePropagator) {
  for (double eps : {1e-3, 1e-2, 0.3}) {
    EXPECT_NEAR(delocalization_demo(g, h, psi, w, eps), outside_dense(eps), 1e-12) << eps;
  }
  EXPECT_EQ(delocalization_demo(g, h, psi, w, 0.0), 0.0);
}

TEST_F(Delocalization, PositiveAndQuadraticAtShortTimes) {
  // P_out(eps) ~ eps^2 ||(1 - P) H psi||^2 to leading order.
  Vector leak = h.op().apply(psi.amplitudes());
  for (Index j = w.first; j < w.last; ++j) leak[j] = 0.0;
  const double rate = leak.squaredNorm();
  for (double eps : {1e-4, 1e-5}) {
    const double p = delocalization_demo(g, h, psi, w, eps);
    EXPECT_GT(p, 0.0);
    EXPECT_NEAR(p / (eps * eps * rate), 1.0, 1e-2) << eps;
  }
}

TEST_F(Delocalization, RejectsStateWithOutsideSupport) {
  EXPECT_THROW(delocalization_demo(g, h, gaussian_packet(g, 0.0, 0.0, 1.0), w, 0.1), Error);
  EXPECT_THROW(delocalization_demo(g, h, psi, w, -1.0), Error);
}

TEST(IndefinitenessScan, RabiHasIsolatedZerosAtMultiplesOfTwoPi) {
  Matrix sx = testing::pauli_x();
  const Hamiltonian h(LinearOperator(0.5 * sx));
  const LinearOperator p1 = LinearOperator::projector_onto(PureState::basis(2, 1));
  const std::vector<double> times = linspace(0.0, 50.0, 2000);
  const IndefinitenessScan scan = indefiniteness_scan(h, PureState::basis(2, 0), p1, times);
  EXPECT_EQ(scan.classification, ScanClass::kIsolatedZeros);
  // sin^2(t / 2) vanishes at t = 2 pi n.
  ASSERT_EQ(scan.zero_times.size(), 8u);
  for (std::size_t n = 0; n < scan.zero_times.size(); ++n) {
    EXPECT_NEAR(scan.zero_times[n], 2.0 * pi * static_cast<double>(n), 1e-4) << n;
  }
  for (std::size_t k = 0; k < times.size(); k += 97) {
    EXPECT_NEAR(scan.series[k], std::pow(std::sin(times[k] / 2.0), 2), 1e-12);
  }
}

TEST(IndefinitenessScan, CommutingProjectorIsIdenticallyZero) {
  const Hamiltonian h{LinearOperator(testing::pauli_z())};
  const LinearOperator p0 = LinearOperator::projector_onto(PureState::basis(2, 0));
  const IndefinitenessScan scan = indefiniteness_scan(h, PureState::basis(2, 1), p0, linspace(0.0, 20.0, 1000));
  EXPECT_EQ(scan.classification, ScanClass::kIdenticallyZero);
  EXPECT_EQ(to_string(scan.classification), "identically-zero");
}

TEST(IndefinitenessScan, GenericSystemNeverZero) {
  std::mt19937_64 rng(77);
  const Hamiltonian h(random_hermitian(8, rng));
  const LinearOperator p = random_projector(8, 3, rng);
  const PureState psi = random_state(8, rng);
  const IndefinitenessScan scan = indefiniteness_scan(h, psi, p, linspace(0.0, 50.0, 2000));
  EXPECT_EQ(scan.classification, ScanClass::kNeverZero);
  EXPECT_GT(scan.min_value, kNumericalZero);
  EXPECT_TRUE(scan.zero_times.empty());
}

TEST(IndefinitenessScan, RejectsShortOrUnsortedGrids) {
  const Hamiltonian h{LinearOperator(testing::pauli_z())};
  const LinearOperator p0 = LinearOperator::projector_onto(PureState::basis(2, 0));
  EXPECT_THROW(indefiniteness_scan(h, PureState::basis(2, 1), p0, linspace(0.0, 1.0, 999)), Error);
  std::vector<double> t = linspace(0.0, 1.0, 1000);
  std::swap(t[3], t[4]);
  EXPECT_THROW(indefiniteness_scan(h, PureState::basis(2, 1), p0, t), Error);
  Matrix not_projector = 0.5 * Matrix::Identity(2, 2);
  EXPECT_THROW(indefiniteness_scan(h, PureState::basis(2, 1), LinearOperator(not_projector),
                                   linspace(0.0, 1.0, 1000)),
               Error);
}

TEST(InvariantSubspace, CommutingVersusGeneric) {
  const std::array<double, 3> values{0.0, 1.0, 2.0};
  const Observable diag = Observable::diagonal(values);
  Matrix hd = Matrix::Zero(3, 3);
  hd(0, 0) = 3.0;
  hd(1, 1) = -1.0;
  hd(2, 2) = 0.5;
  for (bool b : invariant_subspace_check(Hamiltonian(LinearOperator(hd)), diag)) EXPECT_TRUE(b);

  std::mt19937_64 rng(4);
  const Hamiltonian generic(random_hermitian(3, rng));
  for (bool b : invariant_subspace_check(generic, diag)) EXPECT_FALSE(b);
}

TEST(CompleteIndefiniteness, GenericFractionNearOne) {
  std::mt19937_64 rng(12);
  const Hamiltonian h(random_hermitian(6, rng));
  const Observable obs = spectral_decompose(random_hermitian(6, rng));
  const std::vector<double> times = linspace(0.0, 10.0, 50);
  const double f = complete_indefiniteness_fraction(h, obs, times, 20, 3);
  EXPECT_GE(f, 0.99);
  EXPECT_EQ(f, complete_indefiniteness_fraction(h, obs, times, 20, 3));
}

}  // namespace
}  // namespace qmt
