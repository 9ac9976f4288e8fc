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

#include "qmt/measurement.hpp"

#include <array>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace qmt {
namespace {

using testing::max_abs;

Observable sigma_z() { return spectral_decompose(LinearOperator(testing::pauli_z())); }

TEST(BornDistribution, SpinExamples) {
  const OutcomeDistribution up = born_distribution(testing::plus_z(), sigma_z());
  EXPECT_NEAR(*up.probability({1.0}), 1.0, 1e-15);
  EXPECT_NEAR(*up.probability({-1.0}), 0.0, 1e-15);
  const OutcomeDistribution x = born_distribution(testing::plus_x(), sigma_z());
  EXPECT_NEAR(*x.probability({1.0}), 0.5, 1e-15);
  EXPECT_NEAR(*x.probability({-1.0}), 0.5, 1e-15);
  // Ascending eigenvalue order.
  EXPECT_EQ(x[0].label, OutcomeLabel{-1.0});
}

TEST(BornDistribution, RotatedSpinGivesSquaredAmplitudes) {
  for (double theta : {0.3, 1.1, 2.9}) {
    const PureState s = testing::ket({std::cos(theta / 2), std::sin(theta / 2)});
    const OutcomeDistribution d = born_distribution(s, sigma_z());
    EXPECT_NEAR(*d.probability({1.0}), std::pow(std::cos(theta / 2), 2), 1e-14);
  }
}

TEST(BornDistribution, DimensionMismatch) {
  try {
    born_distribution(PureState::basis(3, 0), sigma_z());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDimensionMismatch);
  }
}

TEST(BornDistribution, PermutingSpectrumPermutesProbabilities) {
  std::mt19937_64 rng(1);
  const PureState psi = random_state(4, rng);
  const std::array<double, 4> a{1.0, 2.0, 3.0, 4.0};
  const std::array<double, 4> b{4.0, 3.0, 2.0, 1.0};
  const OutcomeDistribution da = born_distribution(psi, Observable::diagonal(a));
  const OutcomeDistribution db = born_distribution(psi, Observable::diagonal(b));
  for (double v : a) EXPECT_NEAR(*da.probability({v}), *db.probability({5.0 - v}), 1e-15);
}

TEST(OutcomeDistribution, ClampsRoundoffAndRejectsRealNegatives) {
  const OutcomeDistribution ok({{{0.0}, 1.0 + 5e-11}, {{1.0}, -5e-11}});
  EXPECT_EQ(ok[1].probability, 0.0);
  EXPECT_THROW(OutcomeDistribution({{{0.0}, 1.1}, {{1.0}, -0.1}}), Error);
  EXPECT_THROW(OutcomeDistribution({{{0.0}, 0.5}}), Error);
}

TEST(Collapse, ProjectsAndNormalizes) {
  const PureState c = collapse(testing::plus_x(), sigma_z(), 1);
  EXPECT_NEAR(testing::fidelity(c.amplitudes(), testing::plus_z().amplitudes()), 1.0, 1e-15);
  const PureState same = collapse(testing::minus_z(), sigma_z(), 0);
  EXPECT_NEAR(testing::fidelity(same.amplitudes(), testing::minus_z().amplitudes()), 1.0, 1e-15);
}

TEST(Collapse, ImpossibleOutcome) {
  try {
    collapse(testing::plus_z(), sigma_z(), 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kImpossibleOutcome);
  }
}

TEST(Collapse, DegenerateProjectorMatchesDirectFormula) {
  std::mt19937_64 rng(17);
  const PureState psi = random_state(4, rng);
  const LinearOperator p = random_projector(4, 2, rng);
  const std::array<std::pair<double, LinearOperator>, 2> res{
      std::pair{0.0, LinearOperator::identity(4) - p}, std::pair{1.0, p}};
  const Observable obs = Observable::from_projectors(res);
  const PureState c = collapse(psi, obs, 1);
  Vector direct = p.matrix() * psi.amplitudes();
  direct.normalize();
  EXPECT_NEAR(testing::fidelity(c.amplitudes(), direct), 1.0, 1e-12);
  EXPECT_LT((c.amplitudes() - direct).cwiseAbs().maxCoeff(), 1e-12);
  // Idempotent and repeatable.
  const PureState again = collapse(c, obs, 1);
  EXPECT_LT((again.amplitudes() - c.amplitudes()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(*born_distribution(c, obs).probability({1.0}), 1.0, 1e-10);
}

TEST(SampleOutcome, PointMassAndDeterminism) {
  const OutcomeDistribution point({{{7.0}, 1.0}});
  for (std::uint64_t s = 0; s < 50; ++s) EXPECT_EQ(sample_outcome(point, s), OutcomeLabel{7.0});
  const OutcomeDistribution fair({{{1.0}, 0.5}, {{-1.0}, 0.5}});
  EXPECT_EQ(sample_outcome(fair, 42), sample_outcome(fair, 42));
}

TEST(SampleOutcome, EmpiricalFrequency) {
  const OutcomeDistribution fair({{{1.0}, 0.5}, {{-1.0}, 0.5}});
  int ups = 0;
  const int n = 100000;
  for (int s = 0; s < n; ++s) ups += sample_outcome(fair, static_cast<std::uint64_t>(s)) == OutcomeLabel{1.0};
  // 0.01 is about 6 binomial standard deviations.
  EXPECT_NEAR(static_cast<double>(ups) / n, 0.5, 0.01);
}

TEST(Povm, EmbeddedPvmMatchesBorn) {
  std::mt19937_64 rng(2);
  const Observable obs = spectral_decompose(random_hermitian(5, rng));
  const PureState psi = random_state(5, rng);
  const OutcomeDistribution a = povm_distribution(psi, Povm::from_observable(obs));
  const OutcomeDistribution b = born_distribution(psi, obs);
  EXPECT_LT(total_variation(a, b), 1e-14);
}

TEST(Povm, TrivialHalfHalf) {
  const LinearOperator half(0.5 * Matrix::Identity(3, 3));
  const Povm povm = Povm::from_operators({{{0.0}, half}, {{1.0}, half}});
  std::mt19937_64 rng(3);
  const OutcomeDistribution d = povm_distribution(random_state(3, rng), povm);
  EXPECT_NEAR(d[0].probability, 0.5, 1e-14);
  EXPECT_NEAR(d[1].probability, 0.5, 1e-14);
}

TEST(Povm, RejectsNegativeOrIncompleteEffects) {
  Matrix neg(2, 2);
  neg << 1.2, 0.0, 0.0, -0.2;
  Matrix comp(2, 2);
  comp << -0.2, 0.0, 0.0, 1.2;
  try {
    Povm::from_operators({{{0.0}, LinearOperator(neg)}, {{1.0}, LinearOperator(comp)}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidPovm);
  }
  try {
    Povm::from_operators({{{0.0}, LinearOperator(0.4 * Matrix::Identity(2, 2))}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidPovm);
  }
}

TEST(Povm, TotalProbabilityOnRandomStates) {
  std::mt19937_64 rng(11);
  const Observable obs = spectral_decompose(random_hermitian(4, rng));
  Eigen::MatrixXd f(3, 4);
  f << 0.5, 0.2, 0.1, 0.0,  //
      0.5, 0.6, 0.3, 0.25,  //
      0.0, 0.2, 0.6, 0.75;
  const Povm povm = build_fuzzy_povm(obs, f);
  for (int k = 0; k < 100; ++k) {
    EXPECT_NEAR(povm_distribution(random_state(4, rng), povm).total(), 1.0, 1e-8);
  }
}

TEST(FuzzyPovm, DeltaSmearingIsSharp) {
  std::mt19937_64 rng(5);
  const Observable obs = spectral_decompose(random_hermitian(4, rng));
  const Povm povm = build_fuzzy_povm(obs, Eigen::MatrixXd::Identity(4, 4));
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_LT(max_abs(povm.effect_operator(k).matrix() - obs.projector(k).matrix()), 1e-12);
  }
  const PureState psi = random_state(4, rng);
  const OutcomeDistribution fuzzy = povm_distribution(psi, povm);
  const OutcomeDistribution sharp = born_distribution(psi, obs);
  for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(fuzzy[k].probability, sharp[k].probability, 1e-12);
}

TEST(FuzzyPovm, UniformSmearingIsMultipleOfIdentity) {
  std::mt19937_64 rng(6);
  const Observable obs = spectral_decompose(random_hermitian(3, rng));
  const Povm povm = build_fuzzy_povm(obs, Eigen::MatrixXd::Constant(3, 3, 1.0 / 3.0));
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_LT(max_abs(povm.effect_operator(k).matrix() - Matrix::Identity(3, 3) / 3.0), 1e-12);
  }
}

TEST(FuzzyPovm, BinarySymmetricConfusion) {
  const double eps = 0.1;
  Eigen::MatrixXd f(2, 2);
  f << 1.0 - eps, eps, eps, 1.0 - eps;  // row k, column i (ascending: -1, +1)
  const Povm povm = build_fuzzy_povm(sigma_z(), f);
  const OutcomeDistribution up = povm_distribution(testing::plus_z(), povm);
  EXPECT_NEAR(up[1].probability, 1.0 - eps, 1e-14);
  EXPECT_NEAR(up[0].probability, eps, 1e-14);

  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const PureState psi = random_state(2, rng);
    const OutcomeDistribution sharp = born_distribution(psi, sigma_z());
    const OutcomeDistribution fuzzy = povm_distribution(psi, povm);
    // Two-point convolution oracle.
    EXPECT_NEAR(fuzzy[0].probability, (1 - eps) * sharp[0].probability + eps * sharp[1].probability, 1e-14);
    EXPECT_NEAR(fuzzy[1].probability, eps * sharp[0].probability + (1 - eps) * sharp[1].probability, 1e-14);
  }
}

TEST(FuzzyPovm, InvalidSmearing) {
  Eigen::MatrixXd bad(2, 2);
  bad << 0.7, 0.5, 0.2, 0.5;
  Eigen::MatrixXd negative(2, 2);
  negative << 1.1, 0.5, -0.1, 0.5;
  for (const Eigen::MatrixXd& f : {bad, negative}) {
    try {
      build_fuzzy_povm(sigma_z(), f);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kInvalidSmearing);
    }
  }
}

TEST(PhaseSpacePovm, CompleteOn64PointGrid) {
  const GridSpace g(64, 32.0);
  const PhaseSpacePovm ps = build_phase_space_povm(g, 2.0, 64, 64);
  EXPECT_LT(ps.completeness_deficit, 1e-6);
  EXPECT_EQ(ps.povm.size(), 64u * 64u);
  // Independent dense sum.
  Matrix sum = Matrix::Zero(64, 64);
  for (std::size_t k = 0; k < ps.povm.size(); ++k) sum += ps.povm.effect_operator(k).matrix();
  EXPECT_LT(operator_norm(sum - Matrix::Identity(64, 64)), 1e-6);
}

TEST(PhaseSpacePovm, IncompleteTiling) {
  const GridSpace g(64, 32.0);
  try {
    build_phase_space_povm(g, 2.0, 60, 64);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIncompleteTiling);
  }
}

TEST(PhaseSpacePovm, CellStatePeaksAtItsOwnCell) {
  const GridSpace g(64, 32.0);
  const PhaseSpacePovm ps = build_phase_space_povm(g, 2.0, 64, 64);
  const std::size_t a0 = 40, b0 = 20;
  const Vector cell = ps.povm.effect(a0 * 64 + b0).factor.col(0);
  const OutcomeDistribution d = povm_distribution(PureState(cell), ps.povm);
  std::size_t best = 0;
  for (std::size_t k = 1; k < d.size(); ++k) {
    if (d[k].probability > d[best].probability) best = k;
  }
  EXPECT_EQ(d[best].label, (OutcomeLabel{static_cast<double>(a0), static_cast<double>(b0)}));
}

TEST(PhaseSpacePovm, PositionMarginalIsSmearedSharpMarginal) {
  const GridSpace g(128, 128.0);
  const double cell_width = 3.5;
  const PhaseSpacePovm ps = build_phase_space_povm(g, cell_width, 128, 128);
  const PureState psi = gaussian_packet(g, 5.0, 0.3, 12.0);
  const OutcomeDistribution d = povm_distribution(psi, ps.povm);

  std::vector<double> marginal(128, 0.0);
  for (const Outcome& o : d.entries()) marginal[static_cast<std::size_t>(o.label[1])] += o.probability;

  // Convolution oracle: sum_j |phi(x_j - q_b)|^2 |psi_j|^2 with periodic distance.
  const PureState phi = gaussian_packet(g, 0.0, 0.0, cell_width);
  double tv_sharp = 0.0;
  double mean_m = 0.0, mean_s = 0.0, var_m = 0.0, var_s = 0.0;
  for (Index b = 0; b < 128; ++b) {
    double conv = 0.0;
    for (Index j = 0; j < 128; ++j) {
      const Index offset = ((j - b) % 128 + 128 + 64) % 128;  // x_j - q_b centred on index 64
      conv += std::norm(phi[offset]) * std::norm(psi[j]);
    }
    EXPECT_NEAR(marginal[static_cast<std::size_t>(b)], conv, 1e-12);
    const double sharp = std::norm(psi[b]);
    tv_sharp += 0.5 * std::abs(marginal[static_cast<std::size_t>(b)] - sharp);
    const double x = g.position(b);
    mean_m += x * marginal[static_cast<std::size_t>(b)];
    mean_s += x * sharp;
    var_m += x * x * marginal[static_cast<std::size_t>(b)];
    var_s += x * x * sharp;
  }
  EXPECT_LT(tv_sharp, 0.05);
  // Smearing never narrows the distribution.
  EXPECT_GT(var_m - mean_m * mean_m, var_s - mean_s * mean_s);
}

}  // namespace
}  // namespace qmt
