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

#include "qmt/modeling.hpp"

#include <array>
#include <random>

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace qmt {
namespace {

using testing::max_abs;

Observable sigma_z() { return spectral_decompose(LinearOperator(testing::pauli_z())); }

MeasurementModel nondisturbing(const Observable& obs) {
  MeasurementModelSpec spec{obs, 0, 0, {}};
  return build_measurement_unitary(spec);
}

TEST(MeasurementUnitary, IsUnitaryAndRecordsEigenstates) {
  const MeasurementModel m = nondisturbing(sigma_z());
  EXPECT_EQ(m.pointer_dim(), 3);
  const Matrix& u = m.interaction().matrix();
  EXPECT_LT(max_abs(u.adjoint() * u - Matrix::Identity(6, 6)), 1e-12);
  for (std::size_t i = 0; i < 2; ++i) {
    const Vector in = tensor_product(PureState(m.outcome_state(i)), PureState::basis(3, m.ready_index())).amplitudes();
    const Vector want =
        tensor_product(PureState(m.outcome_state(i)), PureState::basis(3, m.pointer_index(i))).amplitudes();
    EXPECT_LT((u * in - want).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(MeasurementUnitary, NonzeroReadyIndex) {
  MeasurementModelSpec spec{sigma_z(), 4, 2, {}};
  const MeasurementModel m = build_measurement_unitary(spec);
  EXPECT_NE(m.pointer_index(0), 2);
  EXPECT_NE(m.pointer_index(1), 2);
  std::mt19937_64 rng(1);
  const PureState psi = random_state(2, rng);
  EXPECT_LT(total_variation(modeled_single_measurement(psi, m), born_distribution(psi, sigma_z())), 1e-12);
}

TEST(MeasurementUnitary, RejectsDegenerateObservableAndSmallPointer) {
  const std::array<double, 3> degenerate{1.0, 1.0, 2.0};
  try {
    nondisturbing(Observable::diagonal(degenerate));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
  }
  MeasurementModelSpec small{sigma_z(), 2, 0, {}};
  EXPECT_THROW(build_measurement_unitary(small), Error);
  MeasurementModelSpec bad_ready{sigma_z(), 3, 3, {}};
  try {
    build_measurement_unitary(bad_ready);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidIndex);
  }
  MeasurementModelSpec wrong_count{sigma_z(), 0, 0, {testing::plus_x()}};
  EXPECT_THROW(build_measurement_unitary(wrong_count), Error);
}

class RandomModel : public ::testing::TestWithParam<int> {};

TEST_P(RandomModel, SingleMeasurementReproducesBornRule) {
  std::mt19937_64 rng(static_cast<std::uint64_t>(GetParam()));
  const Observable obs = spectral_decompose(random_hermitian(3, rng));
  const MeasurementModel m = nondisturbing(obs);
  for (int k = 0; k < 5; ++k) {
    const PureState psi = random_state(3, rng);
    const OutcomeDistribution modeled = modeled_single_measurement(psi, m);
    // Direct oracle: |<o_i|psi>|^2.
    for (std::size_t i = 0; i < obs.size(); ++i) {
      const double direct = std::norm(m.outcome_state(i).dot(psi.amplitudes()));
      EXPECT_NEAR(*modeled.probability({obs.eigenvalue(i)}), direct, 1e-10);
    }
  }
}

TEST_P(RandomModel, NondisturbingRepeatIsPerfectlyCorrelated) {
  std::mt19937_64 rng(static_cast<std::uint64_t>(GetParam()) + 100);
  const Observable obs = spectral_decompose(random_hermitian(3, rng));
  const PureState psi = random_state(3, rng);
  const MeasurementModel m = nondisturbing(obs);
  const OutcomeDistribution joint = repeated_measurement_joint(psi, m);
  EXPECT_LT(total_variation(joint, collapse_rule_joint(psi, obs)), 1e-10);
  double off = 0.0;
  for (const Outcome& o : joint.entries()) {
    if (o.label[0] != o.label[1]) off += o.probability;
  }
  EXPECT_LT(off, 1e-10);
}

INSTANTIATE_TEST_SUITE_P(Seeds, RandomModel, ::testing::Range(0, 6));

TEST(RepeatedMeasurement, DisturbingModelRandomizesSecondRecord) {
  // Both outcomes leave the system in +x: the second sigma_z reading is a coin flip.
  MeasurementModelSpec spec{sigma_z(), 0, 0, {testing::plus_x(), testing::plus_x()}};
  const MeasurementModel m = build_measurement_unitary(spec);
  std::mt19937_64 rng(9);
  const PureState psi = random_state(2, rng);
  const OutcomeDistribution joint = repeated_measurement_joint(psi, m);
  const double p_up = std::norm(psi[0]);
  EXPECT_NEAR(*joint.probability({1.0, 1.0}), 0.5 * p_up, 1e-10);
  EXPECT_NEAR(*joint.probability({1.0, -1.0}), 0.5 * p_up, 1e-10);
  EXPECT_NEAR(*joint.probability({-1.0, 1.0}), 0.5 * (1.0 - p_up), 1e-10);
  EXPECT_NEAR(total_variation(joint, collapse_rule_joint(psi, sigma_z())), 0.5, 1e-10);
}

TEST(RepeatedMeasurement, GeneralPostStatesFollowTransitionProbabilities) {
  std::mt19937_64 rng(31);
  const Observable obs = spectral_decompose(random_hermitian(3, rng));
  std::vector<PureState> post;
  for (int i = 0; i < 3; ++i) post.push_back(random_state(3, rng));
  MeasurementModelSpec spec{obs, 0, 0, post};
  const MeasurementModel m = build_measurement_unitary(spec);
  const PureState psi = random_state(3, rng);
  const OutcomeDistribution joint = repeated_measurement_joint(psi, m);
  for (std::size_t i = 0; i < 3; ++i) {
    const double pi = std::norm(m.outcome_state(i).dot(psi.amplitudes()));
    for (std::size_t j = 0; j < 3; ++j) {
      const double tij = std::norm(m.outcome_state(j).dot(post[i].amplitudes()));
      EXPECT_NEAR(*joint.probability({obs.eigenvalue(i), obs.eigenvalue(j)}), pi * tij, 1e-10);
    }
  }
}

TEST(CollapseRuleJoint, DiagonalOnly) {
  const OutcomeDistribution j = collapse_rule_joint(testing::plus_x(), sigma_z());
  EXPECT_NEAR(*j.probability({1.0, 1.0}), 0.5, 1e-15);
  EXPECT_NEAR(*j.probability({1.0, -1.0}), 0.0, 1e-15);
  EXPECT_THROW(collapse_rule_joint(PureState::basis(3, 0), sigma_z()), Error);
}

}  // namespace
}  // namespace qmt
