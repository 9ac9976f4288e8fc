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

/**
 * @file
 * Von Neumann measurement models: a system observable is recorded in a
 * discrete pointer by a unitary U with U |o_i>|m_0> = |phi_i>|m_i>.
 *
 * The pointer basis is the computational basis of a pointer_dim space. The
 * ready state is basis vector `ready_index`; outcome i is recorded in the
 * i-th remaining basis vector.
 */
#pragma once

#include <optional>
#include <vector>

#include "qmt/hilbert.hpp"
#include "qmt/measurement.hpp"

namespace qmt {

struct MeasurementModelSpec {
  Observable observable;
  Index pointer_dim = 0;  // 0 selects outcome count + 1
  Index ready_index = 0;
  /// Post-measurement system states |phi_i>; empty means non-disturbing.
  std::vector<PureState> post_states;
};

class MeasurementModel {
 public:
  const Observable& observable() const { return observable_; }
  Index system_dim() const { return observable_.dim(); }
  Index pointer_dim() const { return pointer_dim_; }
  Index ready_index() const { return ready_index_; }
  std::size_t outcome_count() const { return observable_.size(); }
  Index pointer_index(std::size_t outcome) const { return pointer_indices_.at(outcome); }
  const PureState& post_state(std::size_t outcome) const { return post_states_.at(outcome); }
  const LinearOperator& interaction() const { return interaction_; }

  /// System eigenvector |o_i> for the nondegenerate outcome i.
  Vector outcome_state(std::size_t outcome) const;

 private:
  friend MeasurementModel build_measurement_unitary(const MeasurementModelSpec& spec);
  MeasurementModel(Observable obs, Index pointer_dim, Index ready, std::vector<Index> pointers,
                   std::vector<PureState> post, LinearOperator u)
      : observable_(std::move(obs)),
        pointer_dim_(pointer_dim),
        ready_index_(ready),
        pointer_indices_(std::move(pointers)),
        post_states_(std::move(post)),
        interaction_(std::move(u)) {}

  Observable observable_;
  Index pointer_dim_;
  Index ready_index_;
  std::vector<Index> pointer_indices_;
  std::vector<PureState> post_states_;
  LinearOperator interaction_;
};

/// Builds the full unitary on system (x) pointer by orthonormally completing
/// the prescribed columns with a Householder QR. Throws kInvalidArgument for a
/// degenerate observable or too small a pointer, kNonExtendable if the mapped
/// images fail to be orthonormal.
MeasurementModel build_measurement_unitary(const MeasurementModelSpec& spec);

/// Pointer statistics after one interaction, labelled by the recorded
/// eigenvalue {o_i}.
OutcomeDistribution modeled_single_measurement(const PureState& state, const MeasurementModel& model);

/// Two interactions with fresh pointers on system (x) pointer (x) pointer;
/// labels {o_i, o_j} for (first record, second record).
OutcomeDistribution repeated_measurement_joint(const PureState& state, const MeasurementModel& model);

/// Textbook prediction from collapsing after the first measurement:
/// Pr(o_i, o_j) = delta_ij <psi|P_i|psi>.
OutcomeDistribution collapse_rule_joint(const PureState& state, const Observable& obs);

}  // namespace qmt
