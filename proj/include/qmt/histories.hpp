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
 * Histories: time-ordered sequences of projectors, their class operators,
 * the decoherence functional D(a, b) = Tr(C_a rho C_b^dagger), and the
 * medium-decoherence consistency test that licenses reading its diagonal as
 * probabilities.
 */
#pragma once

#include <cstddef>
#include <vector>

#include "qmt/dynamics.hpp"
#include "qmt/hilbert.hpp"
#include "qmt/measurement.hpp"

namespace qmt {

/// Complete family of orthogonal projectors at one time.
using ProjectorFamily = std::vector<LinearOperator>;
/// One projector index per time.
using HistoryLabel = std::vector<std::size_t>;

inline constexpr double kFamilyTolerance = 1e-9;
inline constexpr double kDefaultConsistencyEps = 1e-8;

class HistorySet {
 public:
  /// `times` must satisfy t0 <= t1 < t2 < ...; one family per time.
  HistorySet(Hamiltonian h, const PureState& initial, double t0, std::vector<double> times,
             std::vector<ProjectorFamily> families);
  HistorySet(Hamiltonian h, const DensityOperator& initial, double t0, std::vector<double> times,
             std::vector<ProjectorFamily> families);

  Index dim() const { return hamiltonian_.dim(); }
  std::size_t length() const { return times_.size(); }
  double initial_time() const { return t0_; }
  const std::vector<double>& times() const { return times_; }
  const ProjectorFamily& family(std::size_t m) const { return families_.at(m); }
  const Hamiltonian& hamiltonian() const { return hamiltonian_; }

  /// Eigen-decomposition of the initial state as (weight, vector) pairs.
  const std::vector<std::pair<double, Vector>>& initial_branches() const { return branches_; }

  std::size_t history_count() const;
  /// All histories in lexicographic order; D is indexed the same way.
  std::vector<HistoryLabel> histories() const;
  /// U(t_m - t_{m-1}) with t_{-1} = t0.
  const Matrix& step(std::size_t m) const { return steps_.at(m); }

 private:
  void validate_and_prepare();

  Hamiltonian hamiltonian_;
  std::vector<std::pair<double, Vector>> branches_;
  double t0_;
  std::vector<double> times_;
  std::vector<ProjectorFamily> families_;
  std::vector<Matrix> steps_;
};

/// C_a = P^n_{a_n} U(t_n - t_{n-1}) ... P^1_{a_1} U(t_1 - t0). Throws
/// kInvalidIndex for a malformed label.
LinearOperator class_operator(const HistorySet& hs, const HistoryLabel& history);

class DecoherenceFunctional {
 public:
  /// Validates hermiticity (1e-10), diagonal >= -1e-10 and unit total (1e-9).
  DecoherenceFunctional(Matrix d, std::vector<HistoryLabel> labels);

  std::size_t size() const { return labels_.size(); }
  const Matrix& matrix() const { return d_; }
  Complex operator()(std::size_t a, std::size_t b) const { return d_(static_cast<Index>(a), static_cast<Index>(b)); }
  const std::vector<HistoryLabel>& labels() const { return labels_; }
  /// Position of `history` in labels(); throws kInvalidIndex if absent.
  std::size_t index_of(const HistoryLabel& history) const;

 private:
  Matrix d_;
  std::vector<HistoryLabel> labels_;
};

DecoherenceFunctional decoherence_functional(const HistorySet& hs);

struct ConsistencyReport {
  bool consistent;
  /// max over a != b of |D(a,b)| / sqrt(D(a,a) D(b,b)).
  double worst_ratio;
};

/// Pairs where either diagonal entry is below kVacuousDiagonal pass vacuously.
inline constexpr double kVacuousDiagonal = 1e-14;

ConsistencyReport is_consistent(const DecoherenceFunctional& d, double eps = kDefaultConsistencyEps);

/// Pr(a) = D(a,a) labelled by the index tuple; throws kInconsistentFamily
/// unless is_consistent(d, eps).
OutcomeDistribution history_probabilities(const DecoherenceFunctional& d,
                                          double eps = kDefaultConsistencyEps);

/// Merges histories: D'(A,B) = sum over a in A, b in B of D(a,b). Groups must
/// partition the histories; `labels` names the merged histories.
DecoherenceFunctional coarse_grain(const DecoherenceFunctional& d,
                                   const std::vector<std::vector<std::size_t>>& groups,
                                   std::vector<HistoryLabel> labels);

/// Pr(a_n | a_1..a_{n-1} = prefix) from the diagonal of D, labelled by a_n.
/// Throws kImpossibleOutcome when the prefix has zero weight.
OutcomeDistribution conditional_next(const DecoherenceFunctional& d, const HistoryLabel& prefix);

/// Two displaced packets (the state just past the slits), free evolution, and
/// histories "which slit at t0" then "which screen cell at t0 + T".
struct TwoSlitSetup {
  Index grid_points = 128;
  double box_length = 40.0;
  double mass = 1.0;
  double separation = 2.5;  ///< packets at -separation and +separation
  double width = 1.2;
  double screen_time = 6.0;
  Index screen_cells = 16;
  /// Couples a two-state pointer to the slit projectors before the
  /// histories start, recording which way the particle went.
  bool which_way = false;
};

HistorySet two_slit_histories(const TwoSlitSetup& setup);

struct TwoSlitPattern {
  std::vector<double> p1;     ///< D(1x, 1x)
  std::vector<double> p2;     ///< D(2x, 2x)
  std::vector<double> joint;  ///< screen-cell probability without slit record
  std::vector<double> interference;  ///< joint - p1 - p2
  double max_interference;
  ConsistencyReport consistency;
};

TwoSlitPattern two_slit_pattern(const TwoSlitSetup& setup, double eps = kDefaultConsistencyEps);

}  // namespace qmt
