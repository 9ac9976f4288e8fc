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
 * Born rule, projective collapse, seeded outcome sampling and POVMs.
 *
 * Outcome labels are small real tuples: a PVM outcome is {eigenvalue}, a
 * fuzzy-POVM outcome is {k}, a phase-space cell is {a, b}, and joint or
 * history outcomes concatenate their parts.
 */
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qmt/dynamics.hpp"
#include "qmt/hilbert.hpp"

namespace qmt {

using OutcomeLabel = std::vector<double>;

struct Outcome {
  OutcomeLabel label;
  double probability;
};

inline constexpr double kDistributionTolerance = 1e-10;
inline constexpr double kNegativeClampLimit = 1e-9;

/// Finite probability distribution over labelled outcomes. Roundoff negatives
/// down to -1e-9 are clamped to zero; anything lower, or a total further than
/// `sum_tolerance` from one, is rejected with kInvalidDistribution.
class OutcomeDistribution {
 public:
  explicit OutcomeDistribution(std::vector<Outcome> entries,
                               double sum_tolerance = kDistributionTolerance);

  const std::vector<Outcome>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  const Outcome& operator[](std::size_t i) const { return entries_[i]; }

  /// Probability of `label`, or nullopt when the label is absent.
  std::optional<double> probability(const OutcomeLabel& label) const;
  double total() const;

 private:
  std::vector<Outcome> entries_;
};

/// Half the L1 distance; labels absent from one side count as probability zero.
double total_variation(const OutcomeDistribution& a, const OutcomeDistribution& b);

/// Pr(o_i) = <psi|P_i|psi> (or Tr rho P_i), ascending eigenvalue order.
OutcomeDistribution born_distribution(const PureState& state, const Observable& obs);
OutcomeDistribution born_distribution(const DensityOperator& rho, const Observable& obs);

/// P_i psi / |P_i psi| for outcome index i (ascending eigenvalue order).
/// Throws kImpossibleOutcome when <psi|P_i|psi> <= 1e-12.
PureState collapse(const PureState& state, const Observable& obs, std::size_t outcome);

/// Inverse-CDF draw in the distribution's listed order; deterministic in seed.
OutcomeLabel sample_outcome(const OutcomeDistribution& dist, std::uint64_t seed);

/// One POVM effect stored as M = B B^dag (B is dim x rank).
struct Effect {
  OutcomeLabel label;
  Matrix factor;
};

inline constexpr double kPovmPositivityTolerance = 1e-9;
inline constexpr double kPovmCompletenessTolerance = 1e-8;

class Povm {
 public:
  /// Validates sum_k M_k = 1 within `completeness_tol` (operator norm).
  explicit Povm(std::vector<Effect> effects, double completeness_tol = kPovmCompletenessTolerance);

  /// Factors dense effects; rejects any with an eigenvalue below -1e-9.
  static Povm from_operators(const std::vector<std::pair<OutcomeLabel, LinearOperator>>& effects,
                             double completeness_tol = kPovmCompletenessTolerance);
  static Povm from_observable(const Observable& obs);

  Index dim() const { return dim_; }
  std::size_t size() const { return effects_.size(); }
  const Effect& effect(std::size_t k) const { return effects_.at(k); }
  LinearOperator effect_operator(std::size_t k) const;
  double completeness_deficit() const { return deficit_; }
  double completeness_tolerance() const { return tolerance_; }

 private:
  std::vector<Effect> effects_;
  Index dim_;
  double deficit_;
  double tolerance_;
};

/// || sum_k B_k B_k^dag - 1 || in operator norm.
double completeness_deficit(const std::vector<Effect>& effects, Index dim);

/// Pr(k) = <psi|M_k|psi> (or Tr rho M_k).
OutcomeDistribution povm_distribution(const PureState& state, const Povm& povm);
OutcomeDistribution povm_distribution(const DensityOperator& rho, const Povm& povm);

/// Smeared measurement M_k = sum_i f(k, i) P_i. `smearing` has one row per
/// outcome k and one column per eigenvalue of `obs`; each column must be a
/// probability vector (kInvalidSmearing otherwise).
Povm build_fuzzy_povm(const Observable& obs, const Eigen::MatrixXd& smearing);

struct PhaseSpacePovm {
  Povm povm;
  double completeness_deficit;
  double weight;
  std::vector<double> momenta;    // p_a per momentum cell
  std::vector<double> positions;  // q_b per position cell
};

/// Coherent-state POVM w |phi(p_a, q_b)><phi(p_a, q_b)| with
/// |phi(p, q)> = exp(i X p) exp(-i P q) |phi>, |phi> a Gaussian of width L at
/// the origin, and w = N / (#cells). Cells are evenly strided over the grid's
/// wavenumbers and positions; labels are {a, b}. Throws kIncompleteTiling when
/// the cell counts do not divide N or the completeness deficit exceeds 1e-6.
PhaseSpacePovm build_phase_space_povm(const GridSpace& g, double width, Index momentum_cells,
                                      Index position_cells);

inline constexpr double kPhaseSpaceCompletenessTolerance = 1e-6;

}  // namespace qmt
