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
 * Eigenstate-based definiteness and the time structure of its failure:
 * region projectors on the grid, instantaneous leakage of compactly
 * supported states, and classification of <psi(t)|P|psi(t)> as identically
 * zero, zero at isolated instants, or never zero.
 */
#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "qmt/dynamics.hpp"
#include "qmt/hilbert.hpp"

namespace qmt {

inline constexpr double kNumericalZero = 1e-10;

struct DefinitenessReport {
  enum class Status { kDefinite, kIndefinite };

  Status status;
  /// Definite: the eigenvalue and ||psi - P_i psi||.
  double value = 0.0;
  double residual = 0.0;
  /// Indefinite: (eigenvalue, Born weight) for every outcome that is not
  /// numerically excluded.
  std::vector<std::pair<double, double>> support;

  bool definite() const { return status == Status::kDefinite; }
};

/// psi definitely has value o_i iff ||psi - P_i psi|| < eta. Otherwise the
/// support lists outcomes with weight above eta^2 (amplitude above eta),
/// padded with the next-largest weights so it always has two entries.
DefinitenessReport ee_link_status(const PureState& state, const Observable& obs,
                                  double eta = kNumericalZero);

/// Half-open grid index window [first, last).
struct IndexWindow {
  Index first;
  Index last;

  Index size() const { return last - first; }
  bool contains(Index j) const { return j >= first && j < last; }
};

/// Diagonal 0/1 projector onto the grid points in `window` (identity for the
/// whole grid). Throws kEmptyRegion / kInvalidIndex.
Observable region_projector(const GridSpace& g, IndexWindow window);

/// Gaussian of width L centred at x0, set exactly to zero outside `window`
/// and renormalized.
PureState truncated_gaussian(const GridSpace& g, IndexWindow window, double x0, double width);

/// Probability outside `window` after evolving `initial` for time eps.
/// `initial` must vanish identically outside the window.
double delocalization_demo(const GridSpace& g, const Hamiltonian& h, const PureState& initial,
                           IndexWindow window, double eps);

enum class ScanClass { kIdenticallyZero, kIsolatedZeros, kNeverZero };

std::string_view to_string(ScanClass c);

struct IndefinitenessScan {
  std::vector<double> times;
  std::vector<double> series;
  ScanClass classification;
  /// Instants where the expectation drops to eta or below, refined between
  /// grid points; one entry per zero.
  std::vector<double> zero_times;
  double min_value;
};

inline constexpr std::size_t kMinimumScanPoints = 1000;

/// Tabulates <psi(t)|P|psi(t)> on `times` (ascending, at least 1000 points)
/// and classifies it. Interior local minima above eta are refined with Brent
/// minimization so zeros between grid points are not missed.
IndefinitenessScan indefiniteness_scan(const Hamiltonian& h, const PureState& initial,
                                       const LinearOperator& projector, std::span<const double> times,
                                       double eta = kNumericalZero);

/// For each eigenspace P_i of `obs`, whether H maps range(P_i) into itself:
/// ||(1 - P_i) H P_i|| <= tol.
std::vector<bool> invariant_subspace_check(const Hamiltonian& h, const Observable& obs,
                                           double tol = 1e-9);

/// Fraction of (random state, time) samples at which every eigenspace of
/// `obs` carries Born weight above eta. States are Haar-like Gaussian
/// vectors drawn from `seed`.
double complete_indefiniteness_fraction(const Hamiltonian& h, const Observable& obs,
                                        std::span<const double> times, int n_states,
                                        std::uint64_t seed, double eta = kNumericalZero);

}  // namespace qmt
