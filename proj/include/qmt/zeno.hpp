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
 * Decay of a discrete level into a quasi-continuum, and the Zeno freezing
 * produced by projecting onto the undecayed level at short intervals.
 *
 * Level 0 is the undecayed state at energy 0. Levels 1..n are decay
 * products at energies -W/2 + (j + 1/2) dw, dw = W/n, each coupled to level
 * 0 with strength g = sqrt(dw / (2 pi tau)) so the golden-rule rate is 1/tau.
 * The discrete band recurs after T_valid = 2 pi / dw.
 */
#pragma once

#include "qmt/dynamics.hpp"

namespace qmt {

class DecayModel {
 public:
  double tau() const { return tau_; }
  Index n_modes() const { return n_modes_; }
  double bandwidth() const { return bandwidth_; }
  double level_spacing() const { return bandwidth_ / static_cast<double>(n_modes_); }
  double coupling() const { return coupling_; }
  /// Recurrence time 2 pi / dw of the discrete band.
  double validity_time() const;
  /// Decay-product dephasing time t0 = 2 pi / W.
  double correlation_time() const;
  const Hamiltonian& hamiltonian() const { return hamiltonian_; }

  /// Normalized state that level 0 feeds: H|0> / |H|0>|.
  Vector decay_products() const;

 private:
  friend DecayModel build_decay_model(double tau, Index n_modes, double bandwidth);
  DecayModel(double tau, Index n, double w, double g, Hamiltonian h)
      : tau_(tau), n_modes_(n), bandwidth_(w), coupling_(g), hamiltonian_(std::move(h)) {}

  double tau_;
  Index n_modes_;
  double bandwidth_;
  double coupling_;
  Hamiltonian hamiltonian_;
};

inline constexpr double kMinimumBandwidthTimesTau = 20.0;
inline constexpr Index kMinimumModes = 200;

/// Throws kInvalidRegime unless tau > 0, W tau >= 20 and n_modes >= 200.
DecayModel build_decay_model(double tau, Index n_modes, double bandwidth);

/// |<0|U(t)|0>|^2 for 0 <= t <= T_valid / 3 (kOutsideValidityWindow otherwise).
double survival_probability(const DecayModel& model, double t);

/// |<dp|U(t)|dp>| for the decay-product state.
double decay_product_overlap(const DecayModel& model, double t);

/// Runs floor(horizon / interval) cycles of "evolve for `interval`, project on
/// the undecayed level, keep that branch" and returns the product of the
/// per-cycle branch weights. The horizon must lie inside T_valid / 3.
double iterated_projection_survival(const DecayModel& model, double interval, double horizon);

/// Number of projection cycles iterated_projection_survival performs.
Index projection_cycles(double interval, double horizon);

/// Two-level Zeno reduction: N cycles of a rotation by theta / N about x
/// followed by projection on |0>. Simulated, not evaluated in closed form.
double rabi_zeno(double theta, int n_projections);

}  // namespace qmt
