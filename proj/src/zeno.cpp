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

#include "qmt/zeno.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include "qmt/measurement.hpp"

namespace qmt {

double DecayModel::validity_time() const { return 2.0 * std::numbers::pi / level_spacing(); }

double DecayModel::correlation_time() const { return 2.0 * std::numbers::pi / bandwidth_; }

Vector DecayModel::decay_products() const {
  Vector dp = Vector::Zero(n_modes_ + 1);
  dp.tail(n_modes_).setConstant(1.0 / std::sqrt(static_cast<double>(n_modes_)));
  return dp;
}

DecayModel build_decay_model(double tau, Index n_modes, double bandwidth) {
  if (!(tau > 0.0) || !(bandwidth * tau >= kMinimumBandwidthTimesTau) || n_modes < kMinimumModes) {
    std::ostringstream os;
    os << "need tau > 0, W tau >= " << kMinimumBandwidthTimesTau << ", n_modes >= " << kMinimumModes
       << " (got tau=" << tau << ", W=" << bandwidth << ", n_modes=" << n_modes << ")";
    throw Error(ErrorCode::kInvalidRegime, os.str());
  }
  const double spacing = bandwidth / static_cast<double>(n_modes);
  const double g = std::sqrt(spacing / (2.0 * std::numbers::pi * tau));
  Matrix h = Matrix::Zero(n_modes + 1, n_modes + 1);
  for (Index j = 0; j < n_modes; ++j) {
    h(j + 1, j + 1) = -0.5 * bandwidth + (static_cast<double>(j) + 0.5) * spacing;
    h(0, j + 1) = g;
    h(j + 1, 0) = g;
  }
  return DecayModel(tau, n_modes, bandwidth, g, Hamiltonian(LinearOperator(std::move(h))));
}

namespace {

void require_in_window(const DecayModel& model, double t) {
  if (!(t >= 0.0) || t > model.validity_time() / 3.0) {
    std::ostringstream os;
    os << "time " << t << " outside [0, " << model.validity_time() / 3.0 << "]";
    throw Error(ErrorCode::kOutsideValidityWindow, os.str());
  }
}

}  // namespace

double survival_probability(const DecayModel& model, double t) {
  require_in_window(model, t);
  if (t == 0.0) return 1.0;
  const PureState psi = evolve(model.hamiltonian(), PureState::basis(model.n_modes() + 1, 0), t);
  return std::norm(psi[0]);
}

double decay_product_overlap(const DecayModel& model, double t) {
  const Vector dp = model.decay_products();
  return std::abs(dp.dot(evolve(model.hamiltonian(), dp, t)));
}

Index projection_cycles(double interval, double horizon) {
  // The relative slack keeps exact multiples such as 1 / (1/64) from
  // rounding down a cycle.
  return static_cast<Index>(std::floor(horizon / interval * (1.0 + 1e-12)));
}

double iterated_projection_survival(const DecayModel& model, double interval, double horizon) {
  if (!(interval > 0.0) || !(horizon >= interval)) {
    throw Error(ErrorCode::kInvalidArgument, "need 0 < interval <= horizon");
  }
  require_in_window(model, horizon);
  const Index cycles = projection_cycles(interval, horizon);
  const Index dim = model.n_modes() + 1;

  std::vector<double> undecayed_value(static_cast<std::size_t>(dim), 1.0);
  undecayed_value[0] = 0.0;
  const Observable record = Observable::diagonal(undecayed_value);  // 0: undecayed, 1: decayed

  PureState state = PureState::basis(dim, 0);
  double survival = 1.0;
  for (Index c = 0; c < cycles; ++c) {
    state = evolve(model.hamiltonian(), state, interval);
    const double keep = record.weight(0, state);
    survival *= keep;
    if (!(keep > 1e-12)) return survival;
    state = collapse(state, record, 0);
  }
  return survival;
}

double rabi_zeno(double theta, int n_projections) {
  if (n_projections < 1) {
    throw Error(ErrorCode::kInvalidArgument, "need at least one projection");
  }
  Matrix sx(2, 2);
  sx << 0.0, 1.0, 1.0, 0.0;
  const Hamiltonian h(LinearOperator(0.5 * sx));
  const Propagator step = propagate(h, theta / static_cast<double>(n_projections));
  const std::array<double, 2> labels{0.0, 1.0};
  const Observable z = Observable::diagonal(labels);

  PureState state = PureState::basis(2, 0);
  double survival = 1.0;
  for (int k = 0; k < n_projections; ++k) {
    state = PureState(step.unitary.apply(state.amplitudes()));
    const double keep = z.weight(0, state);
    survival *= keep;
    if (!(keep > 1e-12)) return survival;
    state = collapse(state, z, 0);
  }
  return survival;
}

}  // namespace qmt
