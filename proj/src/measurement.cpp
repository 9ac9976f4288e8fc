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

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>

namespace qmt {

// ---------------------------------------------------------------------------
// OutcomeDistribution

OutcomeDistribution::OutcomeDistribution(std::vector<Outcome> entries, double sum_tolerance)
    : entries_(std::move(entries)) {
  if (entries_.empty()) {
    throw Error(ErrorCode::kInvalidDistribution, "distribution has no outcomes");
  }
  double total = 0.0;
  for (Outcome& o : entries_) {
    if (!std::isfinite(o.probability) || o.probability < -kNegativeClampLimit) {
      std::ostringstream os;
      os << "probability " << o.probability << " is not a valid roundoff negative";
      throw Error(ErrorCode::kInvalidDistribution, os.str());
    }
    o.probability = std::max(o.probability, 0.0);
    total += o.probability;
  }
  if (std::abs(total - 1.0) > sum_tolerance) {
    std::ostringstream os;
    os << "probabilities sum to " << total;
    throw Error(ErrorCode::kInvalidDistribution, os.str());
  }
}

std::optional<double> OutcomeDistribution::probability(const OutcomeLabel& label) const {
  for (const Outcome& o : entries_) {
    if (o.label == label) return o.probability;
  }
  return std::nullopt;
}

double OutcomeDistribution::total() const {
  double t = 0.0;
  for (const Outcome& o : entries_) t += o.probability;
  return t;
}

double total_variation(const OutcomeDistribution& a, const OutcomeDistribution& b) {
  std::map<OutcomeLabel, double> diff;
  for (const Outcome& o : a.entries()) diff[o.label] += o.probability;
  for (const Outcome& o : b.entries()) diff[o.label] -= o.probability;
  double l1 = 0.0;
  for (const auto& [label, d] : diff) l1 += std::abs(d);
  return 0.5 * l1;
}

// ---------------------------------------------------------------------------
// Born rule and collapse

namespace {

template <typename State>
OutcomeDistribution born_impl(const State& state, const Observable& obs) {
  if (state.dim() != obs.dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "state and observable dimensions differ");
  }
  std::vector<Outcome> out;
  out.reserve(obs.size());
  for (std::size_t i = 0; i < obs.size(); ++i) {
    out.push_back({{obs.eigenvalue(i)}, obs.weight(i, state)});
  }
  return OutcomeDistribution(std::move(out));
}

}  // namespace

OutcomeDistribution born_distribution(const PureState& state, const Observable& obs) {
  return born_impl(state, obs);
}

OutcomeDistribution born_distribution(const DensityOperator& rho, const Observable& obs) {
  return born_impl(rho, obs);
}

PureState collapse(const PureState& state, const Observable& obs, std::size_t outcome) {
  if (state.dim() != obs.dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "state and observable dimensions differ");
  }
  if (outcome >= obs.size()) {
    throw Error(ErrorCode::kInvalidIndex, "outcome index out of range");
  }
  const double p = obs.weight(outcome, state);
  if (!(p > 1e-12)) {
    std::ostringstream os;
    os << "outcome " << obs.eigenvalue(outcome) << " has probability " << p;
    throw Error(ErrorCode::kImpossibleOutcome, os.str());
  }
  return PureState(obs.project(outcome, state.amplitudes()));
}

OutcomeLabel sample_outcome(const OutcomeDistribution& dist, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  // 53 random bits -> uniform in [0, 1). std::uniform_real_distribution is
  // implementation-defined, so it would break cross-toolchain reproducibility.
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  double cumulative = 0.0;
  const Outcome* last_nonzero = nullptr;
  for (const Outcome& o : dist.entries()) {
    if (o.probability <= 0.0) continue;
    last_nonzero = &o;
    cumulative += o.probability;
    if (u < cumulative) return o.label;
  }
  // u landed in the roundoff gap above the running total.
  return last_nonzero != nullptr ? last_nonzero->label : dist[0].label;
}

// ---------------------------------------------------------------------------
// POVMs

double completeness_deficit(const std::vector<Effect>& effects, Index dim) {
  Matrix total = -Matrix::Identity(dim, dim);
  for (const Effect& e : effects) {
    if (e.factor.rows() != dim) {
      throw Error(ErrorCode::kDimensionMismatch, "POVM effect dimension differs");
    }
    if (e.factor.cols() > 0) total.noalias() += e.factor * e.factor.adjoint();
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (total + total.adjoint()),
                                               Eigen::EigenvaluesOnly);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

Povm::Povm(std::vector<Effect> effects, double completeness_tol)
    : effects_(std::move(effects)), dim_(0), deficit_(0.0), tolerance_(completeness_tol) {
  if (effects_.empty()) {
    throw Error(ErrorCode::kInvalidPovm, "POVM has no effects");
  }
  dim_ = effects_.front().factor.rows();
  if (dim_ == 0) {
    throw Error(ErrorCode::kInvalidPovm, "POVM effects have dimension zero");
  }
  deficit_ = qmt::completeness_deficit(effects_, dim_);
  if (deficit_ > completeness_tol) {
    std::ostringstream os;
    os << "effects sum to identity only within " << deficit_;
    throw Error(ErrorCode::kInvalidPovm, os.str());
  }
}

Povm Povm::from_operators(const std::vector<std::pair<OutcomeLabel, LinearOperator>>& effects,
                          double completeness_tol) {
  std::vector<Effect> factored;
  factored.reserve(effects.size());
  for (const auto& [label, op] : effects) {
    if (!op.is_hermitian(kPovmPositivityTolerance)) {
      throw Error(ErrorCode::kInvalidPovm, "POVM effect is not Hermitian");
    }
    const Eigensystem es =
        hermitian_eigensystem(LinearOperator(0.5 * (op.matrix() + op.matrix().adjoint())));
    if (es.values.minCoeff() < -kPovmPositivityTolerance) {
      throw Error(ErrorCode::kInvalidPovm, "POVM effect has a negative eigenvalue");
    }
    Matrix factor(op.dim(), 0);
    for (Index c = 0; c < es.values.size(); ++c) {
      if (es.values[c] <= 0.0) continue;
      factor.conservativeResize(Eigen::NoChange, factor.cols() + 1);
      factor.col(factor.cols() - 1) = std::sqrt(es.values[c]) * es.vectors.col(c);
    }
    factored.push_back({label, std::move(factor)});
  }
  return Povm(std::move(factored), completeness_tol);
}

Povm Povm::from_observable(const Observable& obs) {
  std::vector<Effect> effects;
  effects.reserve(obs.size());
  for (std::size_t i = 0; i < obs.size(); ++i) {
    effects.push_back({{obs.eigenvalue(i)}, Matrix(obs.eigenvectors(i))});
  }
  return Povm(std::move(effects));
}

LinearOperator Povm::effect_operator(std::size_t k) const {
  const Matrix& b = effect(k).factor;
  if (b.cols() == 0) return LinearOperator::zero(dim_);
  return LinearOperator(b * b.adjoint());
}

namespace {

double povm_sum_tolerance(const Povm& povm) {
  return povm.completeness_tolerance() + kDistributionTolerance;
}

}  // namespace

OutcomeDistribution povm_distribution(const PureState& state, const Povm& povm) {
  if (state.dim() != povm.dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "state and POVM dimensions differ");
  }
  std::vector<Outcome> out;
  out.reserve(povm.size());
  for (std::size_t k = 0; k < povm.size(); ++k) {
    const Effect& e = povm.effect(k);
    const double p =
        e.factor.cols() == 0 ? 0.0 : (e.factor.adjoint() * state.amplitudes()).squaredNorm();
    out.push_back({e.label, p});
  }
  return OutcomeDistribution(std::move(out), povm_sum_tolerance(povm));
}

OutcomeDistribution povm_distribution(const DensityOperator& rho, const Povm& povm) {
  if (rho.dim() != povm.dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "state and POVM dimensions differ");
  }
  std::vector<Outcome> out;
  out.reserve(povm.size());
  for (std::size_t k = 0; k < povm.size(); ++k) {
    const Effect& e = povm.effect(k);
    const double p = e.factor.cols() == 0
                         ? 0.0
                         : (e.factor.adjoint() * rho.matrix() * e.factor).trace().real();
    out.push_back({e.label, p});
  }
  return OutcomeDistribution(std::move(out), povm_sum_tolerance(povm));
}

Povm build_fuzzy_povm(const Observable& obs, const Eigen::MatrixXd& smearing) {
  const Index n_eig = static_cast<Index>(obs.size());
  if (smearing.cols() != n_eig || smearing.rows() == 0) {
    throw Error(ErrorCode::kInvalidSmearing, "smearing needs one column per eigenvalue");
  }
  if (!smearing.allFinite() || (smearing.array() < 0.0).any()) {
    throw Error(ErrorCode::kInvalidSmearing, "smearing weights must be nonnegative");
  }
  for (Index i = 0; i < n_eig; ++i) {
    if (std::abs(smearing.col(i).sum() - 1.0) > 1e-10) {
      std::ostringstream os;
      os << "smearing weights for eigenvalue " << obs.eigenvalue(static_cast<std::size_t>(i))
         << " sum to " << smearing.col(i).sum();
      throw Error(ErrorCode::kInvalidSmearing, os.str());
    }
  }
  std::vector<Effect> effects;
  effects.reserve(static_cast<std::size_t>(smearing.rows()));
  for (Index k = 0; k < smearing.rows(); ++k) {
    Matrix factor(obs.dim(), 0);
    for (Index i = 0; i < n_eig; ++i) {
      const double f = smearing(k, i);
      if (f == 0.0) continue;
      const auto v = obs.eigenvectors(static_cast<std::size_t>(i));
      const Index start = factor.cols();
      factor.conservativeResize(Eigen::NoChange, start + v.cols());
      factor.middleCols(start, v.cols()) = std::sqrt(f) * v;
    }
    effects.push_back({{static_cast<double>(k)}, std::move(factor)});
  }
  return Povm(std::move(effects));
}

PhaseSpacePovm build_phase_space_povm(const GridSpace& g, double width, Index momentum_cells,
                                      Index position_cells) {
  const Index n = g.size();
  if (momentum_cells <= 0 || position_cells <= 0 || n % momentum_cells != 0 ||
      n % position_cells != 0) {
    throw Error(ErrorCode::kIncompleteTiling, "cell counts must divide the grid size");
  }
  const Index p_stride = n / momentum_cells;
  const Index q_stride = n / position_cells;
  const PureState reference = gaussian_packet(g, 0.0, 0.0, width);
  const Matrix f = fourier_matrix(g);
  const Vector reference_k = f * reference.amplitudes();
  const RealVector x = g.positions();
  const RealVector k = g.wavenumbers();
  const double w =
      static_cast<double>(n) / static_cast<double>(momentum_cells * position_cells);
  const double sqrt_w = std::sqrt(w);

  std::vector<double> momenta;
  std::vector<double> positions;
  for (Index a = 0; a < momentum_cells; ++a) momenta.push_back(k[a * p_stride]);
  for (Index b = 0; b < position_cells; ++b) positions.push_back(x[b * q_stride]);

  // exp(-i P q) is diagonal in the Fourier basis, exp(i X p) in position.
  std::vector<Vector> shifted;
  shifted.reserve(static_cast<std::size_t>(position_cells));
  for (const double q : positions) {
    Vector shifted_k(n);
    for (Index m = 0; m < n; ++m) shifted_k[m] = reference_k[m] * std::polar(1.0, -k[m] * q);
    shifted.push_back(f.adjoint() * shifted_k);
  }

  std::vector<Effect> effects;
  effects.reserve(static_cast<std::size_t>(momentum_cells * position_cells));
  for (Index a = 0; a < momentum_cells; ++a) {
    const double p = momenta[static_cast<std::size_t>(a)];
    for (Index b = 0; b < position_cells; ++b) {
      const Vector& phi = shifted[static_cast<std::size_t>(b)];
      Matrix factor(n, 1);
      for (Index j = 0; j < n; ++j) factor(j, 0) = sqrt_w * std::polar(1.0, p * x[j]) * phi[j];
      effects.push_back({{static_cast<double>(a), static_cast<double>(b)}, std::move(factor)});
    }
  }
  const double deficit = completeness_deficit(effects, n);
  if (deficit > kPhaseSpaceCompletenessTolerance) {
    std::ostringstream os;
    os << "phase-space cells leave a completeness deficit of " << deficit;
    throw Error(ErrorCode::kIncompleteTiling, os.str());
  }
  return {Povm(std::move(effects), kPhaseSpaceCompletenessTolerance), deficit, w,
          std::move(momenta), std::move(positions)};
}

}  // namespace qmt
