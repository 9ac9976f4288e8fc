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
#include <sstream>

#include <unsupported/Eigen/KroneckerProduct>

namespace qmt {

namespace {

constexpr double kModelTolerance = 1e-9;

// Orthonormal basis of C^n whose leading columns are exactly `lead`.
Matrix complete_basis(const Matrix& lead) {
  const Index n = lead.rows();
  Eigen::HouseholderQR<Matrix> qr(lead);
  const Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  Matrix basis(n, n);
  basis.leftCols(lead.cols()) = lead;
  basis.rightCols(n - lead.cols()) = q.rightCols(n - lead.cols());
  return basis;
}

double orthonormality_defect(const Matrix& cols) {
  const Index k = cols.cols();
  return (cols.adjoint() * cols - Matrix::Identity(k, k)).cwiseAbs().maxCoeff();
}

}  // namespace

Vector MeasurementModel::outcome_state(std::size_t outcome) const {
  return observable_.eigenvectors(outcome).col(0);
}

MeasurementModel build_measurement_unitary(const MeasurementModelSpec& spec) {
  const Observable& obs = spec.observable;
  const std::size_t n_out = obs.size();
  for (std::size_t i = 0; i < n_out; ++i) {
    if (obs.multiplicity(i) != 1) {
      throw Error(ErrorCode::kInvalidArgument, "measurement models need a nondegenerate observable");
    }
  }
  const Index pointer_dim = spec.pointer_dim == 0 ? static_cast<Index>(n_out) + 1 : spec.pointer_dim;
  if (pointer_dim < static_cast<Index>(n_out) + 1) {
    std::ostringstream os;
    os << "pointer dimension " << pointer_dim << " cannot record " << n_out
       << " outcomes plus a ready state";
    throw Error(ErrorCode::kInvalidArgument, os.str());
  }
  if (spec.ready_index < 0 || spec.ready_index >= pointer_dim) {
    throw Error(ErrorCode::kInvalidIndex, "ready index outside the pointer space");
  }

  std::vector<PureState> post = spec.post_states;
  if (post.empty()) {
    for (std::size_t i = 0; i < n_out; ++i) post.emplace_back(Vector(obs.eigenvectors(i).col(0)));
  }
  if (post.size() != n_out) {
    throw Error(ErrorCode::kInvalidArgument, "need one post-measurement state per outcome");
  }
  for (const PureState& phi : post) {
    if (phi.dim() != obs.dim()) {
      throw Error(ErrorCode::kDimensionMismatch, "post-measurement state has wrong dimension");
    }
  }

  std::vector<Index> pointers;
  for (Index p = 0; p < pointer_dim && pointers.size() < n_out; ++p) {
    if (p != spec.ready_index) pointers.push_back(p);
  }

  const Index dim = obs.dim() * pointer_dim;
  Matrix sources(dim, static_cast<Index>(n_out));
  Matrix targets(dim, static_cast<Index>(n_out));
  const Vector ready = PureState::basis(pointer_dim, spec.ready_index).amplitudes();
  for (std::size_t i = 0; i < n_out; ++i) {
    const Vector record = PureState::basis(pointer_dim, pointers[i]).amplitudes();
    const Vector o_i = obs.eigenvectors(i).col(0);
    sources.col(static_cast<Index>(i)) = Eigen::kroneckerProduct(o_i, ready).eval();
    targets.col(static_cast<Index>(i)) = Eigen::kroneckerProduct(post[i].amplitudes(), record).eval();
  }
  if (orthonormality_defect(targets) > kModelTolerance ||
      orthonormality_defect(sources) > kModelTolerance) {
    throw Error(ErrorCode::kNonExtendable, "mapped images are not orthonormal");
  }
  Matrix u = complete_basis(targets) * complete_basis(sources).adjoint();
  return MeasurementModel(obs, pointer_dim, spec.ready_index, std::move(pointers), std::move(post),
                          LinearOperator(std::move(u)));
}

namespace {

Vector with_ready_pointers(const PureState& state, const MeasurementModel& model, int n_pointers) {
  if (state.dim() != model.system_dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "state does not live on the measured system");
  }
  const Vector ready = PureState::basis(model.pointer_dim(), model.ready_index()).amplitudes();
  Vector full = state.amplitudes();
  for (int k = 0; k < n_pointers; ++k) full = Eigen::kroneckerProduct(full, ready).eval();
  return full;
}

}  // namespace

OutcomeDistribution modeled_single_measurement(const PureState& state, const MeasurementModel& model) {
  const PureState after(model.interaction().apply(with_ready_pointers(state, model, 1)));
  const std::array<Index, 2> dims{model.system_dim(), model.pointer_dim()};
  const std::array<std::size_t, 1> keep{1};
  const DensityOperator pointer = partial_trace(DensityOperator::pure(after), dims, keep);

  std::vector<double> readings(static_cast<std::size_t>(model.pointer_dim()));
  for (Index p = 0; p < model.pointer_dim(); ++p) readings[static_cast<std::size_t>(p)] = static_cast<double>(p);
  const OutcomeDistribution raw = born_distribution(pointer, Observable::diagonal(readings));

  std::vector<Outcome> out;
  for (std::size_t i = 0; i < model.outcome_count(); ++i) {
    const double p = raw.probability({static_cast<double>(model.pointer_index(i))}).value_or(0.0);
    out.push_back({{model.observable().eigenvalue(i)}, p});
  }
  return OutcomeDistribution(std::move(out));
}

OutcomeDistribution repeated_measurement_joint(const PureState& state, const MeasurementModel& model) {
  const std::array<Index, 3> dims{model.system_dim(), model.pointer_dim(), model.pointer_dim()};
  const std::array<std::size_t, 2> first{0, 1};
  const std::array<std::size_t, 2> second{0, 2};
  const LinearOperator u1 = embed_operator(model.interaction(), dims, first);
  const LinearOperator u2 = embed_operator(model.interaction(), dims, second);
  const PureState after(u2.apply(u1.apply(with_ready_pointers(state, model, 2))));

  const std::array<std::size_t, 2> pointers{1, 2};
  const DensityOperator records = partial_trace(DensityOperator::pure(after), dims, pointers);
  const Index pd = model.pointer_dim();
  std::vector<double> codes(static_cast<std::size_t>(pd * pd));
  for (Index c = 0; c < pd * pd; ++c) codes[static_cast<std::size_t>(c)] = static_cast<double>(c);
  const OutcomeDistribution raw = born_distribution(records, Observable::diagonal(codes));

  std::vector<Outcome> out;
  for (std::size_t i = 0; i < model.outcome_count(); ++i) {
    for (std::size_t j = 0; j < model.outcome_count(); ++j) {
      const Index code = model.pointer_index(i) * pd + model.pointer_index(j);
      const double p = raw.probability({static_cast<double>(code)}).value_or(0.0);
      out.push_back({{model.observable().eigenvalue(i), model.observable().eigenvalue(j)}, p});
    }
  }
  return OutcomeDistribution(std::move(out));
}

OutcomeDistribution collapse_rule_joint(const PureState& state, const Observable& obs) {
  if (state.dim() != obs.dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "state and observable dimensions differ");
  }
  std::vector<Outcome> out;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const double w = obs.weight(i, state);
    for (std::size_t j = 0; j < obs.size(); ++j) {
      double p = 0.0;
      if (w > 1e-12) p = w * obs.weight(j, collapse(state, obs, i));
      out.push_back({{obs.eigenvalue(i), obs.eigenvalue(j)}, p});
    }
  }
  return OutcomeDistribution(std::move(out));
}

}  // namespace qmt
