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

#include "qmt/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <unsupported/Eigen/KroneckerProduct>

namespace qmt {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotHermitian: return "NotHermitian";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kInvalidState: return "InvalidState";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kImpossibleOutcome: return "ImpossibleOutcome";
    case ErrorCode::kInvalidDistribution: return "InvalidDistribution";
    case ErrorCode::kInvalidPovm: return "InvalidPovm";
    case ErrorCode::kInvalidSmearing: return "InvalidSmearing";
    case ErrorCode::kIncompleteTiling: return "IncompleteTiling";
    case ErrorCode::kUnresolvableWidth: return "UnresolvableWidth";
    case ErrorCode::kNonExtendable: return "NonExtendable";
    case ErrorCode::kInvalidRegime: return "InvalidRegime";
    case ErrorCode::kOutsideValidityWindow: return "OutsideValidityWindow";
    case ErrorCode::kEmptyRegion: return "EmptyRegion";
    case ErrorCode::kInvalidIndex: return "InvalidIndex";
    case ErrorCode::kInconsistentFamily: return "InconsistentFamily";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kRangeError: return "RangeError";
  }
  return "Unknown";
}

namespace {

void require_same_dim(Index a, Index b, const char* what) {
  if (a != b) {
    std::ostringstream os;
    os << what << ": dimension " << a << " vs " << b;
    throw Error(ErrorCode::kDimensionMismatch, os.str());
  }
}

double hermiticity_defect(const Matrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

}  // namespace

// ---------------------------------------------------------------------------
// PureState

PureState::PureState(Vector amplitudes) : amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() == 0) {
    throw Error(ErrorCode::kInvalidState, "state vector has dimension zero");
  }
  const double norm = amplitudes_.norm();
  if (!std::isfinite(norm) || norm < kMinimumStateNorm) {
    std::ostringstream os;
    os << "state norm " << norm << " below " << kMinimumStateNorm;
    throw Error(ErrorCode::kInvalidState, os.str());
  }
  amplitudes_ /= norm;
}

PureState PureState::basis(Index dim, Index k) {
  if (k < 0 || k >= dim) {
    throw Error(ErrorCode::kInvalidIndex, "basis index out of range");
  }
  Vector v = Vector::Zero(dim);
  v[k] = 1.0;
  return PureState(std::move(v));
}

// ---------------------------------------------------------------------------
// LinearOperator

LinearOperator::LinearOperator(Matrix matrix) : matrix_(std::move(matrix)) {
  if (matrix_.rows() != matrix_.cols() || matrix_.rows() == 0) {
    throw Error(ErrorCode::kDimensionMismatch, "operator matrix must be square and nonempty");
  }
}

LinearOperator LinearOperator::identity(Index dim) { return LinearOperator(Matrix::Identity(dim, dim)); }

LinearOperator LinearOperator::zero(Index dim) { return LinearOperator(Matrix::Zero(dim, dim)); }

LinearOperator LinearOperator::outer(const Vector& ket, const Vector& bra) {
  require_same_dim(ket.size(), bra.size(), "outer product");
  return LinearOperator(ket * bra.adjoint());
}

LinearOperator LinearOperator::projector_onto(const PureState& state) {
  return outer(state.amplitudes(), state.amplitudes());
}

bool LinearOperator::is_hermitian(double tol) const { return hermiticity_defect(matrix_) <= tol; }

Vector LinearOperator::apply(const Vector& v) const {
  require_same_dim(dim(), v.size(), "operator application");
  return matrix_ * v;
}

LinearOperator operator*(const LinearOperator& a, const LinearOperator& b) {
  require_same_dim(a.dim(), b.dim(), "operator product");
  return LinearOperator(a.matrix_ * b.matrix_);
}

LinearOperator operator+(const LinearOperator& a, const LinearOperator& b) {
  require_same_dim(a.dim(), b.dim(), "operator sum");
  return LinearOperator(a.matrix_ + b.matrix_);
}

LinearOperator operator-(const LinearOperator& a, const LinearOperator& b) {
  require_same_dim(a.dim(), b.dim(), "operator difference");
  return LinearOperator(a.matrix_ - b.matrix_);
}

LinearOperator operator*(Complex s, const LinearOperator& a) { return LinearOperator(s * a.matrix_); }

// ---------------------------------------------------------------------------
// DensityOperator

DensityOperator::DensityOperator(Matrix matrix) : matrix_(std::move(matrix)) {
  if (matrix_.rows() != matrix_.cols() || matrix_.rows() == 0) {
    throw Error(ErrorCode::kDimensionMismatch, "density matrix must be square and nonempty");
  }
  if (hermiticity_defect(matrix_) > kHermitianTolerance) {
    throw Error(ErrorCode::kNotHermitian, "density matrix is not Hermitian");
  }
  const Complex tr = matrix_.trace();
  if (std::abs(tr - 1.0) > kHermitianTolerance) {
    std::ostringstream os;
    os << "density matrix trace " << tr.real() << " differs from 1";
    throw Error(ErrorCode::kInvalidState, os.str());
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(matrix_, Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < -kHermitianTolerance) {
    throw Error(ErrorCode::kInvalidState, "density matrix has a negative eigenvalue");
  }
}

DensityOperator DensityOperator::pure(const PureState& state) {
  return DensityOperator(state.amplitudes() * state.amplitudes().adjoint());
}

DensityOperator DensityOperator::mixture(std::span<const std::pair<double, PureState>> ensemble) {
  if (ensemble.empty()) {
    throw Error(ErrorCode::kInvalidState, "empty ensemble");
  }
  const Index dim = ensemble.front().second.dim();
  Matrix rho = Matrix::Zero(dim, dim);
  for (const auto& [w, psi] : ensemble) {
    require_same_dim(dim, psi.dim(), "mixture");
    if (w < 0.0) {
      throw Error(ErrorCode::kInvalidState, "negative ensemble weight");
    }
    rho += w * psi.amplitudes() * psi.amplitudes().adjoint();
  }
  return DensityOperator(std::move(rho));
}

double DensityOperator::purity() const { return (matrix_ * matrix_).trace().real(); }

// ---------------------------------------------------------------------------
// Spectral structure

Eigensystem hermitian_eigensystem(const LinearOperator& op) {
  if (!op.is_hermitian()) {
    throw Error(ErrorCode::kNotHermitian, "operator is not Hermitian within 1e-10");
  }
  // Symmetrize so roundoff-level skew parts do not leak into the eigenbasis.
  const Matrix sym = 0.5 * (op.matrix() + op.matrix().adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::kInvalidArgument, "Hermitian eigensolver did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

Observable::Observable(LinearOperator op, Matrix eigenbasis, std::span<const double> values,
                       double cluster_tol)
    : op_(std::move(op)) {
  const Index n = op_.dim();
  if (eigenbasis.rows() != n || eigenbasis.cols() != n || static_cast<Index>(values.size()) != n) {
    throw Error(ErrorCode::kDimensionMismatch, "eigenbasis does not match operator dimension");
  }
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return values[a] < values[b]; });

  basis_.resize(n, n);
  double radius = 0.0;
  for (double v : values) radius = std::max(radius, std::abs(v));
  const double merge_gap = cluster_tol * radius;

  for (Index c = 0; c < n; ++c) {
    const Index src = order[static_cast<std::size_t>(c)];
    basis_.col(c) = eigenbasis.col(src);
    const double v = values[src];
    if (groups_.empty() || v - values[order[groups_.back().first]] > merge_gap) {
      groups_.push_back({v, c, 1});
    } else {
      Group& g = groups_.back();
      g.value = (g.value * static_cast<double>(g.count) + v) / static_cast<double>(g.count + 1);
      ++g.count;
    }
  }
}

Observable Observable::from_projectors(
    std::span<const std::pair<double, LinearOperator>> resolution) {
  if (resolution.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "empty spectral resolution");
  }
  const Index n = resolution.front().second.dim();
  Matrix op = Matrix::Zero(n, n);
  Matrix total = Matrix::Zero(n, n);
  Matrix basis(n, 0);
  std::vector<double> column_values;
  for (const auto& [value, proj] : resolution) {
    require_same_dim(n, proj.dim(), "spectral resolution");
    const Matrix& p = proj.matrix();
    if (hermiticity_defect(p) > kProjectorTolerance ||
        (p * p - p).cwiseAbs().maxCoeff() > kProjectorTolerance) {
      throw Error(ErrorCode::kInvalidArgument, "family member is not an orthogonal projector");
    }
    op += value * p;
    total += p;
    const Eigensystem es = hermitian_eigensystem(LinearOperator(0.5 * (p + p.adjoint())));
    for (Index c = 0; c < n; ++c) {
      if (es.values[c] > 0.5) {
        basis.conservativeResize(n, basis.cols() + 1);
        basis.col(basis.cols() - 1) = es.vectors.col(c);
        column_values.push_back(value);
      }
    }
  }
  if ((total - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() > kProjectorTolerance ||
      basis.cols() != n) {
    throw Error(ErrorCode::kInvalidArgument, "projectors do not resolve the identity");
  }
  for (std::size_t i = 0; i < resolution.size(); ++i) {
    for (std::size_t j = i + 1; j < resolution.size(); ++j) {
      if (resolution[i].first == resolution[j].first) {
        throw Error(ErrorCode::kInvalidArgument, "spectral values must be distinct");
      }
    }
  }
  return Observable(LinearOperator(std::move(op)), std::move(basis), column_values, 0.0);
}

Observable Observable::diagonal(std::span<const double> values, double cluster_tol) {
  const Index n = static_cast<Index>(values.size());
  Matrix op = Matrix::Zero(n, n);
  for (Index k = 0; k < n; ++k) op(k, k) = values[static_cast<std::size_t>(k)];
  return Observable(LinearOperator(std::move(op)), Matrix::Identity(n, n), values, cluster_tol);
}

std::vector<double> Observable::eigenvalues() const {
  std::vector<double> out;
  out.reserve(groups_.size());
  for (const Group& g : groups_) out.push_back(g.value);
  return out;
}

Eigen::Block<const Matrix, Eigen::Dynamic, Eigen::Dynamic, true> Observable::eigenvectors(std::size_t i) const {
  const Group& g = groups_.at(i);
  return basis_.middleCols(g.first, g.count);
}

LinearOperator Observable::projector(std::size_t i) const {
  const auto v = eigenvectors(i);
  return LinearOperator(v * v.adjoint());
}

Vector Observable::project(std::size_t i, const Vector& v) const {
  require_same_dim(dim(), v.size(), "projection");
  const auto e = eigenvectors(i);
  return e * (e.adjoint() * v);
}

double Observable::weight(std::size_t i, const PureState& state) const {
  require_same_dim(dim(), state.dim(), "Born weight");
  return (eigenvectors(i).adjoint() * state.amplitudes()).squaredNorm();
}

double Observable::weight(std::size_t i, const DensityOperator& rho) const {
  require_same_dim(dim(), rho.dim(), "Born weight");
  const auto e = eigenvectors(i);
  return (e.adjoint() * rho.matrix() * e).trace().real();
}

Observable spectral_decompose(const LinearOperator& op, double cluster_tol) {
  Eigensystem es = hermitian_eigensystem(op);
  const std::vector<double> values(es.values.data(), es.values.data() + es.values.size());
  return Observable(op, std::move(es.vectors), values, cluster_tol);
}

// ---------------------------------------------------------------------------
// Composition and reduction

PureState tensor_product(const PureState& a, const PureState& b) {
  return PureState(Eigen::kroneckerProduct(a.amplitudes(), b.amplitudes()).eval());
}

LinearOperator tensor_product(const LinearOperator& a, const LinearOperator& b) {
  return LinearOperator(Eigen::kroneckerProduct(a.matrix(), b.matrix()).eval());
}

DensityOperator tensor_product(const DensityOperator& a, const DensityOperator& b) {
  return DensityOperator(Eigen::kroneckerProduct(a.matrix(), b.matrix()).eval());
}

namespace {

// Row-major strides of a composite index with the first factor slowest.
std::vector<Index> strides_of(std::span<const Index> dims) {
  std::vector<Index> strides(dims.size(), 1);
  for (std::size_t k = dims.size(); k-- > 1;) strides[k - 1] = strides[k] * dims[k];
  return strides;
}

// Offsets into the composite index for every joint value of `factors`.
std::vector<Index> factor_offsets(std::span<const Index> dims, std::span<const Index> strides,
                                  std::span<const std::size_t> factors) {
  std::vector<Index> offsets{0};
  for (std::size_t f : factors) {
    std::vector<Index> next;
    next.reserve(offsets.size() * static_cast<std::size_t>(dims[f]));
    for (Index base : offsets) {
      for (Index d = 0; d < dims[f]; ++d) next.push_back(base + d * strides[f]);
    }
    offsets = std::move(next);
  }
  return offsets;
}

Index checked_product(std::span<const Index> dims) {
  Index total = 1;
  for (Index d : dims) {
    if (d <= 0) throw Error(ErrorCode::kDimensionMismatch, "subsystem dimension must be positive");
    total *= d;
  }
  return total;
}

std::vector<std::size_t> complement_of(std::span<const std::size_t> chosen, std::size_t n) {
  std::vector<bool> used(n, false);
  for (std::size_t f : chosen) {
    if (f >= n || used[f]) throw Error(ErrorCode::kInvalidIndex, "invalid or repeated factor index");
    used[f] = true;
  }
  std::vector<std::size_t> rest;
  for (std::size_t f = 0; f < n; ++f) {
    if (!used[f]) rest.push_back(f);
  }
  return rest;
}

}  // namespace

DensityOperator partial_trace(const DensityOperator& rho, std::span<const Index> subsystem_dims,
                              std::span<const std::size_t> keep) {
  require_same_dim(checked_product(subsystem_dims), rho.dim(), "partial trace");
  std::vector<std::size_t> kept(keep.begin(), keep.end());
  std::sort(kept.begin(), kept.end());
  const std::vector<std::size_t> traced = complement_of(kept, subsystem_dims.size());
  const std::vector<Index> strides = strides_of(subsystem_dims);
  const std::vector<Index> keep_off = factor_offsets(subsystem_dims, strides, kept);
  const std::vector<Index> trace_off = factor_offsets(subsystem_dims, strides, traced);

  const Index n = static_cast<Index>(keep_off.size());
  Matrix out = Matrix::Zero(n, n);
  const Matrix& m = rho.matrix();
  for (Index a = 0; a < n; ++a) {
    for (Index b = 0; b < n; ++b) {
      Complex acc = 0.0;
      for (Index t : trace_off) acc += m(keep_off[a] + t, keep_off[b] + t);
      out(a, b) = acc;
    }
  }
  // Restore exact Hermiticity lost to summation order.
  return DensityOperator(0.5 * (out + out.adjoint()));
}

LinearOperator embed_operator(const LinearOperator& op, std::span<const Index> subsystem_dims,
                              std::span<const std::size_t> targets) {
  const Index total = checked_product(subsystem_dims);
  const std::vector<std::size_t> rest = complement_of(targets, subsystem_dims.size());
  const std::vector<Index> strides = strides_of(subsystem_dims);
  const std::vector<Index> target_off = factor_offsets(subsystem_dims, strides, targets);
  const std::vector<Index> rest_off = factor_offsets(subsystem_dims, strides, rest);
  require_same_dim(static_cast<Index>(target_off.size()), op.dim(), "embedded operator");

  Matrix out = Matrix::Zero(total, total);
  const Index nt = op.dim();
  for (Index r : rest_off) {
    for (Index i = 0; i < nt; ++i) {
      for (Index j = 0; j < nt; ++j) out(r + target_off[i], r + target_off[j]) = op(i, j);
    }
  }
  return LinearOperator(std::move(out));
}

Complex expectation(const PureState& state, const LinearOperator& op) {
  require_same_dim(state.dim(), op.dim(), "expectation");
  return state.amplitudes().dot(op.matrix() * state.amplitudes());
}

Complex expectation(const DensityOperator& rho, const LinearOperator& op) {
  require_same_dim(rho.dim(), op.dim(), "expectation");
  return (rho.matrix() * op.matrix()).trace();
}

double operator_norm(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues().size() > 0 ? svd.singularValues()[0] : 0.0;
}

namespace {

Matrix gaussian_matrix(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Matrix g(rows, cols);
  for (Index c = 0; c < cols; ++c) {
    for (Index r = 0; r < rows; ++r) g(r, c) = Complex(normal(rng), normal(rng));
  }
  return g;
}

}  // namespace

PureState random_state(Index dim, std::mt19937_64& rng) {
  return PureState(gaussian_matrix(dim, 1, rng).col(0));
}

LinearOperator random_hermitian(Index dim, std::mt19937_64& rng) {
  const Matrix g = gaussian_matrix(dim, dim, rng);
  return LinearOperator(0.5 * (g + g.adjoint()));
}

LinearOperator random_projector(Index dim, Index rank, std::mt19937_64& rng) {
  if (rank < 0 || rank > dim) {
    throw Error(ErrorCode::kInvalidArgument, "projector rank outside [0, dim]");
  }
  Eigen::HouseholderQR<Matrix> qr(gaussian_matrix(dim, rank, rng));
  const Matrix q = qr.householderQ() * Matrix::Identity(dim, rank);
  return LinearOperator(q * q.adjoint());
}

}  // namespace qmt
