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
 * Finite-dimensional Hilbert-space substrate: pure states, density
 * operators, general linear operators and observables with their spectral
 * resolution, plus tensor composition and partial trace.
 *
 * Composite index convention: in A (x) B the left factor is the slow (most
 * significant) index, i.e. |a>|b> sits at a * dim(B) + b.
 */
#pragma once

#include <complex>
#include <cstddef>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qmt/error.hpp"

namespace qmt {

using Complex = std::complex<double>;
using Index = Eigen::Index;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kHermitianTolerance = 1e-10;
inline constexpr double kMinimumStateNorm = 1e-8;
inline constexpr double kDefaultClusterTolerance = 1e-9;
inline constexpr double kProjectorTolerance = 1e-9;

/// Normalized state vector. Construction rescales any input whose norm is at
/// least kMinimumStateNorm and rejects smaller ones.
class PureState {
 public:
  explicit PureState(Vector amplitudes);

  static PureState basis(Index dim, Index k);

  Index dim() const { return amplitudes_.size(); }
  const Vector& amplitudes() const { return amplitudes_; }
  Complex operator[](Index k) const { return amplitudes_[k]; }

  Complex inner(const PureState& other) const { return amplitudes_.dot(other.amplitudes_); }

 private:
  Vector amplitudes_;
};

/// Square complex matrix with no further structure assumed.
class LinearOperator {
 public:
  explicit LinearOperator(Matrix matrix);

  static LinearOperator identity(Index dim);
  static LinearOperator zero(Index dim);
  static LinearOperator outer(const Vector& ket, const Vector& bra);
  static LinearOperator projector_onto(const PureState& state);

  Index dim() const { return matrix_.rows(); }
  const Matrix& matrix() const { return matrix_; }
  Complex operator()(Index r, Index c) const { return matrix_(r, c); }

  LinearOperator adjoint() const { return LinearOperator(matrix_.adjoint()); }
  bool is_hermitian(double tol = kHermitianTolerance) const;

  Vector apply(const Vector& v) const;

  friend LinearOperator operator*(const LinearOperator& a, const LinearOperator& b);
  friend LinearOperator operator+(const LinearOperator& a, const LinearOperator& b);
  friend LinearOperator operator-(const LinearOperator& a, const LinearOperator& b);
  friend LinearOperator operator*(Complex s, const LinearOperator& a);

 private:
  Matrix matrix_;
};

/// Positive, Hermitian, unit-trace operator. All three properties are
/// checked at construction to 1e-10.
class DensityOperator {
 public:
  explicit DensityOperator(Matrix matrix);

  static DensityOperator pure(const PureState& state);
  /// Convex combination of pure states; weights must be nonnegative and sum to one.
  static DensityOperator mixture(std::span<const std::pair<double, PureState>> ensemble);

  Index dim() const { return matrix_.rows(); }
  const Matrix& matrix() const { return matrix_; }
  double purity() const;

 private:
  Matrix matrix_;
};

/// Result of a Hermitian eigensolve, eigenvalues ascending.
struct Eigensystem {
  RealVector values;
  Matrix vectors;
};

Eigensystem hermitian_eigensystem(const LinearOperator& op);

/// Hermitian operator together with its spectral resolution O = sum_i o_i P_i.
///
/// Projectors are kept in factored form: eigenvalue group i owns a contiguous
/// block of orthonormal columns V_i of the eigenbasis and P_i = V_i V_i^dag.
/// This keeps grid observables with thousands of one-dimensional eigenspaces
/// affordable; projector() materializes a dense P_i on request.
class Observable {
 public:
  /// `values[c]` is the eigenvalue of column c of `eigenbasis`. Columns are
  /// sorted and eigenvalues within cluster_tol * spectral radius are merged.
  Observable(LinearOperator op, Matrix eigenbasis, std::span<const double> values,
             double cluster_tol = kDefaultClusterTolerance);

  /// Builds O = sum_i o_i P_i from a complete orthogonal family of projectors.
  static Observable from_projectors(std::span<const std::pair<double, LinearOperator>> resolution);
  /// Diagonal observable in the computational basis.
  static Observable diagonal(std::span<const double> values,
                             double cluster_tol = kDefaultClusterTolerance);

  Index dim() const { return op_.dim(); }
  const LinearOperator& op() const { return op_; }
  const Matrix& eigenbasis() const { return basis_; }

  /// Number of distinct eigenvalues.
  std::size_t size() const { return groups_.size(); }
  double eigenvalue(std::size_t i) const { return groups_.at(i).value; }
  Index multiplicity(std::size_t i) const { return groups_.at(i).count; }
  std::vector<double> eigenvalues() const;

  /// Orthonormal columns spanning the i-th eigenspace.
  Eigen::Block<const Matrix, Eigen::Dynamic, Eigen::Dynamic, true> eigenvectors(std::size_t i) const;
  LinearOperator projector(std::size_t i) const;
  Vector project(std::size_t i, const Vector& v) const;

  double weight(std::size_t i, const PureState& state) const;
  double weight(std::size_t i, const DensityOperator& rho) const;

 private:
  struct Group {
    double value;
    Index first;
    Index count;
  };

  LinearOperator op_;
  Matrix basis_;
  std::vector<Group> groups_;
};

/// Spectral resolution via Hermitian eigensolve. Throws kNotHermitian.
Observable spectral_decompose(const LinearOperator& op,
                              double cluster_tol = kDefaultClusterTolerance);

PureState tensor_product(const PureState& a, const PureState& b);
LinearOperator tensor_product(const LinearOperator& a, const LinearOperator& b);
DensityOperator tensor_product(const DensityOperator& a, const DensityOperator& b);

/// Reduced state on the factors listed in `keep` (any order; the result
/// orders them ascending). Throws kDimensionMismatch / kInvalidIndex.
DensityOperator partial_trace(const DensityOperator& rho, std::span<const Index> subsystem_dims,
                              std::span<const std::size_t> keep);

/// Lifts `op` (acting on the factors `targets`, in that order) to the full
/// composite space, acting as identity elsewhere.
LinearOperator embed_operator(const LinearOperator& op, std::span<const Index> subsystem_dims,
                              std::span<const std::size_t> targets);

Complex expectation(const PureState& state, const LinearOperator& op);
Complex expectation(const DensityOperator& rho, const LinearOperator& op);

/// Largest singular value.
double operator_norm(const Matrix& m);

/// Normalized complex Gaussian vector (uniform on the unit sphere).
PureState random_state(Index dim, std::mt19937_64& rng);
/// (G + G^dagger) / 2 with i.i.d. complex Gaussian G.
LinearOperator random_hermitian(Index dim, std::mt19937_64& rng);
/// Projector onto a random subspace of the given rank.
LinearOperator random_projector(Index dim, Index rank, std::mt19937_64& rng);

}  // namespace qmt
