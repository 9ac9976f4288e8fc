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
 * Unitary Schroedinger evolution (hbar = 1) and the periodic position grid
 * used to represent a particle on a line.
 *
 * Grid conventions: x_j = -B/2 + j dx with dx = B/N, wavenumbers
 * k_m = 2 pi (m - N/2) / B listed in ascending order, and the Fourier map
 * F_{mj} = exp(-i k_m x_j) / sqrt(N) so that momentum amplitudes are F psi.
 */
#pragma once

#include <memory>
#include <span>

#include "qmt/hilbert.hpp"

namespace qmt {

/// Hermitian generator of the dynamics with its eigensystem cached at
/// construction. Copies share the immutable eigensystem.
class Hamiltonian {
 public:
  /// Diagonalizes `op`; throws kNotHermitian.
  explicit Hamiltonian(const LinearOperator& op);

  /// For operators whose eigenbasis is known in closed form (free particle on
  /// the grid). The caller guarantees op = V diag(E) V^dag.
  static Hamiltonian from_spectrum(LinearOperator op, Matrix eigenvectors, RealVector energies);

  Index dim() const { return data_->op.dim(); }
  const LinearOperator& op() const { return data_->op; }
  const Matrix& eigenvectors() const { return data_->vectors; }
  const RealVector& energies() const { return data_->energies; }

 private:
  struct Data {
    LinearOperator op;
    Matrix vectors;
    RealVector energies;
  };
  explicit Hamiltonian(std::shared_ptr<const Data> data) : data_(std::move(data)) {}

  std::shared_ptr<const Data> data_;
};

struct Propagator {
  double time;
  LinearOperator unitary;
};

/// U(t) = exp(-i H t) from the Hermitian eigendecomposition of H.
Propagator propagate(const Hamiltonian& h, double t);

/// U(t) psi without forming U; cost O(dim^2).
Vector evolve(const Hamiltonian& h, const Vector& psi, double t);
PureState evolve(const Hamiltonian& h, const PureState& psi, double t);

class GridSpace {
 public:
  /// Requires n_points >= 8 and even, box_length > 0.
  GridSpace(Index n_points, double box_length);

  Index size() const { return n_; }
  double box_length() const { return box_; }
  double dx() const { return box_ / static_cast<double>(n_); }
  double dk() const;

  double position(Index j) const { return -0.5 * box_ + static_cast<double>(j) * dx(); }
  double wavenumber(Index m) const;
  RealVector positions() const;
  RealVector wavenumbers() const;

  /// Signed displacement x - x0 folded into [-B/2, B/2).
  double periodic_offset(double x, double x0) const;

 private:
  Index n_;
  double box_;
};

struct GridOperators {
  Observable position;
  Observable momentum;
  LinearOperator fourier;
};

Matrix fourier_matrix(const GridSpace& g);

/// Circulant operator F^dag diag(symbol(k_m)) F.
LinearOperator fourier_multiplier(const GridSpace& g, std::span<const double> symbol);

GridOperators build_grid_operators(const GridSpace& g);

/// Momentum-space amplitudes F psi.
Vector momentum_amplitudes(const GridSpace& g, const PureState& psi);

/// psi(x) proportional to exp(-(x-x0)^2 / 2L^2 + i k0 x), folded periodically.
/// Throws kUnresolvableWidth unless 3 dx < L < B/10.
PureState gaussian_packet(const GridSpace& g, double x0, double k0, double width);

/// H = P^2 / 2m, diagonal in the Fourier basis.
Hamiltonian free_hamiltonian(const GridSpace& g, double mass);

/// H = P^2 / 2m + V(x); diagonalized numerically.
Hamiltonian potential_hamiltonian(const GridSpace& g, double mass, std::span<const double> potential);

/// Position mean and standard deviation of the Born distribution on the grid.
struct Moments {
  double mean;
  double stddev;
};
Moments position_moments(const GridSpace& g, const PureState& psi);
Moments momentum_moments(const GridSpace& g, const PureState& psi);

}  // namespace qmt
