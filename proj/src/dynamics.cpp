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

#include "qmt/dynamics.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace qmt {

Hamiltonian::Hamiltonian(const LinearOperator& op) {
  Eigensystem es = hermitian_eigensystem(op);
  data_ = std::make_shared<const Data>(Data{op, std::move(es.vectors), std::move(es.values)});
}

Hamiltonian Hamiltonian::from_spectrum(LinearOperator op, Matrix eigenvectors, RealVector energies) {
  const Index n = op.dim();
  if (eigenvectors.rows() != n || eigenvectors.cols() != n || energies.size() != n) {
    throw Error(ErrorCode::kDimensionMismatch, "spectrum does not match Hamiltonian dimension");
  }
  if (!op.is_hermitian()) {
    throw Error(ErrorCode::kNotHermitian, "Hamiltonian is not Hermitian within 1e-10");
  }
  return Hamiltonian(std::make_shared<const Data>(
      Data{std::move(op), std::move(eigenvectors), std::move(energies)}));
}

Propagator propagate(const Hamiltonian& h, double t) {
  if (!std::isfinite(t)) {
    throw Error(ErrorCode::kInvalidArgument, "propagation time must be finite");
  }
  const Matrix& v = h.eigenvectors();
  Vector phases(h.dim());
  for (Index k = 0; k < h.dim(); ++k) phases[k] = std::polar(1.0, -h.energies()[k] * t);
  return {t, LinearOperator(v * phases.asDiagonal() * v.adjoint())};
}

Vector evolve(const Hamiltonian& h, const Vector& psi, double t) {
  if (psi.size() != h.dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "state and Hamiltonian dimensions differ");
  }
  const Matrix& v = h.eigenvectors();
  Vector coeffs = v.adjoint() * psi;
  for (Index k = 0; k < coeffs.size(); ++k) coeffs[k] *= std::polar(1.0, -h.energies()[k] * t);
  return v * coeffs;
}

PureState evolve(const Hamiltonian& h, const PureState& psi, double t) {
  return PureState(evolve(h, psi.amplitudes(), t));
}

// ---------------------------------------------------------------------------
// Grid

GridSpace::GridSpace(Index n_points, double box_length) : n_(n_points), box_(box_length) {
  if (n_points < 8 || n_points % 2 != 0) {
    throw Error(ErrorCode::kInvalidArgument, "grid needs an even number of points >= 8");
  }
  if (!(box_length > 0.0) || !std::isfinite(box_length)) {
    throw Error(ErrorCode::kInvalidArgument, "box length must be positive");
  }
}

double GridSpace::dk() const { return 2.0 * std::numbers::pi / box_; }

double GridSpace::wavenumber(Index m) const { return dk() * static_cast<double>(m - n_ / 2); }

RealVector GridSpace::positions() const {
  RealVector x(n_);
  for (Index j = 0; j < n_; ++j) x[j] = position(j);
  return x;
}

RealVector GridSpace::wavenumbers() const {
  RealVector k(n_);
  for (Index m = 0; m < n_; ++m) k[m] = wavenumber(m);
  return k;
}

double GridSpace::periodic_offset(double x, double x0) const {
  double d = std::fmod(x - x0 + 0.5 * box_, box_);
  if (d < 0.0) d += box_;
  return d - 0.5 * box_;
}

Matrix fourier_matrix(const GridSpace& g) {
  const Index n = g.size();
  const double norm = 1.0 / std::sqrt(static_cast<double>(n));
  Matrix f(n, n);
  // k_m x_j = 2 pi (m - N/2)(j - N/2) / N; reduce the integer product mod N
  // before the trig call to keep the phases exact for large grids.
  for (Index m = 0; m < n; ++m) {
    for (Index j = 0; j < n; ++j) {
      const long long p = static_cast<long long>(m - n / 2) * static_cast<long long>(j - n / 2);
      const long long r = ((p % n) + n) % n;
      const double angle = -2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(n);
      f(m, j) = std::polar(norm, angle);
    }
  }
  return f;
}

LinearOperator fourier_multiplier(const GridSpace& g, std::span<const double> symbol) {
  const Index n = g.size();
  if (static_cast<Index>(symbol.size()) != n) {
    throw Error(ErrorCode::kDimensionMismatch, "Fourier symbol length differs from grid size");
  }
  // Circulant: entry (j, l) depends only on d = (j - l) mod N.
  Vector column(n);
  for (Index d = 0; d < n; ++d) {
    Complex acc = 0.0;
    for (Index m = 0; m < n; ++m) {
      const long long p = static_cast<long long>(m - n / 2) * static_cast<long long>(d);
      const long long r = ((p % n) + n) % n;
      acc += symbol[static_cast<std::size_t>(m)] *
             std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(n));
    }
    column[d] = acc / static_cast<double>(n);
  }
  Matrix op(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index l = 0; l < n; ++l) op(j, l) = column[((j - l) % n + n) % n];
  }
  // Real symbols give Hermitian circulants; remove roundoff skew.
  return LinearOperator(0.5 * (op + op.adjoint()));
}

GridOperators build_grid_operators(const GridSpace& g) {
  const RealVector x = g.positions();
  const RealVector k = g.wavenumbers();
  const std::vector<double> xs(x.data(), x.data() + x.size());
  const std::vector<double> ks(k.data(), k.data() + k.size());
  Matrix f = fourier_matrix(g);
  Observable momentum(fourier_multiplier(g, ks), f.adjoint(), ks);
  return {Observable::diagonal(xs), std::move(momentum), LinearOperator(std::move(f))};
}

Vector momentum_amplitudes(const GridSpace& g, const PureState& psi) {
  if (psi.dim() != g.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "state does not live on this grid");
  }
  return fourier_matrix(g) * psi.amplitudes();
}

PureState gaussian_packet(const GridSpace& g, double x0, double k0, double width) {
  if (!(width > 3.0 * g.dx()) || !(width < g.box_length() / 10.0)) {
    std::ostringstream os;
    os << "width " << width << " outside (" << 3.0 * g.dx() << ", " << g.box_length() / 10.0 << ")";
    throw Error(ErrorCode::kUnresolvableWidth, os.str());
  }
  Vector psi(g.size());
  for (Index j = 0; j < g.size(); ++j) {
    const double d = g.periodic_offset(g.position(j), x0);
    psi[j] = std::polar(std::exp(-d * d / (2.0 * width * width)), k0 * (x0 + d));
  }
  return PureState(std::move(psi));
}

Hamiltonian free_hamiltonian(const GridSpace& g, double mass) {
  if (!(mass > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "mass must be positive");
  }
  const RealVector k = g.wavenumbers();
  RealVector energies = k.array().square() / (2.0 * mass);
  const std::vector<double> symbol(energies.data(), energies.data() + energies.size());
  return Hamiltonian::from_spectrum(fourier_multiplier(g, symbol), fourier_matrix(g).adjoint(),
                                    std::move(energies));
}

Hamiltonian potential_hamiltonian(const GridSpace& g, double mass, std::span<const double> potential) {
  if (static_cast<Index>(potential.size()) != g.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "potential length differs from grid size");
  }
  if (!(mass > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "mass must be positive");
  }
  const RealVector k = g.wavenumbers();
  std::vector<double> kinetic(static_cast<std::size_t>(g.size()));
  for (Index m = 0; m < g.size(); ++m) kinetic[static_cast<std::size_t>(m)] = k[m] * k[m] / (2.0 * mass);
  Matrix h = fourier_multiplier(g, kinetic).matrix();
  for (Index j = 0; j < g.size(); ++j) h(j, j) += potential[static_cast<std::size_t>(j)];
  return Hamiltonian(LinearOperator(std::move(h)));
}

namespace {

Moments moments_of(const RealVector& points, const Vector& amps) {
  const RealVector p = amps.cwiseAbs2();
  const double total = p.sum();
  const double mean = p.dot(points) / total;
  const double var = p.dot((points.array() - mean).square().matrix()) / total;
  return {mean, std::sqrt(std::max(var, 0.0))};
}

}  // namespace

Moments position_moments(const GridSpace& g, const PureState& psi) {
  if (psi.dim() != g.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "state does not live on this grid");
  }
  return moments_of(g.positions(), psi.amplitudes());
}

Moments momentum_moments(const GridSpace& g, const PureState& psi) {
  return moments_of(g.wavenumbers(), momentum_amplitudes(g, psi));
}

}  // namespace qmt
