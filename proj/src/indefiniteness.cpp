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

#include "qmt/indefiniteness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include <boost/math/tools/minima.hpp>

namespace qmt {

DefinitenessReport ee_link_status(const PureState& state, const Observable& obs, double eta) {
  if (state.dim() != obs.dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "state and observable dimensions differ");
  }
  std::vector<double> weights(obs.size());
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const double residual = (state.amplitudes() - obs.project(i, state.amplitudes())).norm();
    if (residual < eta) {
      return {DefinitenessReport::Status::kDefinite, obs.eigenvalue(i), residual, {}};
    }
    weights[i] = obs.weight(i, state);
  }

  std::vector<std::size_t> order(obs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return weights[a] > weights[b]; });
  std::vector<std::size_t> chosen;
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (weights[order[k]] > eta * eta || k < 2) chosen.push_back(order[k]);
  }
  std::sort(chosen.begin(), chosen.end());

  DefinitenessReport report{DefinitenessReport::Status::kIndefinite, 0.0, 0.0, {}};
  for (std::size_t i : chosen) report.support.emplace_back(obs.eigenvalue(i), weights[i]);
  return report;
}

Observable region_projector(const GridSpace& g, IndexWindow window) {
  if (window.size() <= 0) {
    throw Error(ErrorCode::kEmptyRegion, "region window is empty");
  }
  if (window.first < 0 || window.last > g.size()) {
    throw Error(ErrorCode::kInvalidIndex, "region window exceeds the grid");
  }
  std::vector<double> indicator(static_cast<std::size_t>(g.size()), 0.0);
  for (Index j = window.first; j < window.last; ++j) indicator[static_cast<std::size_t>(j)] = 1.0;
  return Observable::diagonal(indicator);
}

PureState truncated_gaussian(const GridSpace& g, IndexWindow window, double x0, double width) {
  const PureState full = gaussian_packet(g, x0, 0.0, width);
  Vector cut = Vector::Zero(g.size());
  for (Index j = std::max<Index>(window.first, 0); j < std::min(window.last, g.size()); ++j) {
    cut[j] = full[j];
  }
  return PureState(std::move(cut));
}

double delocalization_demo(const GridSpace& g, const Hamiltonian& h, const PureState& initial,
                           IndexWindow window, double eps) {
  if (initial.dim() != g.size() || h.dim() != g.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "state or Hamiltonian not on this grid");
  }
  if (!(eps >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "evolution time must be nonnegative");
  }
  for (Index j = 0; j < g.size(); ++j) {
    if (!window.contains(j) && initial[j] != Complex(0.0)) {
      throw Error(ErrorCode::kInvalidArgument, "initial state is not supported inside the window");
    }
  }
  const Observable region = region_projector(g, window);
  const PureState later = eps == 0.0 ? initial : evolve(h, initial, eps);
  if (region.size() == 1) return 0.0;  // window is the whole grid
  // Group 0 is the indicator value 0, i.e. everything outside the window.
  return region.weight(0, later);
}

std::string_view to_string(ScanClass c) {
  switch (c) {
    case ScanClass::kIdenticallyZero: return "identically-zero";
    case ScanClass::kIsolatedZeros: return "isolated-zeros";
    case ScanClass::kNeverZero: return "never-zero";
  }
  return "unknown";
}

namespace {

// Evaluates <psi(t)|P|psi(t)> from the eigen-expansion of psi(0).
class ExpectationSeries {
 public:
  ExpectationSeries(const Hamiltonian& h, const PureState& initial, const LinearOperator& p)
      : h_(h), coeffs_(h.eigenvectors().adjoint() * initial.amplitudes()), p_(p) {}

  double operator()(double t) const {
    Vector c = coeffs_;
    for (Index k = 0; k < c.size(); ++k) c[k] *= std::polar(1.0, -h_.energies()[k] * t);
    const Vector psi = h_.eigenvectors() * c;
    return psi.dot(p_.matrix() * psi).real();
  }

 private:
  const Hamiltonian& h_;
  Vector coeffs_;
  const LinearOperator& p_;
};

void require_projector(const LinearOperator& p) {
  const Matrix& m = p.matrix();
  if (!p.is_hermitian(kProjectorTolerance) || (m * m - m).cwiseAbs().maxCoeff() > kProjectorTolerance) {
    throw Error(ErrorCode::kInvalidArgument, "scan operator is not an orthogonal projector");
  }
}

}  // namespace

IndefinitenessScan indefiniteness_scan(const Hamiltonian& h, const PureState& initial,
                                       const LinearOperator& projector, std::span<const double> times,
                                       double eta) {
  if (initial.dim() != h.dim() || projector.dim() != h.dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "scan inputs have inconsistent dimensions");
  }
  require_projector(projector);
  if (times.size() < kMinimumScanPoints) {
    std::ostringstream os;
    os << "scan needs at least " << kMinimumScanPoints << " time points";
    throw Error(ErrorCode::kInvalidArgument, os.str());
  }
  if (!std::is_sorted(times.begin(), times.end()) ||
      std::adjacent_find(times.begin(), times.end()) != times.end()) {
    throw Error(ErrorCode::kInvalidArgument, "scan times must be strictly increasing");
  }

  const ExpectationSeries series(h, initial, projector);
  IndefinitenessScan scan{{times.begin(), times.end()}, {}, ScanClass::kNeverZero, {}, 0.0};
  scan.series.reserve(times.size());
  for (double t : times) scan.series.push_back(series(t));
  scan.min_value = *std::min_element(scan.series.begin(), scan.series.end());

  const std::size_t n = times.size();
  if (std::all_of(scan.series.begin(), scan.series.end(), [&](double v) { return v <= eta; })) {
    scan.classification = ScanClass::kIdenticallyZero;
    return scan;
  }

  const auto record_zero = [&](double t, std::size_t j) {
    const double cell = times[std::min(j + 1, n - 1)] - times[j > 0 ? j - 1 : 0];
    if (scan.zero_times.empty() || t - scan.zero_times.back() > cell) scan.zero_times.push_back(t);
  };
  for (std::size_t j = 0; j < n; ++j) {
    const double v = scan.series[j];
    if (v <= eta) {
      record_zero(times[j], j);
      continue;
    }
    if (j == 0 || j + 1 == n) continue;
    if (v < scan.series[j - 1] && v <= scan.series[j + 1]) {
      const auto [t_min, v_min] = boost::math::tools::brent_find_minima(
          [&](double t) { return series(t); }, times[j - 1], times[j + 1],
          std::numeric_limits<double>::digits / 2 + 4);
      scan.min_value = std::min(scan.min_value, v_min);
      if (v_min <= eta) record_zero(t_min, j);
    }
  }
  scan.classification = scan.zero_times.empty() ? ScanClass::kNeverZero : ScanClass::kIsolatedZeros;
  return scan;
}

std::vector<bool> invariant_subspace_check(const Hamiltonian& h, const Observable& obs, double tol) {
  if (h.dim() != obs.dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "Hamiltonian and observable dimensions differ");
  }
  std::vector<bool> invariant;
  invariant.reserve(obs.size());
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const auto v = obs.eigenvectors(i);
    const Matrix hv = h.op().matrix() * v;
    const Matrix leak = hv - v * (v.adjoint() * hv);
    invariant.push_back(operator_norm(leak) <= tol);
  }
  return invariant;
}

double complete_indefiniteness_fraction(const Hamiltonian& h, const Observable& obs,
                                        std::span<const double> times, int n_states,
                                        std::uint64_t seed, double eta) {
  if (h.dim() != obs.dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "Hamiltonian and observable dimensions differ");
  }
  if (n_states <= 0 || times.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "need at least one state and one time");
  }
  std::mt19937_64 rng(seed);
  std::size_t positive = 0;
  std::size_t total = 0;
  for (int s = 0; s < n_states; ++s) {
    const Vector coeffs = h.eigenvectors().adjoint() * random_state(h.dim(), rng).amplitudes();
    for (double t : times) {
      Vector c = coeffs;
      for (Index k = 0; k < c.size(); ++k) c[k] *= std::polar(1.0, -h.energies()[k] * t);
      const PureState psi(h.eigenvectors() * c);
      bool all_positive = true;
      for (std::size_t i = 0; i < obs.size() && all_positive; ++i) all_positive = obs.weight(i, psi) > eta;
      positive += all_positive ? 1 : 0;
      ++total;
    }
  }
  return static_cast<double>(positive) / static_cast<double>(total);
}

}  // namespace qmt
