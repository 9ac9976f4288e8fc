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

#include "qmt/histories.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <unsupported/Eigen/KroneckerProduct>

namespace qmt {

namespace {

constexpr double kBranchWeightFloor = 1e-15;

std::vector<std::pair<double, Vector>> branches_of(const DensityOperator& rho) {
  const Eigensystem es = hermitian_eigensystem(LinearOperator(rho.matrix()));
  std::vector<std::pair<double, Vector>> out;
  for (Index k = 0; k < es.values.size(); ++k) {
    if (es.values[k] > kBranchWeightFloor) out.emplace_back(es.values[k], es.vectors.col(k));
  }
  return out;
}

}  // namespace

HistorySet::HistorySet(Hamiltonian h, const PureState& initial, double t0, std::vector<double> times,
                       std::vector<ProjectorFamily> families)
    : hamiltonian_(std::move(h)),
      branches_{{1.0, initial.amplitudes()}},
      t0_(t0),
      times_(std::move(times)),
      families_(std::move(families)) {
  if (initial.dim() != hamiltonian_.dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "initial state and Hamiltonian dimensions differ");
  }
  validate_and_prepare();
}

HistorySet::HistorySet(Hamiltonian h, const DensityOperator& initial, double t0, std::vector<double> times,
                       std::vector<ProjectorFamily> families)
    : hamiltonian_(std::move(h)),
      branches_(branches_of(initial)),
      t0_(t0),
      times_(std::move(times)),
      families_(std::move(families)) {
  if (initial.dim() != hamiltonian_.dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "initial state and Hamiltonian dimensions differ");
  }
  validate_and_prepare();
}

void HistorySet::validate_and_prepare() {
  if (times_.empty() || times_.size() != families_.size()) {
    throw Error(ErrorCode::kInvalidArgument, "need one projector family per history time");
  }
  double previous = t0_;
  for (std::size_t m = 0; m < times_.size(); ++m) {
    const bool ordered = m == 0 ? times_[m] >= t0_ : times_[m] > previous;
    if (!std::isfinite(times_[m]) || !ordered) {
      throw Error(ErrorCode::kInvalidArgument, "history times must satisfy t0 <= t1 < t2 < ...");
    }
    previous = times_[m];
  }

  const Index n = dim();
  for (std::size_t m = 0; m < families_.size(); ++m) {
    const ProjectorFamily& family = families_[m];
    if (family.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "empty projector family");
    }
    Matrix sum = Matrix::Zero(n, n);
    for (const LinearOperator& p : family) {
      if (p.dim() != n) {
        throw Error(ErrorCode::kDimensionMismatch, "projector does not act on the history space");
      }
      const Matrix& pm = p.matrix();
      if (!p.is_hermitian(kFamilyTolerance) ||
          (pm * pm - pm).cwiseAbs().maxCoeff() > kFamilyTolerance) {
        std::ostringstream os;
        os << "family " << m << " contains a non-projector";
        throw Error(ErrorCode::kInvalidArgument, os.str());
      }
      sum += pm;
    }
    if ((sum - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() > kFamilyTolerance) {
      std::ostringstream os;
      os << "family " << m << " does not resolve the identity";
      throw Error(ErrorCode::kInvalidArgument, os.str());
    }
  }

  steps_.clear();
  double from = t0_;
  for (double t : times_) {
    steps_.push_back(propagate(hamiltonian_, t - from).unitary.matrix());
    from = t;
  }
}

std::size_t HistorySet::history_count() const {
  std::size_t count = 1;
  for (const ProjectorFamily& f : families_) count *= f.size();
  return count;
}

std::vector<HistoryLabel> HistorySet::histories() const {
  std::vector<HistoryLabel> out;
  out.reserve(history_count());
  HistoryLabel current(length(), 0);
  for (std::size_t k = 0; k < history_count(); ++k) {
    out.push_back(current);
    for (std::size_t m = length(); m-- > 0;) {
      if (++current[m] < families_[m].size()) break;
      current[m] = 0;
    }
  }
  return out;
}

LinearOperator class_operator(const HistorySet& hs, const HistoryLabel& history) {
  if (history.size() != hs.length()) {
    throw Error(ErrorCode::kInvalidIndex, "history label has the wrong length");
  }
  Matrix c = Matrix::Identity(hs.dim(), hs.dim());
  for (std::size_t m = 0; m < hs.length(); ++m) {
    if (history[m] >= hs.family(m).size()) {
      std::ostringstream os;
      os << "projector index " << history[m] << " out of range at time " << m;
      throw Error(ErrorCode::kInvalidIndex, os.str());
    }
    c = hs.family(m)[history[m]].matrix() * (hs.step(m) * c);
  }
  return LinearOperator(std::move(c));
}

DecoherenceFunctional::DecoherenceFunctional(Matrix d, std::vector<HistoryLabel> labels)
    : d_(std::move(d)), labels_(std::move(labels)) {
  if (d_.rows() != d_.cols() || d_.rows() != static_cast<Index>(labels_.size())) {
    throw Error(ErrorCode::kDimensionMismatch, "decoherence matrix does not match its labels");
  }
  if ((d_ - d_.adjoint()).cwiseAbs().maxCoeff() > 1e-10) {
    throw Error(ErrorCode::kNotHermitian, "decoherence functional is not Hermitian");
  }
  for (Index a = 0; a < d_.rows(); ++a) {
    if (d_(a, a).real() < -1e-10) {
      throw Error(ErrorCode::kInvalidArgument, "decoherence functional has a negative diagonal entry");
    }
  }
  if (std::abs(d_.sum() - Complex(1.0)) > 1e-9) {
    std::ostringstream os;
    os << "decoherence functional sums to " << d_.sum().real() << ", not 1";
    throw Error(ErrorCode::kInvalidArgument, os.str());
  }
}

std::size_t DecoherenceFunctional::index_of(const HistoryLabel& history) const {
  const auto it = std::find(labels_.begin(), labels_.end(), history);
  if (it == labels_.end()) {
    throw Error(ErrorCode::kInvalidIndex, "unknown history");
  }
  return static_cast<std::size_t>(it - labels_.begin());
}

DecoherenceFunctional decoherence_functional(const HistorySet& hs) {
  const Index n_hist = static_cast<Index>(hs.history_count());
  Matrix d = Matrix::Zero(n_hist, n_hist);
  for (const auto& [weight, psi] : hs.initial_branches()) {
    // Branch vectors C_a psi, built level by level in lexicographic order.
    std::vector<Vector> level{psi};
    for (std::size_t m = 0; m < hs.length(); ++m) {
      std::vector<Vector> next;
      next.reserve(level.size() * hs.family(m).size());
      for (const Vector& v : level) {
        const Vector moved = hs.step(m) * v;
        for (const LinearOperator& p : hs.family(m)) next.push_back(p.matrix() * moved);
      }
      level = std::move(next);
    }
    Matrix b(hs.dim(), n_hist);
    for (Index a = 0; a < n_hist; ++a) b.col(a) = level[static_cast<std::size_t>(a)];
    // D(a, b) = <C_b psi | C_a psi>.
    d += weight * (b.adjoint() * b).transpose();
  }
  d = 0.5 * (d + d.adjoint()).eval();
  return DecoherenceFunctional(std::move(d), hs.histories());
}

ConsistencyReport is_consistent(const DecoherenceFunctional& d, double eps) {
  double worst = 0.0;
  for (std::size_t a = 0; a < d.size(); ++a) {
    const double daa = d(a, a).real();
    if (daa < kVacuousDiagonal) continue;
    for (std::size_t b = a + 1; b < d.size(); ++b) {
      const double dbb = d(b, b).real();
      if (dbb < kVacuousDiagonal) continue;
      worst = std::max(worst, std::abs(d(a, b)) / std::sqrt(daa * dbb));
    }
  }
  return {worst <= eps, worst};
}

namespace {

OutcomeLabel to_outcome_label(const HistoryLabel& h) {
  return OutcomeLabel(h.begin(), h.end());
}

}  // namespace

OutcomeDistribution history_probabilities(const DecoherenceFunctional& d, double eps) {
  const ConsistencyReport report = is_consistent(d, eps);
  if (!report.consistent) {
    std::ostringstream os;
    os << "family is not consistent: worst off-diagonal ratio " << report.worst_ratio << " exceeds "
       << eps;
    throw Error(ErrorCode::kInconsistentFamily, os.str());
  }
  std::vector<Outcome> out;
  out.reserve(d.size());
  for (std::size_t a = 0; a < d.size(); ++a) {
    out.push_back({to_outcome_label(d.labels()[a]), d(a, a).real()});
  }
  // Off-diagonal mass up to eps per pair may be missing from the diagonal.
  return OutcomeDistribution(std::move(out), eps * static_cast<double>(d.size()) + 1e-10);
}

DecoherenceFunctional coarse_grain(const DecoherenceFunctional& d,
                                   const std::vector<std::vector<std::size_t>>& groups,
                                   std::vector<HistoryLabel> labels) {
  if (groups.size() != labels.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "need one label per merged history");
  }
  std::vector<int> seen(d.size(), 0);
  for (const auto& g : groups) {
    for (std::size_t a : g) {
      if (a >= d.size()) throw Error(ErrorCode::kInvalidIndex, "history index out of range");
      ++seen[a];
    }
  }
  if (std::any_of(seen.begin(), seen.end(), [](int s) { return s != 1; })) {
    throw Error(ErrorCode::kInvalidArgument, "groups must partition the histories");
  }
  const Index n = static_cast<Index>(groups.size());
  Matrix merged = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      Complex s = 0.0;
      for (std::size_t a : groups[static_cast<std::size_t>(i)]) {
        for (std::size_t b : groups[static_cast<std::size_t>(j)]) s += d(a, b);
      }
      merged(i, j) = s;
    }
  }
  return DecoherenceFunctional(std::move(merged), std::move(labels));
}

OutcomeDistribution conditional_next(const DecoherenceFunctional& d, const HistoryLabel& prefix) {
  std::vector<Outcome> out;
  double total = 0.0;
  for (std::size_t a = 0; a < d.size(); ++a) {
    const HistoryLabel& h = d.labels()[a];
    if (h.size() != prefix.size() + 1 || !std::equal(prefix.begin(), prefix.end(), h.begin())) continue;
    const double p = std::max(0.0, d(a, a).real());
    out.push_back({{static_cast<double>(h.back())}, p});
    total += p;
  }
  if (out.empty()) {
    throw Error(ErrorCode::kInvalidIndex, "no history extends the given prefix");
  }
  if (!(total > 1e-12)) {
    throw Error(ErrorCode::kImpossibleOutcome, "conditioning prefix has zero weight");
  }
  for (Outcome& o : out) o.probability /= total;
  return OutcomeDistribution(std::move(out));
}

namespace {

LinearOperator diagonal_projector(Index n, Index first, Index last) {
  Matrix p = Matrix::Zero(n, n);
  for (Index j = first; j < last; ++j) p(j, j) = 1.0;
  return LinearOperator(std::move(p));
}

}  // namespace

HistorySet two_slit_histories(const TwoSlitSetup& s) {
  if (s.screen_cells <= 0 || s.grid_points % s.screen_cells != 0) {
    throw Error(ErrorCode::kInvalidArgument, "screen cells must evenly divide the grid");
  }
  if (!(s.screen_time > 0.0) || !(s.separation > 0.0) || !(s.separation < 0.5 * s.box_length)) {
    throw Error(ErrorCode::kInvalidArgument, "need screen_time > 0 and 0 < separation < box/2");
  }
  const GridSpace g(s.grid_points, s.box_length);
  const Index n = g.size();
  const Vector two_packets = gaussian_packet(g, -s.separation, 0.0, s.width).amplitudes() +
                             gaussian_packet(g, s.separation, 0.0, s.width).amplitudes();
  const PureState psi(two_packets);
  const Hamiltonian free = free_hamiltonian(g, s.mass);

  const LinearOperator left = diagonal_projector(n, 0, n / 2);
  const LinearOperator right = diagonal_projector(n, n / 2, n);
  const Index cell = n / s.screen_cells;
  ProjectorFamily screen;
  for (Index c = 0; c < s.screen_cells; ++c) screen.push_back(diagonal_projector(n, c * cell, (c + 1) * cell));

  if (!s.which_way) {
    return HistorySet(free, psi, 0.0, {0.0, s.screen_time}, {{left, right}, std::move(screen)});
  }

  // Pointer qubit flipped by the right-hand projector: P_L x 1 + P_R x X.
  const Matrix id2 = Matrix::Identity(2, 2);
  Matrix flip(2, 2);
  flip << 0.0, 1.0, 1.0, 0.0;
  const Matrix record = Eigen::kroneckerProduct(left.matrix(), id2).eval() +
                        Eigen::kroneckerProduct(right.matrix(), flip).eval();
  const PureState joint_state(record * tensor_product(psi, PureState::basis(2, 0)).amplitudes());

  RealVector energies(2 * n);
  for (Index k = 0; k < n; ++k) energies.segment(2 * k, 2).setConstant(free.energies()[k]);
  const Hamiltonian free_with_pointer = Hamiltonian::from_spectrum(
      tensor_product(free.op(), LinearOperator::identity(2)),
      Eigen::kroneckerProduct(free.eigenvectors(), id2).eval(), std::move(energies));

  const LinearOperator one = LinearOperator::identity(2);
  ProjectorFamily slits{tensor_product(left, one), tensor_product(right, one)};
  ProjectorFamily cells;
  for (const LinearOperator& p : screen) cells.push_back(tensor_product(p, one));
  return HistorySet(free_with_pointer, joint_state, 0.0, {0.0, s.screen_time},
                    {std::move(slits), std::move(cells)});
}

TwoSlitPattern two_slit_pattern(const TwoSlitSetup& setup, double eps) {
  const HistorySet hs = two_slit_histories(setup);
  const DecoherenceFunctional d = decoherence_functional(hs);
  const std::size_t cells = static_cast<std::size_t>(setup.screen_cells);

  TwoSlitPattern out{{}, {}, {}, {}, 0.0, is_consistent(d, eps)};
  for (std::size_t x = 0; x < cells; ++x) {
    const std::size_t one = x;
    const std::size_t two = cells + x;
    const double p1 = d(one, one).real();
    const double p2 = d(two, two).real();
    const double joint = p1 + p2 + 2.0 * d(one, two).real();
    out.p1.push_back(p1);
    out.p2.push_back(p2);
    out.joint.push_back(joint);
    out.interference.push_back(joint - p1 - p2);
    out.max_interference = std::max(out.max_interference, std::abs(joint - p1 - p2));
  }
  return out;
}

}  // namespace qmt
