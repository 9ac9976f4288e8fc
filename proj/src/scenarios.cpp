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

#include "qmt/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include <json.hpp>
#include <unsupported/Eigen/KroneckerProduct>

#include "qmt/dynamics.hpp"
#include "qmt/histories.hpp"
#include "qmt/indefiniteness.hpp"
#include "qmt/measurement.hpp"
#include "qmt/modeling.hpp"
#include "qmt/zeno.hpp"

namespace qmt {

namespace {

using std::numbers::pi;

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Assertion at_most(std::string name, double value, double tolerance) {
  return {std::move(name), value <= tolerance, value, tolerance};
}

Assertion above(std::string name, double value, double threshold) {
  return {std::move(name), value > threshold, value, threshold};
}

[[noreturn]] void range_error(const std::string& param, const std::string& message) {
  throw ConfigError({{"params." + param, ErrorCode::kRangeError, message}});
}

// ---------------------------------------------------------------------------
// stern_gerlach

Matrix cyclic_shift(Index n, Index steps) {
  Matrix t = Matrix::Zero(n, n);
  for (Index j = 0; j < n; ++j) t(((j + steps) % n + n) % n, j) = 1.0;
  return t;
}

Matrix region_matrix(const GridSpace& g, Index first, Index last) {
  const Observable region = region_projector(g, {first, last});
  return region.projector(region.size() - 1).matrix();
}

ResultTable stern_gerlach(const ScenarioConfig& cfg) {
  const SternGerlachSetup setup{cfg.integer_param("grid_points"), cfg.param("box_length"),
                                cfg.param("width"), cfg.param("deflection")};
  const Index steps = cfg.integer_param("theta_steps");
  ResultTable t;
  t.columns = {{"theta", "rad"}, {"prob_plus", ""}, {"prob_minus", ""}, {"cos2_half_theta", ""},
               {"sin2_half_theta", ""}};
  std::vector<double> thetas;
  for (Index k = 0; k <= steps; ++k) thetas.push_back(pi * static_cast<double>(k) / static_cast<double>(steps));
  const SternGerlachStages s = stern_gerlach_pipeline(setup, thetas);
  double worst = 0.0;
  for (std::size_t k = 0; k < thetas.size(); ++k) {
    const double c2 = std::pow(std::cos(thetas[k] / 2.0), 2);
    const double s2 = std::pow(std::sin(thetas[k] / 2.0), 2);
    t.rows.push_back({thetas[k], s.prob_plus[k], s.prob_minus[k], c2, s2});
    worst = std::max({worst, std::abs(s.prob_plus[k] - c2), std::abs(s.prob_minus[k] - s2)});
  }
  const double worst_structure = s.split_structure_error;
  const double worst_fidelity_loss = std::abs(1.0 - s.conditioned_fidelity);
  t.assertions = {at_most("split_state_structure", worst_structure, 1e-12),
                  at_most("conditioned_state_is_plus_z", worst_fidelity_loss, 1e-12),
                  at_most("final_probabilities_match_amplitudes", worst, 1e-9)};
  return t;
}

// ---------------------------------------------------------------------------
// repeated_measurement

Observable random_observable(Index dim, std::mt19937_64& rng) {
  return spectral_decompose(random_hermitian(dim, rng));
}

double off_diagonal_mass(const OutcomeDistribution& joint) {
  double mass = 0.0;
  for (const Outcome& o : joint.entries()) {
    if (o.label.at(0) != o.label.at(1)) mass += o.probability;
  }
  return mass;
}

ResultTable repeated_measurement(const ScenarioConfig& cfg) {
  const Index dim = cfg.integer_param("dim");
  const Index trials = cfg.integer_param("trials");
  std::mt19937_64 rng(cfg.seed);

  ResultTable t;
  t.columns = {{"trial", ""}, {"tv_modeled_born", ""}, {"offdiag_nondisturbing", ""}};
  double worst_tv = 0.0;
  double worst_offdiag = 0.0;
  for (Index k = 0; k < trials; ++k) {
    const PureState psi = random_state(dim, rng);
    const Observable obs = random_observable(dim, rng);
    std::vector<PureState> post;
    for (Index i = 0; i < dim; ++i) post.push_back(random_state(dim, rng));
    const MeasurementModel disturbing = build_measurement_unitary({obs, 0, 0, post});
    const double tv = total_variation(modeled_single_measurement(psi, disturbing), born_distribution(psi, obs));

    const MeasurementModel gentle = build_measurement_unitary({obs, 0, 0, {}});
    const double offdiag = off_diagonal_mass(repeated_measurement_joint(psi, gentle));
    t.rows.push_back({static_cast<double>(k), tv, offdiag});
    worst_tv = std::max(worst_tv, tv);
    worst_offdiag = std::max(worst_offdiag, offdiag);
  }

  // Spin-z measurement that leaves the system in |+x> or |-x>.
  const std::array<double, 2> z_values{1.0, -1.0};
  const Observable sz = Observable::diagonal(z_values);
  Vector plus_x(2);
  plus_x << 1.0, 1.0;
  Vector minus_x(2);
  minus_x << 1.0, -1.0;
  const MeasurementModel flip = build_measurement_unitary({sz, 0, 0, {PureState(plus_x), PureState(minus_x)}});
  const PureState qubit = random_state(2, rng);
  const double mismatch =
      total_variation(repeated_measurement_joint(qubit, flip), collapse_rule_joint(qubit, sz));

  t.assertions = {at_most("modeled_matches_born", worst_tv, 1e-10),
                  at_most("nondisturbing_offdiagonal_mass", worst_offdiag, 1e-10),
                  at_most("disturbing_mismatch_is_half", std::abs(mismatch - 0.5), 1e-9)};
  return t;
}

// ---------------------------------------------------------------------------
// zeno_decay

ResultTable zeno_decay(const ScenarioConfig& cfg) {
  const double tau = cfg.param("tau");
  const DecayModel model = build_decay_model(tau, cfg.integer_param("n_modes"), cfg.param("bandwidth"));
  const double horizon = cfg.param("horizon");
  const double t0 = model.correlation_time();

  ResultTable t;
  t.columns = {{"interval", "time"}, {"cycles", ""}, {"survival", ""}};
  const std::array<double, 5> intervals{tau / 4.0, tau / 16.0, tau / 64.0, t0 / 10.0, t0 / 50.0};
  bool monotone = true;
  double previous = 0.0;
  double worst_drop = 0.0;
  for (double delta : intervals) {
    const double s = iterated_projection_survival(model, delta, horizon);
    t.rows.push_back({delta, static_cast<double>(projection_cycles(delta, horizon)), s});
    if (s < previous) {
      monotone = false;
      worst_drop = std::max(worst_drop, previous - s);
    }
    previous = s;
  }

  const Index points = cfg.integer_param("decay_points");
  double worst_rel = 0.0;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (Index k = 0; k < points; ++k) {
    const double time = tau * (0.2 + 2.8 * static_cast<double>(k) / static_cast<double>(points - 1));
    const double s = survival_probability(model, time);
    const double law = std::exp(-time / tau);
    worst_rel = std::max(worst_rel, std::abs(s - law) / law);
    const double y = std::log(s);
    sx += time;
    sy += y;
    sxx += time * time;
    sxy += time * y;
  }
  const double n = static_cast<double>(points);
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);

  t.assertions = {{"survival_monotone_in_interval", monotone, worst_drop, 0.0},
                  above("survival_at_finest_interval", previous, 0.9),
                  at_most("exponential_law_relative_error", worst_rel, 0.03),
                  at_most("exponential_fit_slope_error", std::abs(slope * tau + 1.0), 0.03)};
  return t;
}

// ---------------------------------------------------------------------------
// zeno_rabi

ResultTable zeno_rabi(const ScenarioConfig& cfg) {
  const double theta = cfg.param("theta");
  const Index n_max = std::max(cfg.integer_param("n_max"), cfg.integer_param("n_projections"));
  ResultTable t;
  t.columns = {{"n_projections", ""}, {"survival", ""}, {"closed_form", ""}, {"abs_error", ""}};
  double worst = 0.0;
  bool monotone = true;
  double previous = 0.0;
  for (Index n = 1; n <= n_max; ++n) {
    const double s = rabi_zeno(theta, static_cast<int>(n));
    const double closed = std::pow(std::cos(theta / (2.0 * static_cast<double>(n))), 2.0 * static_cast<double>(n));
    t.rows.push_back({static_cast<double>(n), s, closed, std::abs(s - closed)});
    worst = std::max(worst, std::abs(s - closed));
    if (n >= 3 && s < previous - 1e-12) monotone = false;
    previous = s;
  }
  const Index pick = cfg.integer_param("n_projections");
  const auto& row = t.rows[static_cast<std::size_t>(pick - 1)];
  t.assertions = {at_most("simulation_matches_closed_form", worst, 1e-9),
                  at_most("requested_n_matches_closed_form", row[3], 1e-9)};
  if (theta == pi) t.assertions.push_back({"survival_monotone_for_n_ge_2", monotone, previous, 0.0});
  return t;
}

// ---------------------------------------------------------------------------
// wavepacket_spread

ResultTable wavepacket_spread(const ScenarioConfig& cfg) {
  const Index n = cfg.integer_param("grid_points");
  if (n % 2 != 0) range_error("grid_points", "must be even");
  const GridSpace g(n, cfg.param("box_length"));
  const double width = cfg.param("width");
  const double mass = cfg.param("mass");
  const PureState psi0 = gaussian_packet(g, 0.0, 0.0, width);
  const Hamiltonian h = free_hamiltonian(g, mass);

  // Stop once +-3 sigma_x covers a quarter of the box.
  const double final_width = std::sqrt(2.0) * g.box_length() / 24.0;
  if (!(final_width > width)) range_error("box_length", "box too small for any spreading");
  const double t_end = mass * width * width * std::sqrt(std::pow(final_width / width, 2) - 1.0);
  const Index steps = cfg.integer_param("time_steps");

  ResultTable t;
  t.columns = {{"t", "time"}, {"width_numeric", "length"}, {"width_law", "length"}, {"rel_error", ""}};
  double worst = 0.0;
  for (Index k = 0; k <= steps; ++k) {
    const double time = t_end * static_cast<double>(k) / static_cast<double>(steps);
    const double numeric = std::sqrt(2.0) * position_moments(g, evolve(h, psi0, time)).stddev;
    const double law = width * std::sqrt(1.0 + std::pow(time / (mass * width * width), 2));
    const double rel = std::abs(numeric - law) / law;
    t.rows.push_back({time, numeric, law, rel});
    worst = std::max(worst, rel);
  }
  const double product = position_moments(g, psi0).stddev * momentum_moments(g, psi0).stddev;
  t.assertions = {at_most("spreading_law_relative_error", worst, 0.02),
                  at_most("uncertainty_product_relative_error", std::abs(product - 0.5) / 0.5, 0.02)};
  return t;
}

// ---------------------------------------------------------------------------
// delocalization

IndexWindow centred_window(const GridSpace& g, double halfwidth) {
  Index first = g.size();
  Index last = 0;
  for (Index j = 0; j < g.size(); ++j) {
    if (std::abs(g.position(j)) < halfwidth) {
      first = std::min(first, j);
      last = j + 1;
    }
  }
  return {first, last};
}

ResultTable delocalization(const ScenarioConfig& cfg) {
  const Index n = cfg.integer_param("grid_points");
  if (n % 2 != 0) range_error("grid_points", "must be even");
  const GridSpace g(n, cfg.param("box_length"));
  const double width = cfg.param("width");
  const double mass = cfg.param("mass");
  const IndexWindow window = centred_window(g, cfg.param("window_halfwidth") * width);
  if (window.size() <= 0 || window.size() >= n) {
    range_error("window_halfwidth", "support window must be a nonempty proper part of the grid");
  }
  const PureState psi0 = truncated_gaussian(g, window, 0.0, width);
  const Hamiltonian h = free_hamiltonian(g, mass);

  ResultTable t;
  t.columns = {{"eps", "m L^2"}, {"time", "time"}, {"outside_probability", ""}};
  double smallest = 1.0;
  for (Index d = 1; d <= cfg.integer_param("decades"); ++d) {
    const double eps = std::pow(10.0, -static_cast<double>(d));
    const double time = eps * mass * width * width;
    const double outside = delocalization_demo(g, h, psi0, window, time);
    t.rows.push_back({eps, time, outside});
    smallest = std::min(smallest, outside);
  }
  const double min_amplitude = momentum_amplitudes(g, psi0).cwiseAbs().minCoeff();
  t.assertions = {above("outside_probability_positive", smallest, 1e-12),
                  above("momentum_amplitudes_nonzero", min_amplitude, 1e-300)};
  return t;
}

// ---------------------------------------------------------------------------
// two_slit

ResultTable two_slit(const ScenarioConfig& cfg) {
  TwoSlitSetup setup;
  setup.grid_points = cfg.integer_param("grid_points");
  setup.box_length = cfg.param("box_length");
  setup.mass = cfg.param("mass");
  setup.separation = cfg.param("separation");
  setup.width = cfg.param("width");
  setup.screen_time = cfg.param("screen_time");
  setup.screen_cells = cfg.integer_param("screen_cells");
  const double eps = cfg.param("eps");
  if (setup.grid_points % setup.screen_cells != 0) range_error("screen_cells", "must divide grid_points");

  const TwoSlitPattern bare = two_slit_pattern(setup, eps);
  setup.which_way = true;
  const TwoSlitPattern marked = two_slit_pattern(setup, eps);

  ResultTable t;
  t.columns = {{"cell", ""}, {"p1", ""}, {"p2", ""}, {"p_joint", ""}, {"interference", ""},
               {"p_joint_which_way", ""}};
  double worst_additivity = 0.0;
  for (std::size_t x = 0; x < bare.p1.size(); ++x) {
    t.rows.push_back({static_cast<double>(x), bare.p1[x], bare.p2[x], bare.joint[x], bare.interference[x],
                      marked.joint[x]});
    worst_additivity = std::max(worst_additivity, std::abs(marked.interference[x]));
  }
  t.assertions = {above("interference_visible", bare.max_interference, 0.05),
                  at_most("which_way_consistency_ratio", marked.consistency.worst_ratio, eps),
                  at_most("which_way_additivity", worst_additivity, 2.0 * eps)};
  return t;
}

// ---------------------------------------------------------------------------
// phase_space_povm

ResultTable phase_space_povm(const ScenarioConfig& cfg) {
  const Index n = cfg.integer_param("grid_points");
  if (n % 2 != 0) range_error("grid_points", "must be even");
  const GridSpace g(n, cfg.param("box_length"));
  const Index pc = cfg.integer_param("position_cells");
  const PhaseSpacePovm ps =
      build_phase_space_povm(g, cfg.param("width"), cfg.integer_param("momentum_cells"), pc);
  const PureState psi = gaussian_packet(g, g.box_length() / 8.0, 1.0, cfg.param("state_width"));
  const OutcomeDistribution dist = povm_distribution(psi, ps.povm);

  std::vector<double> marginal(static_cast<std::size_t>(pc), 0.0);
  for (const Outcome& o : dist.entries()) marginal[static_cast<std::size_t>(o.label.at(1))] += o.probability;
  const Index stride = n / pc;

  ResultTable t;
  t.columns = {{"q", "length"}, {"povm_marginal", ""}, {"sharp", ""}};
  for (Index b = 0; b < pc; ++b) {
    const double sharp = std::norm(psi[b * stride]) * static_cast<double>(stride);
    t.rows.push_back({ps.positions[static_cast<std::size_t>(b)], marginal[static_cast<std::size_t>(b)], sharp});
  }
  t.assertions = {at_most("completeness_deficit", ps.completeness_deficit, 1e-6),
                  at_most("total_probability_error", std::abs(dist.total() - 1.0), 1e-9)};
  return t;
}

// ---------------------------------------------------------------------------
// fuzzy_povm

ResultTable fuzzy_povm(const ScenarioConfig& cfg) {
  const Index dim = cfg.integer_param("dim");
  const double spread = cfg.param("spread");
  std::mt19937_64 rng(cfg.seed);
  const Observable obs = random_observable(dim, rng);
  const PureState psi = random_state(dim, rng);
  const Index n_out = static_cast<Index>(obs.size());

  Eigen::MatrixXd smear = Eigen::MatrixXd::Zero(n_out, n_out);
  for (Index i = 0; i < n_out; ++i) {
    const Index lo = std::max<Index>(i - 1, 0);
    const Index hi = std::min<Index>(i + 1, n_out - 1);
    smear(i, i) = 1.0;
    if (lo != i) {
      smear(lo, i) += spread;
      smear(i, i) -= spread;
    }
    if (hi != i) {
      smear(hi, i) += spread;
      smear(i, i) -= spread;
    }
  }
  const OutcomeDistribution sharp = born_distribution(psi, obs);
  const OutcomeDistribution delta = povm_distribution(psi, build_fuzzy_povm(obs, Eigen::MatrixXd::Identity(n_out, n_out)));
  const OutcomeDistribution blurred = povm_distribution(psi, build_fuzzy_povm(obs, smear));

  ResultTable t;
  t.columns = {{"outcome", ""}, {"eigenvalue", ""}, {"sharp", ""}, {"delta_smeared", ""}, {"smeared", ""}};
  double tv = 0.0;
  for (Index k = 0; k < n_out; ++k) {
    const std::size_t i = static_cast<std::size_t>(k);
    tv += 0.5 * std::abs(sharp[i].probability - delta[i].probability);
    t.rows.push_back({static_cast<double>(k), obs.eigenvalue(i), sharp[i].probability, delta[i].probability,
                      blurred[i].probability});
  }
  t.assertions = {at_most("delta_smearing_matches_sharp", tv, 1e-12),
                  at_most("smeared_total_probability_error", std::abs(blurred.total() - 1.0), 1e-10)};
  return t;
}

// ---------------------------------------------------------------------------
// hegerfeldt_scan

ResultTable hegerfeldt_scan(const ScenarioConfig& cfg) {
  const Index dim = cfg.integer_param("dim");
  const Index rank = cfg.integer_param("rank");
  if (rank >= dim) range_error("rank", "must be smaller than dim");
  const Index points = cfg.integer_param("points");
  const double t_max = cfg.param("t_max");
  std::vector<double> times(static_cast<std::size_t>(points));
  for (Index k = 0; k < points; ++k) {
    times[static_cast<std::size_t>(k)] = t_max * static_cast<double>(k) / static_cast<double>(points - 1);
  }
  const double dt = times[1] - times[0];
  std::mt19937_64 rng(cfg.seed);

  const Hamiltonian h(random_hermitian(dim, rng));
  const LinearOperator proj = random_projector(dim, rank, rng);
  const PureState psi = random_state(dim, rng);
  const IndefinitenessScan generic = indefiniteness_scan(h, psi, proj, times);

  Matrix sx(2, 2);
  sx << 0.0, 1.0, 1.0, 0.0;
  const Hamiltonian rabi(LinearOperator(0.5 * sx));  // Omega = 1
  const LinearOperator excited = LinearOperator::projector_onto(PureState::basis(2, 1));
  const IndefinitenessScan oscillation = indefiniteness_scan(rabi, PureState::basis(2, 0), excited, times);
  double worst_zero = 0.0;
  const std::size_t expected_zeros = static_cast<std::size_t>(std::floor(t_max / (2.0 * pi))) + 1;
  for (double z : oscillation.zero_times) {
    const double n = std::round(z / (2.0 * pi));
    worst_zero = std::max(worst_zero, std::abs(z - 2.0 * pi * n));
  }
  const bool rabi_ok = oscillation.classification == ScanClass::kIsolatedZeros &&
                       oscillation.zero_times.size() == expected_zeros && worst_zero <= dt;

  RealVector energies(dim);
  for (Index k = 0; k < dim; ++k) energies[k] = static_cast<double>(k) + 0.5;
  const Hamiltonian diagonal_h(LinearOperator(Matrix(energies.cast<Complex>().asDiagonal())));
  Matrix upper = Matrix::Zero(dim, dim);
  for (Index k = dim - rank; k < dim; ++k) upper(k, k) = 1.0;
  Vector lower = Vector::Zero(dim);
  for (Index k = 0; k < dim - rank; ++k) lower[k] = 1.0;
  const IndefinitenessScan frozen =
      indefiniteness_scan(diagonal_h, PureState(lower), LinearOperator(upper), times);

  const Observable generic_obs = random_observable(dim, rng);
  const std::vector<bool> invariant = invariant_subspace_check(h, generic_obs);
  const bool none_invariant = std::none_of(invariant.begin(), invariant.end(), [](bool b) { return b; });
  std::vector<double> sample_times;
  for (std::size_t k = 0; k < times.size(); k += 10) sample_times.push_back(times[k]);
  const double fraction = complete_indefiniteness_fraction(h, generic_obs, sample_times, 20, cfg.seed + 1);

  ResultTable t;
  t.columns = {{"t", "time"}, {"random_series", ""}, {"rabi_series", ""}};
  for (std::size_t k = 0; k < times.size(); ++k) {
    t.rows.push_back({times[k], generic.series[k], oscillation.series[k]});
  }
  t.assertions = {{"random_system_never_zero", generic.classification == ScanClass::kNeverZero,
                   generic.min_value, kNumericalZero},
                  {"rabi_isolated_zeros_at_2pi_n", rabi_ok, worst_zero, dt},
                  {"commuting_case_identically_zero", frozen.classification == ScanClass::kIdenticallyZero,
                   frozen.min_value, kNumericalZero},
                  {"generic_observable_has_no_invariant_eigenspace", none_invariant,
                   static_cast<double>(std::count(invariant.begin(), invariant.end(), true)), 0.0},
                  {"complete_indefiniteness_fraction", fraction >= 0.99, fraction, 0.99}};
  return t;
}

using Runner = std::function<ResultTable(const ScenarioConfig&)>;

const std::map<std::string, Runner>& runners() {
  static const std::map<std::string, Runner> table{
      {"stern_gerlach", stern_gerlach},       {"repeated_measurement", repeated_measurement},
      {"zeno_decay", zeno_decay},             {"zeno_rabi", zeno_rabi},
      {"wavepacket_spread", wavepacket_spread}, {"delocalization", delocalization},
      {"two_slit", two_slit},                 {"phase_space_povm", phase_space_povm},
      {"fuzzy_povm", fuzzy_povm},             {"hegerfeldt_scan", hegerfeldt_scan},
  };
  return table;
}

nlohmann::json sidecar_object(const ResultTable& table) {
  nlohmann::json j;
  j["scenario"] = table.scenario;
  j["version"] = table.version;
  j["seed"] = table.seed;
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(table.config_hash));
  j["config_hash"] = hash;
  j["params"] = nlohmann::json::parse(table.params_json);
  nlohmann::json assertions = nlohmann::json::array();
  for (const Assertion& a : table.assertions) {
    assertions.push_back({{"name", a.name}, {"pass", a.pass}, {"value", a.value}, {"tolerance", a.tolerance}});
  }
  j["assertions"] = std::move(assertions);
  return j;
}

}  // namespace

bool ResultTable::all_pass() const {
  return std::all_of(assertions.begin(), assertions.end(), [](const Assertion& a) { return a.pass; });
}

ResultTable run_scenario(const ScenarioConfig& cfg) {
  check_ranges(cfg);
  const auto it = runners().find(cfg.scenario);
  if (it == runners().end()) find_scenario(cfg.scenario);  // throws with the valid names

  ResultTable table;
  try {
    table = it->second(cfg);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw Error(e.code(), "scenario " + cfg.scenario + ": " + e.what());
  }
  table.scenario = cfg.scenario;
  table.seed = cfg.seed;
  table.version = QMT_VERSION;
  table.params_json = nlohmann::json(cfg.params).dump();
  table.config_hash = fnv1a(canonical_config(cfg));
  return table;
}

std::string to_csv(const ResultTable& table) {
  std::ostringstream os;
  for (std::size_t c = 0; c < table.columns.size(); ++c) os << (c ? "," : "") << table.columns[c].name;
  os << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << format_number(row[c]);
    os << '\n';
  }
  return os.str();
}

std::string sidecar_json(const ResultTable& table) { return sidecar_object(table).dump(2) + "\n"; }

std::string to_json(const ResultTable& table) {
  nlohmann::json j = sidecar_object(table);
  nlohmann::json columns = nlohmann::json::array();
  for (const Column& c : table.columns) columns.push_back({{"name", c.name}, {"unit", c.unit}});
  j["columns"] = std::move(columns);
  j["rows"] = table.rows;
  return j.dump(2) + "\n";
}

SternGerlachStages stern_gerlach_pipeline(const SternGerlachSetup& setup, std::span<const double> thetas) {
  const GridSpace g(setup.grid_points, setup.box_length);
  const double exact_steps = setup.deflection / g.dx();
  const Index s = static_cast<Index>(std::llround(exact_steps));
  if (std::abs(exact_steps - static_cast<double>(s)) > 1e-9 || s <= 0 || 4 * s >= g.size()) {
    throw ConfigError({{"params.deflection", ErrorCode::kRangeError,
                        "must be a positive whole number of grid steps below box/4"}});
  }
  const Index n = g.size();
  const PureState phi0 = gaussian_packet(g, 0.0, 0.0, setup.width);

  Matrix up(2, 2), down(2, 2);
  up << 1.0, 0.0, 0.0, 0.0;
  down << 0.0, 0.0, 0.0, 1.0;
  const Matrix magnet = Eigen::kroneckerProduct(up, cyclic_shift(n, s)).eval() +
                        Eigen::kroneckerProduct(down, cyclic_shift(n, -s)).eval();

  const DensityOperator furnace =
      tensor_product(DensityOperator(0.5 * Matrix::Identity(2, 2)), DensityOperator::pure(phi0));
  const DensityOperator split(magnet * furnace.matrix() * magnet.adjoint());

  const Vector phi_plus = cyclic_shift(n, s) * phi0.amplitudes();
  const Vector phi_minus = cyclic_shift(n, -s) * phi0.amplitudes();
  const Matrix expected = 0.5 * (Eigen::kroneckerProduct(up, (phi_plus * phi_plus.adjoint()).eval()).eval() +
                                 Eigen::kroneckerProduct(down, (phi_minus * phi_minus.adjoint()).eval()).eval());
  const double structure_error = (split.matrix() - expected).cwiseAbs().maxCoeff();

  // Keep the upper beam and renormalize.
  const Matrix keep = Eigen::kroneckerProduct(Matrix::Identity(2, 2), region_matrix(g, n / 2, n)).eval();
  Matrix kept = keep * split.matrix() * keep;
  const double survived = kept.trace().real();
  if (!(survived > 1e-12)) {
    throw Error(ErrorCode::kImpossibleOutcome, "upper beam carries no weight");
  }
  kept /= survived;
  const Eigensystem es = hermitian_eigensystem(LinearOperator(kept));
  const PureState conditioned(es.vectors.col(es.values.size() - 1));
  const Vector target = Eigen::kroneckerProduct(PureState::basis(2, 0).amplitudes(), phi_plus).eval();
  const double fidelity = std::norm(target.dot(conditioned.amplitudes()));

  // +z ends at 2 * deflection, -z back at 0; the screen splits halfway.
  std::vector<double> screen(static_cast<std::size_t>(2 * n));
  for (Index spin = 0; spin < 2; ++spin) {
    for (Index j = 0; j < n; ++j) screen[static_cast<std::size_t>(spin * n + j)] = j >= n / 2 + s ? 1.0 : -1.0;
  }
  const Observable beam = Observable::diagonal(screen);

  SternGerlachStages out{furnace, split, structure_error, conditioned, fidelity, {}, {}};
  for (double theta : thetas) {
    const double c = std::cos(theta / 2.0);
    const double sn = std::sin(theta / 2.0);
    // R_y(theta) on the spin factor.
    Vector rotated(2 * n);
    rotated.head(n) = c * conditioned.amplitudes().head(n) - sn * conditioned.amplitudes().tail(n);
    rotated.tail(n) = sn * conditioned.amplitudes().head(n) + c * conditioned.amplitudes().tail(n);
    const OutcomeDistribution reading = born_distribution(PureState(magnet * rotated), beam);
    out.prob_plus.push_back(reading.probability({1.0}).value_or(0.0));
    out.prob_minus.push_back(reading.probability({-1.0}).value_or(0.0));
  }
  return out;
}

}  // namespace qmt
