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

#include "qmt/config.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <json.hpp>

namespace qmt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ParamDoc positive(std::string name, std::string description, double def) {
  return {std::move(name), std::move(description), def, 0.0, kInf, true, false};
}

ParamDoc integer(std::string name, std::string description, double def, double lo, double hi) {
  return {std::move(name), std::move(description), def, lo, hi, false, true};
}

std::vector<ScenarioDoc> build_catalog() {
  return {
      {"stern_gerlach",
       "Furnace state through a spin-controlled deflection, conditionalization on the upper beam, "
       "a spin rotation by theta and a second split. Rows: theta, Pr(+), Pr(-), cos^2, sin^2.",
       {integer("grid_points", "transverse grid size", 160, 64, 1024),
        positive("box_length", "transverse box length", 80.0),
        positive("width", "beam packet width", 1.6),
        positive("deflection", "displacement per magnet; must be a whole number of grid steps", 12.0),
        integer("theta_steps", "rotation angles theta = k pi / theta_steps, k = 0..theta_steps", 6, 1, 180)}},
      {"repeated_measurement",
       "Random states, observables and disturbance maps through the pointer-coupling model. "
       "Rows: trial, TV(modeled, Born), off-diagonal mass of the repeated non-disturbing joint.",
       {integer("dim", "system dimension", 3, 2, 8),
        integer("trials", "number of random triples", 100, 1, 10000)}},
      {"zeno_decay",
       "Quasi-continuum decay and iterated projection at intervals tau/4, tau/16, tau/64, t0/10, "
       "t0/50. Rows: interval, cycles, survival.",
       {positive("tau", "decay time", 1.0),
        positive("bandwidth", "band width W (W tau >= 20)", 40.0),
        integer("n_modes", "number of decay-product modes", 400, 200, 2000),
        positive("horizon", "total time T of the projection sweep", 1.0),
        integer("decay_points", "samples of the survival curve on [0.2 tau, 3 tau]", 57, 2, 1000)}},
      {"zeno_rabi",
       "Two-level Zeno reduction: N rotations by theta/N, each followed by projection. "
       "Rows: N, survival, cos^(2N)(theta/2N), |difference|.",
       {{"theta", "total rotation angle", std::numbers::pi, 0.0, 100.0, false, false},
        integer("n_projections", "N reported in the assertions", 10, 1, 100000),
        integer("n_max", "rows for N = 1..n_max", 64, 1, 10000)}},
      {"wavepacket_spread",
       "Free Gaussian on a grid until it spans a quarter of the box. Rows: t, evolved width, "
       "L sqrt(1 + (t / m L^2)^2), relative error.",
       {integer("grid_points", "grid size (even)", 1024, 64, 4096),
        positive("box_length", "box length", 100.0),
        positive("width", "initial width L", 1.0),
        positive("mass", "particle mass", 1.0),
        integer("time_steps", "number of sampled times", 40, 1, 1000)}},
      {"delocalization",
       "Compactly supported state under free evolution. Rows: eps, probability outside the "
       "support window at time eps * m L^2.",
       {integer("grid_points", "grid size (even)", 256, 64, 4096),
        positive("box_length", "box length", 40.0),
        positive("width", "Gaussian width L before truncation", 1.0),
        positive("mass", "particle mass", 1.0),
        positive("window_halfwidth", "support half-width in units of L", 3.0),
        integer("decades", "eps = 10^-1 .. 10^-decades", 4, 1, 8)}},
      {"two_slit",
       "Slit-then-screen histories with and without a which-way pointer. Rows: cell, P1, P2, "
       "P_joint, interference, P_joint with pointer.",
       {integer("grid_points", "grid size (even)", 128, 32, 512),
        positive("box_length", "box length", 40.0),
        positive("mass", "particle mass", 1.0),
        positive("separation", "packets at -separation and +separation", 2.5),
        positive("width", "packet width", 1.2),
        positive("screen_time", "time between slits and screen", 6.0),
        integer("screen_cells", "screen cells (divides grid_points)", 16, 1, 512),
        positive("eps", "consistency threshold", 1e-8)}},
      {"phase_space_povm",
       "Coherent-state phase-space POVM on a grid. Rows: position cell q, POVM position marginal, "
       "sharp position probability.",
       {integer("grid_points", "grid size (even)", 64, 8, 256),
        positive("box_length", "box length", 32.0),
        positive("width", "width of the cell states", 2.0),
        integer("momentum_cells", "momentum cells (divides grid_points)", 64, 1, 256),
        integer("position_cells", "position cells (divides grid_points)", 64, 1, 256),
        positive("state_width", "width of the measured Gaussian", 2.5)}},
      {"fuzzy_povm",
       "Smeared measurement of a random observable. Rows: outcome, sharp, delta-smeared, smeared.",
       {integer("dim", "system dimension", 4, 2, 16),
        {"spread", "probability of reporting a neighbouring outcome", 0.2, 0.0, 0.5, false, false}}},
      {"hegerfeldt_scan",
       "Zero sets of <psi(t)|P|psi(t)> for a random system, a Rabi oscillation and a commuting "
       "pair. Rows: t, random series, Rabi series.",
       {integer("dim", "dimension of the random system", 8, 2, 64),
        integer("rank", "rank of the random projector (< dim)", 3, 1, 63),
        integer("points", "time grid size", 2000, 1000, 100000),
        positive("t_max", "end of the time grid", 50.0)}},
  };
}

void check_value(const ParamDoc& doc, double v, const std::string& path,
                 std::vector<ConfigViolation>& out) {
  std::ostringstream os;
  if (!std::isfinite(v)) {
    os << "must be finite";
  } else if (doc.integer && v != std::floor(v)) {
    os << "must be an integer (got " << v << ")";
  } else if (doc.min_exclusive ? !(v > doc.min) : !(v >= doc.min)) {
    os << "must be " << (doc.min_exclusive ? "> " : ">= ") << doc.min << " (got " << v << ")";
  } else if (!(v <= doc.max)) {
    os << "must be <= " << doc.max << " (got " << v << ")";
  } else {
    return;
  }
  out.push_back({path, ErrorCode::kRangeError, os.str()});
}

std::string summarize(const std::vector<ConfigViolation>& violations) {
  std::ostringstream os;
  os << "invalid config:";
  for (const ConfigViolation& v : violations) os << "\n  " << v.path << ": " << v.message;
  return os.str();
}

ErrorCode overall_code(const std::vector<ConfigViolation>& violations) {
  const bool structural = std::any_of(violations.begin(), violations.end(),
                                      [](const ConfigViolation& v) { return v.code == ErrorCode::kParseError; });
  return structural ? ErrorCode::kParseError : ErrorCode::kRangeError;
}

}  // namespace

const std::vector<ScenarioDoc>& scenario_catalog() {
  static const std::vector<ScenarioDoc> catalog = build_catalog();
  return catalog;
}

const ScenarioDoc& find_scenario(std::string_view name) {
  for (const ScenarioDoc& doc : scenario_catalog()) {
    if (doc.name == name) return doc;
  }
  std::ostringstream os;
  os << "unknown scenario '" << name << "'; valid names:";
  for (const ScenarioDoc& doc : scenario_catalog()) os << ' ' << doc.name;
  throw Error(ErrorCode::kParseError, os.str());
}

double ScenarioConfig::param(const std::string& name) const {
  const auto it = params.find(name);
  if (it == params.end()) {
    throw Error(ErrorCode::kInvalidArgument, "no parameter '" + name + "' in scenario " + scenario);
  }
  return it->second;
}

Index ScenarioConfig::integer_param(const std::string& name) const {
  return static_cast<Index>(std::llround(param(name)));
}

ConfigError::ConfigError(std::vector<ConfigViolation> violations)
    : Error(overall_code(violations), summarize(violations)), violations_(std::move(violations)) {}

ScenarioConfig validate_config(std::string_view text) {
  using nlohmann::json;
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError({{"", ErrorCode::kParseError, e.what()}});
  }
  if (!root.is_object()) {
    throw ConfigError({{"", ErrorCode::kParseError, "config must be a JSON object"}});
  }

  std::vector<ConfigViolation> violations;
  ScenarioConfig cfg;
  const ScenarioDoc* doc = nullptr;

  for (const auto& [key, value] : root.items()) {
    if (key != "scenario" && key != "seed" && key != "format" && key != "params") {
      violations.push_back({key, ErrorCode::kParseError, "unknown key"});
    }
  }

  if (!root.contains("scenario")) {
    violations.push_back({"scenario", ErrorCode::kParseError, "missing"});
  } else if (!root["scenario"].is_string()) {
    violations.push_back({"scenario", ErrorCode::kParseError, "must be a string"});
  } else {
    cfg.scenario = root["scenario"].get<std::string>();
    try {
      doc = &find_scenario(cfg.scenario);
    } catch (const Error& e) {
      violations.push_back({"scenario", ErrorCode::kParseError, e.what()});
    }
  }

  if (root.contains("seed")) {
    const json& s = root["seed"];
    if (s.is_number_unsigned()) {
      cfg.seed = s.get<std::uint64_t>();
    } else if (s.is_number_integer()) {
      violations.push_back({"seed", ErrorCode::kRangeError, "must be nonnegative"});
    } else {
      violations.push_back({"seed", ErrorCode::kParseError, "must be an unsigned integer"});
    }
  }

  if (root.contains("format")) {
    const json& f = root["format"];
    if (f == "csv") {
      cfg.format = OutputFormat::kCsv;
    } else if (f == "json") {
      cfg.format = OutputFormat::kJson;
    } else {
      violations.push_back({"format", ErrorCode::kParseError, "must be \"csv\" or \"json\""});
    }
  }

  if (doc != nullptr) {
    for (const ParamDoc& p : doc->params) cfg.params[p.name] = p.default_value;
  }
  if (root.contains("params")) {
    const json& params = root["params"];
    if (!params.is_object()) {
      violations.push_back({"params", ErrorCode::kParseError, "must be an object"});
    } else if (doc != nullptr) {
      for (const auto& [key, value] : params.items()) {
        const std::string path = "params." + key;
        const auto it = std::find_if(doc->params.begin(), doc->params.end(),
                                     [&](const ParamDoc& p) { return p.name == key; });
        if (it == doc->params.end()) {
          violations.push_back({path, ErrorCode::kParseError, "unknown parameter for " + doc->name});
        } else if (!value.is_number()) {
          violations.push_back({path, ErrorCode::kParseError, "must be a number"});
        } else {
          const double v = value.get<double>();
          check_value(*it, v, path, violations);
          cfg.params[key] = v;
        }
      }
    }
  }

  if (!violations.empty()) throw ConfigError(std::move(violations));
  return cfg;
}

void check_ranges(const ScenarioConfig& cfg) {
  const ScenarioDoc& doc = find_scenario(cfg.scenario);
  std::vector<ConfigViolation> violations;
  for (const ParamDoc& p : doc.params) {
    const auto it = cfg.params.find(p.name);
    if (it == cfg.params.end()) {
      violations.push_back({"params." + p.name, ErrorCode::kParseError, "missing"});
    } else {
      check_value(p, it->second, "params." + p.name, violations);
    }
  }
  if (!violations.empty()) throw ConfigError(std::move(violations));
}

std::string canonical_config(const ScenarioConfig& cfg) {
  nlohmann::json j;
  j["scenario"] = cfg.scenario;
  j["seed"] = cfg.seed;
  j["params"] = cfg.params;
  return j.dump();
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace qmt
