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
 * Batch runner: each scenario drives one or more library modules, returns a
 * table of results, and evaluates the assertions those modules promise.
 */
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qmt/config.hpp"
#include "qmt/hilbert.hpp"

namespace qmt {

struct Column {
  std::string name;
  std::string unit;
};

struct Assertion {
  std::string name;
  bool pass;
  double value;
  double tolerance;
};

struct ResultTable {
  std::string scenario;
  std::uint64_t config_hash;
  std::uint64_t seed;
  std::string version;
  std::string params_json;  ///< canonical JSON object of resolved parameters
  std::vector<Column> columns;
  std::vector<std::vector<double>> rows;
  std::vector<Assertion> assertions;

  bool all_pass() const;
};

/// Dispatches to the scenario named in `cfg`. Library errors are rethrown
/// with the scenario name prefixed.
ResultTable run_scenario(const ScenarioConfig& cfg);

/// Header line then one line per row; numbers printed with 17 significant
/// digits.
std::string to_csv(const ResultTable& table);
/// {scenario, version, seed, config_hash, params, assertions}.
std::string sidecar_json(const ResultTable& table);
/// Sidecar plus columns and rows.
std::string to_json(const ResultTable& table);

/// Spin-1/2 x 1-D grid realization of the two-stage beam-splitting
/// experiment.
struct SternGerlachSetup {
  Index grid_points = 160;
  double box_length = 80.0;
  double width = 1.6;
  double deflection = 12.0;  ///< must be a whole number of grid steps
};

struct SternGerlachStages {
  DensityOperator furnace;           ///< (1/2) I_spin x |phi0><phi0|
  DensityOperator split;             ///< after the first magnet
  double split_structure_error;      ///< max |split - (1/2)(P+ x phi+ + P- x phi-)|
  PureState conditioned;             ///< after keeping the upper beam
  double conditioned_fidelity;       ///< |<+z, phi+|conditioned>|^2
  /// Per rotation angle: upper and lower beam after the second magnet.
  std::vector<double> prob_plus;
  std::vector<double> prob_minus;
};

/// Runs the pipeline once per angle, rotating the spin by R_y(theta) between
/// the magnets so the final amplitudes are cos(theta/2) and sin(theta/2).
SternGerlachStages stern_gerlach_pipeline(const SternGerlachSetup& setup, std::span<const double> thetas);

}  // namespace qmt
