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
 * Scenario configuration: the catalog of runnable scenarios with their
 * parameter documentation, and validation of JSON config files.
 *
 * A config file looks like
 *
 *     {"scenario": "zeno_rabi", "seed": 7, "format": "csv",
 *      "params": {"theta": 3.14159, "n_projections": 10}}
 *
 * Only "scenario" is required. Missing parameters take their defaults.
 */
#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "qmt/error.hpp"
#include "qmt/hilbert.hpp"

namespace qmt {

struct ParamDoc {
  std::string name;
  std::string description;
  double default_value;
  double min = -std::numeric_limits<double>::infinity();
  double max = std::numeric_limits<double>::infinity();
  bool min_exclusive = false;
  bool integer = false;
};

struct ScenarioDoc {
  std::string name;
  std::string description;
  std::vector<ParamDoc> params;
};

/// Every built-in scenario, in a fixed order.
const std::vector<ScenarioDoc>& scenario_catalog();

/// Throws kParseError listing valid names if `name` is not in the catalog.
const ScenarioDoc& find_scenario(std::string_view name);

enum class OutputFormat { kCsv, kJson };

struct ScenarioConfig {
  std::string scenario;
  std::uint64_t seed = 0;
  OutputFormat format = OutputFormat::kCsv;
  /// Every documented parameter, defaults filled in.
  std::map<std::string, double> params;

  double param(const std::string& name) const;
  Index integer_param(const std::string& name) const;
};

struct ConfigViolation {
  std::string path;  ///< e.g. "params.tau"
  ErrorCode code;    ///< kParseError or kRangeError
  std::string message;
};

/// Carries every violation found, not only the first. code() is
/// kParseError if any violation is structural, kRangeError otherwise.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<ConfigViolation> violations);
  const std::vector<ConfigViolation>& violations() const { return violations_; }

 private:
  std::vector<ConfigViolation> violations_;
};

ScenarioConfig validate_config(std::string_view text);

/// Same checks applied to an already-built config (used after CLI overrides).
void check_ranges(const ScenarioConfig& cfg);

/// Canonical one-line JSON of (scenario, seed, params); hashed into results.
std::string canonical_config(const ScenarioConfig& cfg);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes);

}  // namespace qmt
