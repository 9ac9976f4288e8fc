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

// qmtsim: run, list and validate scenario configs.
//
// Exit codes: 0 all assertions pass, 1 some assertion failed, 2 bad config or
// usage, 3 the run itself raised an error.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "qmt/config.hpp"
#include "qmt/scenarios.hpp"

namespace {

constexpr int kExitFailedAssertion = 1;
constexpr int kExitBadConfig = 2;
constexpr int kExitRunError = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw qmt::Error(qmt::ErrorCode::kParseError, "cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw qmt::Error(qmt::ErrorCode::kInvalidArgument, "cannot write " + path.string());
  out << text;
}

void print_violations(const qmt::Error& e) {
  std::cerr << "error [" << qmt::to_string(e.code()) << "]: " << e.what() << '\n';
}

int list_scenarios() {
  for (const qmt::ScenarioDoc& doc : qmt::scenario_catalog()) {
    std::cout << doc.name << "\n    " << doc.description << '\n';
    for (const qmt::ParamDoc& p : doc.params) {
      std::cout << "    " << p.name << " = " << p.default_value << (p.integer ? " (integer)" : "") << "  "
                << p.description << '\n';
    }
  }
  return 0;
}

int validate(const std::string& path) {
  try {
    const qmt::ScenarioConfig cfg = qmt::validate_config(read_file(path));
    std::cout << "ok " << cfg.scenario << ' ' << qmt::canonical_config(cfg) << '\n';
    return 0;
  } catch (const qmt::Error& e) {
    print_violations(e);
    return kExitBadConfig;
  }
}

int run(const std::string& path, std::optional<std::uint64_t> seed, const std::string& out_dir,
        const std::string& format) {
  qmt::ScenarioConfig cfg;
  try {
    cfg = qmt::validate_config(read_file(path));
  } catch (const qmt::Error& e) {
    print_violations(e);
    return kExitBadConfig;
  }
  if (seed) cfg.seed = *seed;
  if (format == "csv") cfg.format = qmt::OutputFormat::kCsv;
  if (format == "json") cfg.format = qmt::OutputFormat::kJson;

  qmt::ResultTable table;
  try {
    table = qmt::run_scenario(cfg);
  } catch (const qmt::ConfigError& e) {
    print_violations(e);
    return kExitBadConfig;
  } catch (const qmt::Error& e) {
    print_violations(e);
    return kExitRunError;
  }

  try {
    const std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    if (cfg.format == qmt::OutputFormat::kCsv) {
      write_file(dir / (cfg.scenario + ".csv"), qmt::to_csv(table));
      write_file(dir / (cfg.scenario + ".json"), qmt::sidecar_json(table));
    } else {
      write_file(dir / (cfg.scenario + ".json"), qmt::to_json(table));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRunError;
  }

  for (const qmt::Assertion& a : table.assertions) {
    std::printf("%s %s %s value=%.6g tolerance=%.6g\n", a.pass ? "PASS" : "FAIL", cfg.scenario.c_str(),
                a.name.c_str(), a.value, a.tolerance);
  }
  return table.all_pass() ? 0 : kExitFailedAssertion;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Batch runner for the qmt measurement scenarios"};
  app.set_version_flag("--version", QMT_VERSION);
  app.require_subcommand(1);

  CLI::App* list_cmd = app.add_subcommand("list", "List scenarios and their parameters");

  std::string validate_path;
  CLI::App* validate_cmd = app.add_subcommand("validate", "Check a config file and print it with defaults");
  validate_cmd->add_option("config", validate_path, "Config file")->required();

  std::string run_path;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  std::string format;
  CLI::App* run_cmd = app.add_subcommand("run", "Run the scenario described by a config file");
  run_cmd->add_option("config", run_path, "Config file")->required();
  CLI::Option* seed_opt = run_cmd->add_option("--seed", seed, "Override the config seed");
  run_cmd->add_option("--out-dir", out_dir, "Directory for the result files")->capture_default_str();
  run_cmd->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitBadConfig;
  }

  if (*list_cmd) return list_scenarios();
  if (*validate_cmd) return validate(validate_path);
  return run(run_path, *seed_opt ? std::optional<std::uint64_t>(seed) : std::nullopt, out_dir, format);
}
