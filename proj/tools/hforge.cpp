// Copyright 2026 The hforge Authors
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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hforge/scenario.hpp"

namespace fs = std::filesystem;

namespace {

bool read_file(const std::string& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  out = ss.str();
  return true;
}

bool write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  out << text;
  return bool(out);
}

void print_diagnostics(const std::string& config, const std::vector<hforge::Diagnostic>& diags) {
  for (const auto& d : diags) std::cerr << config << ": " << hforge::format_diagnostic(d) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hforge: holonomic gate construction, verification and robust optimization"};
  app.set_version_flag("--version", hforge::version());
  app.require_subcommand(1);

  std::string config;
  std::string out;
  std::optional<int> threads;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> tol_overrides;

  auto* run = app.add_subcommand("run", "Run a scenario and write <stem>.report.json (and <stem>.csv for sweeps)");
  run->add_option("--config", config, "Scenario configuration (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out, "Output stem (default: config 'output' field, else the config file stem)");
  run->add_option("--threads", threads, "Worker threads (default: HFORGE_THREADS, else 1)")
      ->check(CLI::PositiveNumber);
  run->add_option("--seed", seed, "Seed overriding the config seed");
  run->add_option("--tol-override", tol_overrides, "Tolerance override key=value (repeatable)");

  auto* validate = app.add_subcommand("validate", "Check a configuration against the schema");
  validate->add_option("--config", config, "Scenario configuration (JSON)")->required()->check(CLI::ExistingFile);

  auto* list = app.add_subcommand("list", "Print the scheme catalog with parameter schemas (JSON)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : hforge::kExitUsage;
  }

  if (list->parsed()) {
    std::cout << hforge::scheme_catalog();
    return hforge::kExitOk;
  }

  std::string text;
  if (!read_file(config, text)) {
    std::cerr << config << ": cannot read file\n";
    return hforge::kExitUsage;
  }

  if (validate->parsed()) {
    const auto diags = hforge::validate_config(text);
    if (!diags.empty()) {
      print_diagnostics(config, diags);
      return hforge::kExitUsage;
    }
    std::cout << config << ": ok\n";
    return hforge::kExitOk;
  }

  hforge::RunOptions opts;
  opts.threads = hforge::resolve_threads(threads);
  opts.seed = seed;
  for (const std::string& kv : tol_overrides) {
    const auto eq = kv.find('=');
    char* end = nullptr;
    const double v = eq == std::string::npos ? 0.0 : std::strtod(kv.c_str() + eq + 1, &end);
    if (eq == std::string::npos || eq == 0 || !end || *end != '\0' || end == kv.c_str() + eq + 1) {
      std::cerr << "--tol-override: expected key=value, got '" << kv << "'\n";
      return hforge::kExitUsage;
    }
    opts.tol_overrides.emplace_back(kv.substr(0, eq), v);
  }

  const hforge::RunResult r = hforge::run_config(text, opts);
  if (r.exit_code == hforge::kExitUsage) {
    print_diagnostics(config, r.diagnostics);
    return r.exit_code;
  }

  fs::path stem = !out.empty() ? fs::path(out)
                  : !r.output_stem.empty() ? fs::path(r.output_stem)
                                           : fs::path(config).parent_path() / fs::path(config).stem();
  const fs::path report = stem.string() + ".report.json";
  if (!write_file(report, r.report)) {
    std::cerr << report.string() << ": cannot write\n";
    return hforge::kExitUsage;
  }
  std::cout << "wrote " << report.string() << "\n";
  if (!r.csv.empty()) {
    const fs::path csv = stem.string() + ".csv";
    if (!write_file(csv, r.csv)) {
      std::cerr << csv.string() << ": cannot write\n";
      return hforge::kExitUsage;
    }
    std::cout << "wrote " << csv.string() << "\n";
  }
  if (r.exit_code == hforge::kExitAssertion) std::cerr << "one or more assertions failed; see " << report.string() << "\n";
  return r.exit_code;
}
