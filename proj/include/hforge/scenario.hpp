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

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace hforge {

/// Scenario runner behind the command-line tool. Configurations and reports
/// are JSON documents passed as text so that the JSON library stays private.

struct Diagnostic {
  std::string path;     // dotted field path, e.g. "parameters.theta"
  int line = 0;         // 1-based line in the config text, 0 if unknown
  std::string message;
};
std::string format_diagnostic(const Diagnostic& d);

/// Checks a configuration against the published schema without running it.
std::vector<Diagnostic> validate_config(const std::string& text);

/// Catalog of every runnable builder with its parameter schema (JSON text).
std::string scheme_catalog();

struct RunOptions {
  int threads = 1;
  std::optional<std::uint64_t> seed;                         // overrides the config seed
  std::vector<std::pair<std::string, double>> tol_overrides;  // applied after the config
};

enum ExitCode { kExitOk = 0, kExitUsage = 1, kExitAssertion = 2 };

struct RunResult {
  int exit_code = kExitOk;
  std::vector<Diagnostic> diagnostics;  // non-empty on usage/config errors
  std::string report;                   // <stem>.report.json contents
  std::string csv;                      // <stem>.csv contents (sweeps only)
  std::string output_stem;              // the config's "output" field, if any
};

RunResult run_config(const std::string& text, const RunOptions& options = RunOptions());

/// Thread count from an explicit value, else HFORGE_THREADS, else 1.
int resolve_threads(std::optional<int> requested);

/// Library version string.
std::string version();

}  // namespace hforge
