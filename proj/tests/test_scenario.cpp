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
#include <sstream>

#include "doctest.h"
#include "hforge/scenario.hpp"
#include "json.hpp"

using namespace hforge;
using json = nlohmann::json;

namespace {
const char* kHadamard = R"({
  "kind": "scheme",
  "scheme": "lambda_resonant",
  "parameters": {"theta": 0.7853981633974483, "expected": "hadamard"}
})";

bool mentions(const std::vector<Diagnostic>& d, const std::string& text) {
  for (const auto& x : d)
    if (format_diagnostic(x).find(text) != std::string::npos) return true;
  return false;
}
}  // namespace

TEST_CASE("catalog lists every builder with its schema") {
  const json cat = json::parse(scheme_catalog());
  bool found = false;
  for (const auto& s : cat["schemes"])
    if (s["scheme"] == "lambda_resonant") {
      found = true;
      CHECK(s["parameters"][0]["name"] == "theta");
      CHECK(s["parameters"][0]["required"] == true);
    }
  CHECK(found);
  CHECK(cat["kinds"].size() == 7);
}

TEST_CASE("validate accepts a good config and rejects bad ones") {
  CHECK(validate_config(kHadamard).empty());
  const auto missing = validate_config(R"({"kind": "scheme", "scheme": "lambda_resonant", "parameters": {}})");
  CHECK(mentions(missing, "theta"));
  const auto neg = validate_config(
      R"({"kind": "scheme", "scheme": "lambda_resonant", "parameters": {"theta": 1, "duration": -2}})");
  CHECK(mentions(neg, "parameters.duration"));
  const auto unknown = validate_config(R"({"kind": "scheme", "scheme": "lambda_resonant",
      "parameters": {"theta": 1}, "colour": 3})");
  CHECK(mentions(unknown, "colour"));
  CHECK(unknown[0].line == 2);
  const auto broken = validate_config("{\n\"kind\": ");
  REQUIRE(broken.size() == 1);
  CHECK(broken[0].line == 2);
  CHECK(mentions(validate_config(R"({"kind": "teleport"})"), "kind"));
}

TEST_CASE("running the Hadamard config") {
  const RunResult r = run_config(kHadamard);
  REQUIRE(r.exit_code == kExitOk);
  const json rep = json::parse(r.report);
  CHECK(rep["passed"] == true);
  CHECK(rep["results"]["gate_error"].get<double>() < 1e-8);
  CHECK(rep["results"]["max_K_norm"].get<double>() < 1e-8);
  // Complex entries are [re, im] pairs.
  CHECK(rep["results"]["gate"][0][0].size() == 2);
  CHECK(rep.contains("units"));
  CHECK(rep["tolerances"]["holonomy"] == 1e-8);
  for (const auto& a : rep["assertions"]) CHECK(a.contains("tolerance"));
}

TEST_CASE("failing assertions return exit code 2") {
  const RunResult r = run_config(R"({"kind": "scheme", "scheme": "lambda_resonant",
      "parameters": {"theta": 0.3}, "assertions": [{"quantity": "gate_error", "max": -1}]})");
  CHECK(r.exit_code == kExitAssertion);
  CHECK(json::parse(r.report)["passed"] == false);
}

TEST_CASE("library errors and bad overrides return exit code 1") {
  const RunResult r = run_config(R"({"kind": "scheme", "scheme": "four_level",
      "parameters": {"s": [[1.4142135623730951, 0], [0, 1]], "area": 3.14159}})");
  CHECK(r.exit_code == kExitUsage);
  CHECK(mentions(r.diagnostics, "CommensurabilityError"));
  RunOptions o;
  o.tol_overrides = {{"holonomy", -1.0}};
  CHECK(run_config(kHadamard, o).exit_code == kExitUsage);
}

TEST_CASE("tolerance overrides are echoed") {
  RunOptions o;
  o.tol_overrides = {{"holonomy", 1e-6}};
  const json rep = json::parse(run_config(kHadamard, o).report);
  CHECK(rep["tolerances"]["holonomy"] == 1e-6);
}

TEST_CASE("sweep output is complete and byte-identical across thread counts") {
  const char* cfg = R"({"kind": "sweep", "parameters": {
      "delta1": {"min": -0.02, "max": 0.02, "count": 5},
      "delta2": {"min": -0.001, "max": 0.001, "count": 4}}})";
  RunOptions one, four;
  four.threads = 4;
  const RunResult a = run_config(cfg, one), b = run_config(cfg, four);
  REQUIRE(a.exit_code == kExitOk);
  CHECK(a.csv == b.csv);
  CHECK(a.report == b.report);
  std::istringstream in(a.csv);
  std::string line;
  int rows = -1;
  std::getline(in, line);
  CHECK(line == "delta1,delta2,fidelity");
  while (std::getline(in, line)) ++rows;
  CHECK(rows + 1 == 20);
}

TEST_CASE("thread resolution") {
  CHECK(resolve_threads(3) == 3);
  setenv("HFORGE_THREADS", "5", 1);
  CHECK(resolve_threads(std::nullopt) == 5);
  unsetenv("HFORGE_THREADS");
  CHECK(resolve_threads(std::nullopt) == 1);
}
