// Copyright 2026 The spml Authors.
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

// Scenario files (JSON, schema_version 1) and the run report built from them.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spml/market.hpp"
#include "spml/oracle.hpp"

namespace spml {

inline constexpr int kScenarioSchemaVersion = 1;

struct ScenarioFile {
  int schema_version = kScenarioSchemaVersion;
  std::uint64_t seed = 0;
  Scenario scenario;
  /// When present, `run` also searches the focal agent's deviations.
  std::optional<StrategySpace> space;
  std::optional<AgentId> focal;
  PayoffModel model = PayoffModel::kBranchBelief;
};

/// Errors are kParse for malformed JSON and kValidation otherwise; the
/// message starts with the offending field path.
ScenarioFile parse_scenario_file(std::string_view text);
std::string scenario_file_json(const ScenarioFile& file);

struct AgentPayoff {
  AgentId agent;
  Distribution belief;
  /// Expectation of the realised per-outcome payment under `belief`.
  double expected_payment = 0.0;
};

struct RunReport {
  ScenarioFile input;
  Outcome outcome{1};
  std::string outcome_source;  ///< "override", "scenario" or "sampled"
  Ledger ledger;
  Settlement settlement;
  std::vector<AgentPayoff> payoffs;
  std::optional<VerificationReport> verification;
  std::size_t focal = 0;
};

/// Outcome precedence: override, the file's outcome, then a draw from the
/// file's nature distribution seeded by the file's seed.
RunReport run_scenario(const ScenarioFile& file, std::optional<Outcome> outcome_override = std::nullopt);

std::string run_report_json(const RunReport& report);

}  // namespace spml
