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

// Desk-scale checks of the manipulability and truthfulness theorems.

#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "spml/oracle.hpp"

namespace spml {

enum class TheoremId { kT1, kT2, kT3, kT5, kT7, kT9, kT11 };

std::string_view to_string(TheoremId id);
TheoremId parse_theorem(std::string_view text);
/// T1-T3 claim a deviation exists; the rest claim truthfulness.
bool is_manipulability_claim(TheoremId id);

struct VerifyOptions {
  std::size_t trials = 100;
  std::uint64_t seed = 7;
  PayoffModel model = PayoffModel::kBranchBelief;
};

/// A scenario in which `deviation` and `truthful` were compared for `focal`.
struct Witness {
  std::string origin;  ///< "paper construction" or "random search"
  Scenario scenario;
  std::size_t focal = 0;
  Strategy truthful;
  double truthful_payoff = 0.0;
  Strategy deviation;
  double deviation_payoff = 0.0;
  /// Ledger produced when the focal agent follows `deviation`.
  Ledger ledger;
  std::vector<double> branch_margins;
};

struct Coverage {
  std::size_t outcomes = 0;
  StrategySpace space;
  std::size_t scenarios = 0;
};

struct TheoremSummary {
  TheoremId theorem = TheoremId::kT1;
  Protocol protocol = Protocol::kSrm;
  bool manipulability = false;
  bool passed = false;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  PayoffModel model = PayoffModel::kBranchBelief;
  std::vector<std::string> conditions;
  std::vector<Coverage> coverage;
  std::size_t max_agents = 0;
  std::uint64_t scenarios_checked = 0;
  std::uint64_t strategies_evaluated = 0;
  std::uint64_t violations = 0;
  double worst_margin = 0.0;
  /// The manipulation found (T1-T3) or the first counterexample (others).
  std::optional<Witness> witness;
};

/// Random scenario honouring the theorem's conditions. Agent 0 is the focal
/// agent and always reports truthfully at its scheduled slot.
Scenario random_scenario(TheoremId id, std::size_t outcomes, std::mt19937_64& rng);

/// Strategy spaces swept per outcome count.
std::vector<StrategySpace> sweep_spaces(TheoremId id, std::size_t outcomes);

TheoremSummary verify_theorem(TheoremId id, const VerifyOptions& options);

}  // namespace spml
