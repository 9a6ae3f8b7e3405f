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

// Brute-force strategy oracle: replays a scenario slot by slot, settles it,
// and enumerates a focal agent's deviations over a bounded strategy space.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "spml/beliefs.hpp"
#include "spml/distribution.hpp"
#include "spml/market.hpp"
#include "spml/scoring.hpp"

namespace spml {

struct Participation {
  std::size_t slot = 0;
  Distribution reported_final;
  /// Falls back to the agent's private signal when the protocol needs one.
  std::optional<Distribution> reported_private;
};

/// Up to K participations in strictly increasing slots.
struct Strategy {
  std::vector<Participation> participations;

  std::string to_string() const;
};

/// An agent in a scenario. Without a script the agent reports truthfully once,
/// at `scheduled_slot`. A script replaces that behaviour entirely.
struct ScenarioAgent {
  AgentType type;
  std::size_t scheduled_slot = 0;
  std::optional<Strategy> script;
};

struct Scenario {
  Protocol protocol = Protocol::kSrm;
  ScoringRuleSpec rule;
  Distribution initial_estimate = Distribution::uniform(2);
  std::vector<ScenarioAgent> agents;
  std::size_t slot_count = 0;
  std::optional<Distribution> nature;  ///< analysis only
  std::optional<Outcome> realized_outcome;

  void validate() const;
  std::size_t agent_index(const AgentId& id) const;
};

/// Result of replaying a scenario. `beliefs[k]` is the belief behind the k-th
/// participation (empty for scripted ones).
struct PlayResult {
  Ledger ledger;
  /// Parallel to `ledger`: the belief a truthful agent formed before that
  /// report; empty for the maker and scripted reports.
  std::vector<std::optional<Distribution>> beliefs;
};

PlayResult play(const Scenario& scenario);

/// The agent's final true belief, formed at its scheduled slot in the run
/// where it reports truthfully and everyone else behaves as specified.
Distribution true_belief(const Scenario& scenario, std::size_t agent);

/// One participation at the scheduled slot reporting the true belief (and the
/// private signal when the protocol takes one).
Strategy truthful_strategy(const Scenario& scenario, std::size_t agent);

/// How the focal agent values a settlement. kBranchBelief scores each payment
/// branch under the belief it answers to (final report under the true belief,
/// private report under the private signal) and takes the better branch.
/// kRealizedExpectation takes the expectation of the realised per-outcome
/// payment under the true belief.
enum class PayoffModel { kBranchBelief, kRealizedExpectation };

std::string_view to_string(PayoffModel model);
PayoffModel parse_payoff_model(std::string_view text);

struct StrategyValue {
  double payoff = 0.0;
  /// Per-branch expectations summed over the agent's settlement lines.
  std::vector<double> branches;
};

/// Expected payoff of `strategy` for agent `focal`. `belief` overrides the
/// focal agent's true belief when given.
StrategyValue evaluate_strategy(const Scenario& scenario, std::size_t focal, const Strategy& strategy,
                                PayoffModel model = PayoffModel::kBranchBelief,
                                const std::optional<Distribution>& belief = std::nullopt);

struct StrategySpace {
  double report_grid_step = 0.05;
  std::size_t max_participations = 1;
  bool allow_timing_choice = false;
  bool allow_false_private = false;
  /// Coarser grid for non-final participations; the report grid when unset.
  std::optional<double> bluff_grid_step;
  std::uint64_t cap = 10'000'000;

  void validate() const;
};

struct VerificationReport {
  Strategy truthful;
  double truthful_payoff = 0.0;
  Strategy best_deviation;
  double best_deviation_payoff = 0.0;
  double margin = 0.0;
  /// truthful minus best, per payment branch (SP has two).
  std::vector<double> branch_margins;
  bool truthful_is_best = true;
  std::uint64_t strategies_evaluated = 0;
};

inline constexpr double kOptimalitySlack = 1e-9;

/// Number of strategies best_response would evaluate.
std::uint64_t strategy_count(const Scenario& scenario, std::size_t focal, const StrategySpace& space);

/// Exhaustive search. Refuses with kLimit when the space exceeds the cap.
VerificationReport best_response(const Scenario& scenario, std::size_t focal, const StrategySpace& space,
                                 PayoffModel model = PayoffModel::kBranchBelief);

/// Scenario with `focal` replaced by the given script; used to dump
/// counterexample ledgers.
Scenario with_strategy(const Scenario& scenario, std::size_t focal, const Strategy& strategy);

}  // namespace spml
