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

#include "spml/oracle.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <sstream>
#include <utility>

#include "spml/error.hpp"

namespace spml {
namespace {

constexpr std::size_t kTruthfulMove = std::numeric_limits<std::size_t>::max();

// One scheduled move of a non-focal agent.
struct Move {
  std::size_t slot = 0;
  std::size_t agent = 0;
  std::size_t participation = kTruthfulMove;
};

std::vector<Move> moves_of(const Scenario& scenario, std::size_t agent) {
  const ScenarioAgent& a = scenario.agents[agent];
  std::vector<Move> out;
  if (!a.script) {
    out.push_back({a.scheduled_slot, agent, kTruthfulMove});
  } else {
    for (std::size_t k = 0; k < a.script->participations.size(); ++k) {
      out.push_back({a.script->participations[k].slot, agent, k});
    }
  }
  return out;
}

std::vector<Move> schedule_without(const Scenario& scenario, std::optional<std::size_t> skip) {
  std::vector<Move> all;
  for (std::size_t a = 0; a < scenario.agents.size(); ++a) {
    if (skip && *skip == a) continue;
    for (const Move& m : moves_of(scenario, a)) all.push_back(m);
  }
  std::sort(all.begin(), all.end(), [](const Move& x, const Move& y) { return x.slot < y.slot; });
  return all;
}

double expectation(const Distribution& belief, const std::vector<double>& values) {
  double total = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (belief[i] != 0.0) total += belief[i] * values[i];
  }
  return total;
}

// Replays a scenario with an optional focal agent following an arbitrary
// strategy. The other agents' schedule is computed once.
class Evaluator {
 public:
  Evaluator(const Scenario& scenario, std::optional<std::size_t> focal,
            PayoffModel model = PayoffModel::kBranchBelief, std::optional<Distribution> belief = std::nullopt)
      : scenario_(scenario),
        focal_(focal),
        model_(model),
        belief_(std::move(belief)),
        others_(schedule_without(scenario, focal)) {}

  void build(const Strategy& strategy, Ledger& ledger,
             std::vector<std::optional<Distribution>>* beliefs = nullptr) const {
    const bool privates = takes_private_estimates(scenario_.protocol);
    ReportRecord maker{0, kMakerId, scenario_.initial_estimate, std::nullopt};
    if (ledger.empty()) {
      ledger.push_back(std::move(maker));
    } else {
      ledger.erase(ledger.begin() + 1, ledger.end());
      ledger[0] = std::move(maker);
    }
    if (beliefs) beliefs->assign(1, std::nullopt);

    auto scripted = [&](const AgentType& type, const Participation& p) {
      std::optional<Distribution> priv;
      if (privates) priv = p.reported_private ? *p.reported_private : type.private_signal;
      ledger.push_back(ReportRecord{ledger.size(), type.id, p.reported_final, std::move(priv)});
      if (beliefs) beliefs->push_back(std::nullopt);
    };

    const auto& mine = strategy.participations;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < others_.size() || j < mine.size()) {
      if (i < others_.size() && j < mine.size() && mine[j].slot == others_[i].slot) {
        fail(ErrorCode::kInvalidArgument, "slot " + std::to_string(mine[j].slot) +
                                              " is already taken by agent '" +
                                              scenario_.agents[others_[i].agent].type.id.value + "'");
      }
      if (i == others_.size() || (j < mine.size() && mine[j].slot < others_[i].slot)) {
        scripted(scenario_.agents[*focal_].type, mine[j++]);
        continue;
      }
      const Move& m = others_[i++];
      const AgentType& type = scenario_.agents[m.agent].type;
      if (m.participation != kTruthfulMove) {
        scripted(type, scenario_.agents[m.agent].script->participations[m.participation]);
        continue;
      }
      Distribution b = form_true_belief(type, ledger.back().final_estimate);
      std::optional<Distribution> priv;
      if (privates) priv = type.private_signal;
      ledger.push_back(ReportRecord{ledger.size(), type.id, b, std::move(priv)});
      if (beliefs) beliefs->push_back(std::move(b));
    }
  }

  StrategyValue value(const Strategy& strategy) {
    build(strategy, ledger_);
    const AgentType& focal_type = scenario_.agents[*focal_].type;
    const std::vector<SettlementTerms> terms =
        settlement_terms(scenario_.protocol, scenario_.rule, ledger_, &focal_type.id);
    StrategyValue out;
    for (const SettlementTerms& t : terms) {
      if (out.branches.size() < t.branches.size()) out.branches.resize(t.branches.size(), 0.0);
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t b = 0; b < t.branches.size(); ++b) {
        const Distribution& weight = b == 0 ? *belief_ : focal_type.private_signal;
        const double e = expectation(weight, t.branches[b]);
        out.branches[b] += e;
        best = std::max(best, e);
      }
      if (model_ == PayoffModel::kBranchBelief) {
        out.payoff += best;
        continue;
      }
      std::vector<double> realized(t.branches.front());
      for (std::size_t b = 1; b < t.branches.size(); ++b) {
        for (std::size_t i = 0; i < realized.size(); ++i) realized[i] = std::max(realized[i], t.branches[b][i]);
      }
      out.payoff += expectation(*belief_, realized);
    }
    return out;
  }

 private:
  const Scenario& scenario_;
  std::optional<std::size_t> focal_;
  PayoffModel model_;
  std::optional<Distribution> belief_;
  std::vector<Move> others_;
  Ledger ledger_;
};

void check_agent(const Scenario& scenario, std::size_t agent) {
  if (agent >= scenario.agents.size()) {
    fail(ErrorCode::kInvalidArgument, "agent index " + std::to_string(agent) + " out of range");
  }
}

std::vector<Distribution> report_grid(const Scenario& scenario, double step,
                                      const std::vector<Distribution>& snapped) {
  std::vector<Distribution> grid;
  const bool interior_only = scenario.rule.unbounded_below();
  for (Distribution& p : simplex_grid(scenario.rule.outcome_count(), step)) {
    if (interior_only && !p.is_interior(kReportInteriorEpsilon)) continue;
    grid.push_back(std::move(p));
  }
  for (const Distribution& extra : snapped) {
    const bool present = std::any_of(grid.begin(), grid.end(),
                                     [&](const Distribution& g) { return g.approx_equal(extra, 1e-12); });
    if (!present) grid.push_back(extra);
  }
  return grid;
}

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) {
    return std::numeric_limits<std::uint64_t>::max();
  }
  return a * b;
}

std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) {
  return b > std::numeric_limits<std::uint64_t>::max() - a ? std::numeric_limits<std::uint64_t>::max()
                                                           : a + b;
}

// Timing patterns. Only the order relative to other agents' moves matters, so
// slots are grouped into the gaps between those moves and each pattern places
// its participations in the earliest free slots of the chosen gaps.
std::vector<std::vector<std::size_t>> timing_patterns(const Scenario& scenario, std::size_t focal,
                                                      const StrategySpace& space) {
  const std::vector<Move> others = schedule_without(scenario, focal);
  std::set<std::size_t> taken;
  for (const Move& m : others) taken.insert(m.slot);
  const std::size_t scheduled = scenario.agents[focal].scheduled_slot;

  // Free slots per gap. Without timing choice only slots before the scheduled
  // one are usable for extra participations.
  std::vector<std::vector<std::size_t>> gaps(1);
  const std::size_t last_usable = space.allow_timing_choice ? scenario.slot_count : scheduled - 1;
  for (std::size_t s = 1; s <= last_usable; ++s) {
    if (taken.count(s)) {
      gaps.emplace_back();
    } else {
      gaps.back().push_back(s);
    }
  }

  std::vector<std::vector<std::size_t>> patterns;
  const std::size_t extra_limit =
      space.allow_timing_choice ? space.max_participations : space.max_participations - 1;
  const std::size_t first_size = space.allow_timing_choice ? 1 : 0;
  std::vector<std::size_t> chosen;  // gap index per participation, nondecreasing
  auto emit = [&] {
    std::vector<std::size_t> slots;
    std::vector<std::size_t> used(gaps.size(), 0);
    for (std::size_t g : chosen) slots.push_back(gaps[g][used[g]++]);
    if (!space.allow_timing_choice) slots.push_back(scheduled);
    patterns.push_back(std::move(slots));
  };
  std::vector<std::size_t> used(gaps.size(), 0);
  auto recurse = [&](auto&& self, std::size_t from_gap, std::size_t target) -> void {
    if (chosen.size() == target) {
      emit();
      return;
    }
    for (std::size_t g = from_gap; g < gaps.size(); ++g) {
      if (used[g] == gaps[g].size()) continue;
      ++used[g];
      chosen.push_back(g);
      self(self, g, target);
      chosen.pop_back();
      --used[g];
    }
  };
  for (std::size_t k = first_size; k <= extra_limit; ++k) recurse(recurse, 0, k);
  return patterns;
}

}  // namespace

std::string Strategy::to_string() const {
  std::ostringstream out;
  out << '{';
  for (std::size_t k = 0; k < participations.size(); ++k) {
    const Participation& p = participations[k];
    if (k) out << ", ";
    out << "slot " << p.slot << ": " << p.reported_final.to_string();
    if (p.reported_private) out << " prv " << p.reported_private->to_string();
  }
  out << '}';
  return out.str();
}

std::size_t Scenario::agent_index(const AgentId& id) const {
  for (std::size_t a = 0; a < agents.size(); ++a) {
    if (agents[a].type.id == id) return a;
  }
  fail(ErrorCode::kInvalidArgument, "unknown agent '" + id.value + "'");
}

void Scenario::validate() const {
  rule.validate();
  const std::size_t n = rule.outcome_count();
  if (initial_estimate.size() != n) fail(ErrorCode::kDomain, "initial estimate size does not match the rule");
  if (agents.empty()) fail(ErrorCode::kInvalidArgument, "scenario has no agents");
  if (slot_count == 0) fail(ErrorCode::kInvalidArgument, "slot count must be positive");
  if (nature && nature->size() != n) fail(ErrorCode::kDomain, "nature distribution size mismatch");
  if (realized_outcome) check_outcome(*realized_outcome, n);

  std::set<AgentId> ids;
  std::vector<std::optional<std::size_t>> owner(slot_count + 1);
  auto claim = [&](std::size_t slot, std::size_t agent) {
    if (slot == 0 || slot > slot_count) {
      fail(ErrorCode::kInvalidArgument, "agent '" + agents[agent].type.id.value + "' uses slot " +
                                            std::to_string(slot) + " outside 1.." + std::to_string(slot_count));
    }
    if (owner[slot] && *owner[slot] != agent) {
      fail(ErrorCode::kInvalidArgument, "slot " + std::to_string(slot) + " is claimed by both '" +
                                            agents[*owner[slot]].type.id.value + "' and '" +
                                            agents[agent].type.id.value + "'");
    }
    owner[slot] = agent;
  };
  for (std::size_t a = 0; a < agents.size(); ++a) {
    const ScenarioAgent& agent = agents[a];
    const AgentType& type = agent.type;
    if (type.id == kMakerId || type.id.value.empty()) {
      fail(ErrorCode::kInvalidArgument, "invalid agent id '" + type.id.value + "'");
    }
    if (!ids.insert(type.id).second) fail(ErrorCode::kInvalidArgument, "duplicate agent id '" + type.id.value + "'");
    if (type.private_signal.size() != n) fail(ErrorCode::kDomain, "private signal size mismatch for '" + type.id.value + "'");
    if (const auto* ex = std::get_if<ExogenousSignal>(&type.public_source); ex && ex->estimate.size() != n) {
      fail(ErrorCode::kDomain, "public signal size mismatch for '" + type.id.value + "'");
    }
    spml::validate(type.merge);
    if (agent.script) {
      const auto& parts = agent.script->participations;
      if (parts.empty()) fail(ErrorCode::kInvalidArgument, "empty script for '" + type.id.value + "'");
      for (std::size_t k = 0; k < parts.size(); ++k) {
        if (k && parts[k].slot <= parts[k - 1].slot) {
          fail(ErrorCode::kInvalidArgument, "script slots for '" + type.id.value + "' must increase strictly");
        }
        if (parts[k].reported_final.size() != n ||
            (parts[k].reported_private && parts[k].reported_private->size() != n)) {
          fail(ErrorCode::kDomain, "scripted report size mismatch for '" + type.id.value + "'");
        }
        claim(parts[k].slot, a);
      }
    } else {
      claim(agent.scheduled_slot, a);
    }
  }
  // A scripted agent's scheduled slot must be free for its truthful counterpart.
  for (std::size_t a = 0; a < agents.size(); ++a) {
    if (agents[a].script) claim(agents[a].scheduled_slot, a);
  }
}

PlayResult play(const Scenario& scenario) {
  scenario.validate();
  PlayResult result;
  Evaluator(scenario, std::nullopt).build(Strategy{}, result.ledger, &result.beliefs);
  return result;
}

namespace {

Distribution belief_unchecked(const Scenario& scenario, std::size_t agent) {
  const ScenarioAgent& a = scenario.agents[agent];
  return form_true_belief(a.type, [&] {
    Scenario truthful = scenario;
    truthful.agents[agent].script.reset();
    PlayResult run;
    Evaluator(truthful, std::nullopt).build(Strategy{}, run.ledger);
    for (std::size_t k = 1; k < run.ledger.size(); ++k) {
      if (run.ledger[k].agent == a.type.id) return run.ledger[k - 1].final_estimate;
    }
    fail(ErrorCode::kState, "agent never reached its scheduled slot");
  });
}

void check_strategy(const Scenario& scenario, const Strategy& strategy) {
  const std::size_t n = scenario.rule.outcome_count();
  if (strategy.participations.empty()) fail(ErrorCode::kInvalidArgument, "strategy has no participations");
  for (std::size_t k = 0; k < strategy.participations.size(); ++k) {
    const Participation& p = strategy.participations[k];
    if (p.slot == 0 || p.slot > scenario.slot_count) {
      fail(ErrorCode::kInvalidArgument, "strategy slot " + std::to_string(p.slot) + " out of range");
    }
    if (k && p.slot <= strategy.participations[k - 1].slot) {
      fail(ErrorCode::kInvalidArgument, "strategy slots must increase strictly");
    }
    if (p.reported_final.size() != n || (p.reported_private && p.reported_private->size() != n)) {
      fail(ErrorCode::kDomain, "strategy report size does not match the rule");
    }
  }
}

struct SearchSetup {
  std::vector<std::vector<std::size_t>> patterns;
  std::vector<Distribution> finals;
  std::vector<Distribution> bluffs;
  std::vector<std::optional<Distribution>> last_privates;
  std::optional<Distribution> earlier_private;
  std::uint64_t count = 0;
};

SearchSetup search_setup(const Scenario& scenario, std::size_t focal, const StrategySpace& space,
                         const Distribution& belief) {
  const AgentType& type = scenario.agents[focal].type;
  const std::vector<Distribution> snapped{belief, type.private_signal};
  SearchSetup setup;
  setup.patterns = timing_patterns(scenario, focal, space);
  setup.finals = report_grid(scenario, space.report_grid_step, snapped);
  setup.bluffs = space.bluff_grid_step ? report_grid(scenario, *space.bluff_grid_step, snapped) : setup.finals;
  if (!takes_private_estimates(scenario.protocol)) {
    setup.last_privates.push_back(std::nullopt);
  } else {
    setup.earlier_private = type.private_signal;
    if (space.allow_false_private) {
      setup.last_privates.assign(setup.finals.begin(), setup.finals.end());
    } else {
      setup.last_privates.push_back(type.private_signal);
    }
  }
  const std::uint64_t per_last = saturating_mul(setup.finals.size(), setup.last_privates.size());
  for (const auto& pattern : setup.patterns) {
    std::uint64_t c = per_last;
    for (std::size_t k = 1; k < pattern.size(); ++k) c = saturating_mul(c, setup.bluffs.size());
    setup.count = saturating_add(setup.count, c);
  }
  return setup;
}

void check_focal(const Scenario& scenario, std::size_t focal) {
  scenario.validate();
  check_agent(scenario, focal);
}

}  // namespace

Distribution true_belief(const Scenario& scenario, std::size_t agent) {
  check_focal(scenario, agent);
  return belief_unchecked(scenario, agent);
}

Strategy truthful_strategy(const Scenario& scenario, std::size_t agent) {
  check_focal(scenario, agent);
  const ScenarioAgent& a = scenario.agents[agent];
  std::optional<Distribution> priv;
  if (takes_private_estimates(scenario.protocol)) priv = a.type.private_signal;
  return Strategy{{Participation{a.scheduled_slot, belief_unchecked(scenario, agent), std::move(priv)}}};
}

std::string_view to_string(PayoffModel model) {
  return model == PayoffModel::kBranchBelief ? "branch_belief" : "realized_expectation";
}

PayoffModel parse_payoff_model(std::string_view text) {
  if (text == "branch_belief") return PayoffModel::kBranchBelief;
  if (text == "realized_expectation") return PayoffModel::kRealizedExpectation;
  fail(ErrorCode::kInvalidArgument, "unknown payoff model '" + std::string(text) + "'");
}

StrategyValue evaluate_strategy(const Scenario& scenario, std::size_t focal, const Strategy& strategy,
                                PayoffModel model, const std::optional<Distribution>& belief) {
  check_focal(scenario, focal);
  check_strategy(scenario, strategy);
  if (belief && belief->size() != scenario.rule.outcome_count()) {
    fail(ErrorCode::kDomain, "belief size does not match the rule");
  }
  Evaluator ev(scenario, focal, model, belief ? *belief : belief_unchecked(scenario, focal));
  return ev.value(strategy);
}

void StrategySpace::validate() const {
  grid_cells(report_grid_step);
  if (bluff_grid_step) grid_cells(*bluff_grid_step);
  if (max_participations < 1) fail(ErrorCode::kInvalidArgument, "max_participations must be at least 1");
  if (cap == 0) fail(ErrorCode::kInvalidArgument, "strategy cap must be positive");
}

std::uint64_t strategy_count(const Scenario& scenario, std::size_t focal, const StrategySpace& space) {
  check_focal(scenario, focal);
  space.validate();
  return search_setup(scenario, focal, space, belief_unchecked(scenario, focal)).count;
}

VerificationReport best_response(const Scenario& scenario, std::size_t focal, const StrategySpace& space,
                                 PayoffModel model) {
  check_focal(scenario, focal);
  space.validate();
  const Distribution belief = belief_unchecked(scenario, focal);
  const SearchSetup setup = search_setup(scenario, focal, space, belief);
  if (setup.count > space.cap) {
    fail(ErrorCode::kLimit, "strategy space has " + std::to_string(setup.count) +
                                " strategies, above the cap of " + std::to_string(space.cap));
  }

  Evaluator ev(scenario, focal, model, belief);
  VerificationReport report;
  report.truthful = truthful_strategy(scenario, focal);
  const StrategyValue truthful = ev.value(report.truthful);
  report.truthful_payoff = truthful.payoff;

  std::vector<double> branch_best(truthful.branches.size(), -std::numeric_limits<double>::infinity());
  double best = -std::numeric_limits<double>::infinity();
  Strategy candidate;
  for (const auto& pattern : setup.patterns) {
    const std::size_t k = pattern.size();
    candidate.participations.assign(k, Participation{0, belief, std::nullopt});
    for (std::size_t m = 0; m < k; ++m) {
      candidate.participations[m].slot = pattern[m];
      candidate.participations[m].reported_private = m + 1 < k ? setup.earlier_private : std::nullopt;
    }
    // Odometer over (earlier reports..., last report, last private).
    std::vector<std::size_t> digit(k + 1, 0);
    std::vector<std::size_t> radix(k + 1);
    for (std::size_t m = 0; m + 1 < k; ++m) radix[m] = setup.bluffs.size();
    radix[k - 1] = setup.finals.size();
    radix[k] = setup.last_privates.size();
    for (;;) {
      for (std::size_t m = 0; m + 1 < k; ++m) candidate.participations[m].reported_final = setup.bluffs[digit[m]];
      candidate.participations[k - 1].reported_final = setup.finals[digit[k - 1]];
      candidate.participations[k - 1].reported_private = setup.last_privates[digit[k]];

      const StrategyValue v = ev.value(candidate);
      ++report.strategies_evaluated;
      if (v.payoff > best) {
        best = v.payoff;
        report.best_deviation = candidate;
      }
      for (std::size_t b = 0; b < std::min(branch_best.size(), v.branches.size()); ++b) {
        branch_best[b] = std::max(branch_best[b], v.branches[b]);
      }

      std::size_t m = k + 1;
      while (m-- > 0) {
        if (++digit[m] < radix[m]) break;
        digit[m] = 0;
      }
      if (m == static_cast<std::size_t>(-1)) break;
    }
  }

  report.best_deviation_payoff = best;
  report.margin = report.truthful_payoff - best;
  report.truthful_is_best = report.margin >= -kOptimalitySlack;
  if (model == PayoffModel::kBranchBelief) {
    for (std::size_t b = 0; b < branch_best.size(); ++b) {
      report.branch_margins.push_back(truthful.branches[b] - branch_best[b]);
      if (report.branch_margins.back() < -kOptimalitySlack) report.truthful_is_best = false;
    }
  }
  return report;
}

Scenario with_strategy(const Scenario& scenario, std::size_t focal, const Strategy& strategy) {
  check_agent(scenario, focal);
  Scenario out = scenario;
  out.agents[focal].script = strategy;
  return out;
}

}  // namespace spml
