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

#include "spml/theorems.hpp"

#include <algorithm>
#include <numeric>

#include "spml/error.hpp"
#include "spml/paper_examples.hpp"

namespace spml {
namespace {

struct Conditions {
  Protocol protocol = Protocol::kSrm;
  bool exogenous_only = false;
  bool nni_always = true;
  std::vector<std::string> labels;
};

Conditions conditions_for(TheoremId id) {
  switch (id) {
    case TheoremId::kT1: return {Protocol::kSrm, true, true, {"OP-MI", "NNI"}};
    case TheoremId::kT2: return {Protocol::kSrm, false, true, {"PPO", "NNI"}};
    case TheoremId::kT3: return {Protocol::kSrm, true, true, {"PPO", "OP-MI"}};
    case TheoremId::kT5: return {Protocol::kApSrm, true, true, {"OP-MI", "NNI"}};
    case TheoremId::kT7: return {Protocol::kNmSrm, false, true, {"PPO", "NNI"}};
    case TheoremId::kT9: return {Protocol::kApNmSrm, false, true, {"NNI"}};
    case TheoremId::kT11: return {Protocol::kSpSrm, false, false, {}};
  }
  fail(ErrorCode::kInvalidArgument, "unknown theorem");
}

Distribution random_interior(std::size_t n, std::mt19937_64& rng) {
  std::exponential_distribution<double> draw(1.0);
  std::vector<double> p(n);
  for (double& v : p) v = draw(rng);
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  for (double& v : p) v = 0.85 * v / total + 0.15 / static_cast<double>(n);
  return Distribution(std::move(p));
}

MergeRule random_merge(std::size_t n, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(0, n == 2 ? 2 : 1);
  std::uniform_real_distribution<double> delta(0.05, 0.2);
  std::uniform_real_distribution<double> lambda(0.0, 1.0);
  switch (pick(rng)) {
    case 0: return PrivateOnly{};
    case 1: return ConvexMix{lambda(rng)};
    default: return ShiftToward{delta(rng)};
  }
}

Witness make_witness(std::string origin, const Scenario& scenario, std::size_t focal,
                     const VerificationReport& report) {
  Witness w{std::move(origin), scenario, focal, report.truthful, report.truthful_payoff,
            report.best_deviation, report.best_deviation_payoff, {}, report.branch_margins};
  w.ledger = play(with_strategy(scenario, focal, report.best_deviation)).ledger;
  return w;
}

bool strictly_better(const VerificationReport& report) { return report.margin < -kOptimalitySlack; }

std::optional<Witness> paper_delay_witness(PayoffModel model) {
  Scenario s = paper_example(1);
  s.slot_count = 3;
  StrategySpace space;
  space.allow_timing_choice = true;
  const VerificationReport r = best_response(s, 0, space, model);
  if (!strictly_better(r)) return std::nullopt;
  return make_witness("paper construction", s, 0, r);
}

std::optional<Witness> paper_bluff_witness(PayoffModel model) {
  Scenario s = paper_example(3);
  s.agents[0].script.reset();
  StrategySpace space;
  space.report_grid_step = 0.01;
  space.max_participations = 2;
  const VerificationReport r = best_response(s, 0, space, model);
  if (!strictly_better(r)) return std::nullopt;
  return make_witness("paper construction", s, 0, r);
}

// Merging versus neglecting the public signal, valued under nature when
// nature equals the private signal.
std::optional<Witness> neglect_witness(std::string origin, Scenario s, std::size_t focal) {
  const AgentType& type = s.agents[focal].type;
  s.nature = type.private_signal;
  const Distribution belief = true_belief(s, focal);
  if (nni_holds(s.rule, belief, type.private_signal, *s.nature)) return std::nullopt;
  const Strategy merged = truthful_strategy(s, focal);
  Strategy neglect = merged;
  neglect.participations.front().reported_final = type.private_signal;
  const StrategyValue merged_value = evaluate_strategy(s, focal, merged, PayoffModel::kBranchBelief, s.nature);
  const StrategyValue neglect_value = evaluate_strategy(s, focal, neglect, PayoffModel::kBranchBelief, s.nature);
  if (!(neglect_value.payoff > merged_value.payoff + kOptimalitySlack)) return std::nullopt;
  Witness w{std::move(origin), s, focal, merged, merged_value.payoff, neglect, neglect_value.payoff, {}, {}};
  w.ledger = play(with_strategy(s, focal, neglect)).ledger;
  return w;
}

Coverage& coverage_slot(TheoremSummary& summary, std::size_t n, const StrategySpace& space) {
  for (Coverage& c : summary.coverage) {
    if (c.outcomes == n && c.space.report_grid_step == space.report_grid_step &&
        c.space.max_participations == space.max_participations &&
        c.space.bluff_grid_step == space.bluff_grid_step) {
      return c;
    }
  }
  summary.coverage.push_back(Coverage{n, space, 0});
  return summary.coverage.back();
}

constexpr std::size_t kMaxAgents = 4;

}  // namespace

std::string_view to_string(TheoremId id) {
  switch (id) {
    case TheoremId::kT1: return "T1";
    case TheoremId::kT2: return "T2";
    case TheoremId::kT3: return "T3";
    case TheoremId::kT5: return "T5";
    case TheoremId::kT7: return "T7";
    case TheoremId::kT9: return "T9";
    case TheoremId::kT11: return "T11";
  }
  return "?";
}

TheoremId parse_theorem(std::string_view text) {
  for (TheoremId id : {TheoremId::kT1, TheoremId::kT2, TheoremId::kT3, TheoremId::kT5, TheoremId::kT7,
                       TheoremId::kT9, TheoremId::kT11}) {
    if (text == to_string(id)) return id;
  }
  fail(ErrorCode::kInvalidArgument, "unknown theorem '" + std::string(text) + "' (expected T1, T2, T3, T5, T7, T9 or T11)");
}

bool is_manipulability_claim(TheoremId id) {
  return id == TheoremId::kT1 || id == TheoremId::kT2 || id == TheoremId::kT3;
}

Scenario random_scenario(TheoremId id, std::size_t outcomes, std::mt19937_64& rng) {
  const Conditions cond = conditions_for(id);
  std::bernoulli_distribution coin(0.5);
  std::bernoulli_distribution scripted_coin(0.3);
  std::uniform_real_distribution<double> scale(0.5, 2.0);
  std::uniform_int_distribution<std::size_t> agent_count(2, kMaxAgents);
  std::uniform_int_distribution<std::size_t> script_length(1, 2);

  Scenario s;
  s.protocol = cond.protocol;
  s.rule = coin(rng) ? ScoringRuleSpec::logarithmic(outcomes, scale(rng))
                     : ScoringRuleSpec::quadratic(outcomes, scale(rng));
  s.initial_estimate = random_interior(outcomes, rng);

  const std::size_t count = agent_count(rng);
  // Scripted reports per agent; zero means truthful. The focal agent is truthful.
  std::vector<std::size_t> scripted(count, 0);
  for (std::size_t a = 1; a < count; ++a) {
    if (scripted_coin(rng)) scripted[a] = script_length(rng);
  }
  std::size_t needed = 0;
  for (std::size_t k : scripted) needed += std::max<std::size_t>(k, 1);
  s.slot_count = needed + 2;
  std::vector<std::size_t> slots(s.slot_count);
  std::iota(slots.begin(), slots.end(), 1);
  std::shuffle(slots.begin(), slots.end(), rng);

  std::size_t next = 0;
  for (std::size_t a = 0; a < count; ++a) {
    ScenarioAgent agent;
    agent.type.id = AgentId{"a" + std::to_string(a + 1)};
    agent.type.private_signal = random_interior(outcomes, rng);
    if (cond.exogenous_only || coin(rng)) {
      agent.type.public_source = ExogenousSignal{random_interior(outcomes, rng)};
    } else {
      agent.type.public_source = MarketEstimateSignal{};
    }
    agent.type.merge = random_merge(outcomes, rng);
    agent.type.believes_nni = cond.nni_always || coin(rng);
    if (scripted[a] == 0) {
      agent.scheduled_slot = slots[next++];
    } else {
      std::vector<std::size_t> mine(slots.begin() + next, slots.begin() + next + scripted[a]);
      next += scripted[a];
      std::sort(mine.begin(), mine.end());
      Strategy script;
      for (std::size_t slot : mine) {
        std::optional<Distribution> priv;
        if (coin(rng)) priv = random_interior(outcomes, rng);
        script.participations.push_back(Participation{slot, random_interior(outcomes, rng), priv});
      }
      agent.scheduled_slot = mine.front();
      agent.script = std::move(script);
    }
    s.agents.push_back(std::move(agent));
  }
  s.nature = random_interior(outcomes, rng);
  return s;
}

std::vector<StrategySpace> sweep_spaces(TheoremId id, std::size_t outcomes) {
  StrategySpace base;
  base.report_grid_step = 0.05;
  switch (id) {
    case TheoremId::kT1:
    case TheoremId::kT5:
      base.allow_timing_choice = true;
      return {base};
    case TheoremId::kT3:
      return {base};
    case TheoremId::kT2:
      base.max_participations = 2;
      if (outcomes > 2) base.report_grid_step = 0.1;
      return {base};
    case TheoremId::kT7:
    case TheoremId::kT9:
    case TheoremId::kT11:
      break;
  }
  base.allow_timing_choice = id != TheoremId::kT7;
  base.allow_false_private = true;
  if (outcomes == 2) {
    base.max_participations = 2;
    return {base};
  }
  StrategySpace pair = base;
  pair.report_grid_step = 0.1;
  pair.bluff_grid_step = 0.25;
  pair.max_participations = 2;
  return {base, pair};
}

TheoremSummary verify_theorem(TheoremId id, const VerifyOptions& options) {
  if (options.trials < 1) fail(ErrorCode::kInvalidArgument, "trials must be at least 1");
  const Conditions cond = conditions_for(id);
  TheoremSummary summary;
  summary.theorem = id;
  summary.protocol = cond.protocol;
  summary.manipulability = is_manipulability_claim(id);
  summary.trials = options.trials;
  summary.seed = options.seed;
  summary.model = options.model;
  summary.conditions = cond.labels;
  summary.max_agents = kMaxAgents;

  std::mt19937_64 rng(options.seed);

  if (summary.manipulability) {
    switch (id) {
      case TheoremId::kT1: summary.witness = paper_delay_witness(options.model); break;
      case TheoremId::kT2: summary.witness = paper_bluff_witness(options.model); break;
      default: {
        const Scenario s = paper_example(1);
        summary.witness = neglect_witness("paper construction", s, s.agent_index(AgentId{"2"}));
      }
    }
    if (summary.witness) summary.scenarios_checked = 1;
    for (std::size_t t = 0; !summary.witness && t < options.trials; ++t) {
      const std::size_t n = 2 + t % 2;
      const Scenario s = random_scenario(id, n, rng);
      ++summary.scenarios_checked;
      if (id == TheoremId::kT3) {
        summary.witness = neglect_witness("random search", s, 0);
        continue;
      }
      for (const StrategySpace& space : sweep_spaces(id, n)) {
        const VerificationReport r = best_response(s, 0, space, options.model);
        summary.strategies_evaluated += r.strategies_evaluated;
        ++coverage_slot(summary, n, space).scenarios;
        if (strictly_better(r)) {
          summary.witness = make_witness("random search", s, 0, r);
          break;
        }
      }
    }
    summary.passed = summary.witness.has_value();
    if (summary.witness) summary.worst_margin = summary.witness->truthful_payoff - summary.witness->deviation_payoff;
    return summary;
  }

  summary.worst_margin = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < options.trials; ++t) {
    const std::size_t n = 2 + t % 2;
    const Scenario s = random_scenario(id, n, rng);
    ++summary.scenarios_checked;
    for (const StrategySpace& space : sweep_spaces(id, n)) {
      const VerificationReport r = best_response(s, 0, space, options.model);
      summary.strategies_evaluated += r.strategies_evaluated;
      ++coverage_slot(summary, n, space).scenarios;
      summary.worst_margin = std::min(summary.worst_margin, r.margin);
      for (double m : r.branch_margins) summary.worst_margin = std::min(summary.worst_margin, m);
      if (!r.truthful_is_best) {
        ++summary.violations;
        if (!summary.witness) summary.witness = make_witness("random search", s, 0, r);
      }
    }
  }
  summary.passed = summary.violations == 0;
  return summary;
}

}  // namespace spml
