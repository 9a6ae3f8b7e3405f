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

#include "spml/paper_examples.hpp"

#include <cmath>

#include "spml/error.hpp"

namespace spml {
namespace {

const Distribution kUniform{0.5, 0.5};

ScenarioAgent first_agent(std::size_t slot) {
  return ScenarioAgent{AgentType{AgentId{"1"}, Distribution{0.4, 0.6}, MarketEstimateSignal{}, PrivateOnly{}, true},
                       slot, std::nullopt};
}

ScenarioAgent second_agent_exogenous(std::size_t slot) {
  return ScenarioAgent{AgentType{AgentId{"2"}, Distribution{0.8, 0.2}, ExogenousSignal{Distribution{0.45, 0.55}},
                                 ShiftToward{0.1}, true},
                       slot, std::nullopt};
}

bool same4(double value, double published) { return std::abs(round4(value) - published) < 1e-9; }

}  // namespace

double round4(double value) { return std::round(value * 1e4) / 1e4; }

Scenario paper_example(int example) {
  Scenario s;
  s.protocol = Protocol::kSrm;
  s.rule = ScoringRuleSpec::logarithmic(2, 1.0);
  s.initial_estimate = kUniform;
  switch (example) {
    case 1:
      s.agents = {first_agent(1), second_agent_exogenous(2)};
      s.slot_count = 2;
      break;
    case 2:
      s.agents = {second_agent_exogenous(1), first_agent(2)};
      s.slot_count = 2;
      break;
    case 3: {
      ScenarioAgent bluffer = first_agent(3);
      bluffer.script = Strategy{{Participation{1, Distribution{0.51, 0.49}, std::nullopt},
                                 Participation{3, Distribution{0.4, 0.6}, std::nullopt}}};
      ScenarioAgent follower{AgentType{AgentId{"2"}, Distribution{0.7, 0.3}, MarketEstimateSignal{},
                                       ShiftToward{0.1}, true},
                             2, std::nullopt};
      s.agents = {bluffer, follower};
      s.slot_count = 3;
      break;
    }
    default:
      fail(ErrorCode::kInvalidArgument, "example must be 1, 2 or 3");
  }
  return s;
}

PaperTable reproduce_table(int example) {
  const Scenario scenario = paper_example(example);
  const Ledger ledger = play(scenario).ledger;

  PaperTable table;
  table.example = example;
  for (const SettlementTerms& t : settlement_terms(scenario.protocol, scenario.rule, ledger)) {
    const Distribution belief = true_belief(scenario, scenario.agent_index(t.agent));
    double ep = 0.0;
    for (std::size_t i = 0; i < belief.size(); ++i) ep += belief[i] * t.branches.front()[i];
    table.rows.push_back(TableRow{t.agent, belief, t.report_seq, t.references.front().estimate, t.report, ep});
  }

  switch (example) {
    case 1: table.published = {0.0201, 0.1838}; break;
    case 2: table.published = {0.0823, 0.1920}; break;
    default:
      table.published = {-0.0042, 0.1809, 0.3819};
      table.published_net = 0.3777;
      table.net = 0.0;
      for (const TableRow& row : table.rows) {
        if (row.agent.value == "1") *table.net += row.expected_payoff;
      }
  }

  table.matches = table.rows.size() == table.published.size();
  for (std::size_t r = 0; table.matches && r < table.rows.size(); ++r) {
    table.matches = same4(table.rows[r].expected_payoff, table.published[r]);
  }
  if (table.published_net) table.matches = table.matches && same4(*table.net, *table.published_net);
  return table;
}

}  // namespace spml
