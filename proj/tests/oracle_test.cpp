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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "spml/paper_examples.hpp"
#include "spml/theorems.hpp"
#include "test_util.hpp"

namespace spml {
namespace {

Participation at(std::size_t slot, Distribution p, std::optional<Distribution> prv = std::nullopt) {
  return Participation{slot, std::move(p), std::move(prv)};
}

// Example 1 with a spare third slot; agent "1" (index 0) may move.
Scenario example_one_spare_slot() {
  Scenario s = paper_example(1);
  s.slot_count = 3;
  return s;
}

// Example 3's setting without the scripted bluff: agent "1" is scheduled last.
Scenario example_three_open() {
  Scenario s = paper_example(3);
  s.agents[0].script.reset();
  return s;
}

TEST(TruthfulStrategy, ExampleOneAgentTwo) {
  Scenario s = paper_example(1);
  s.protocol = Protocol::kNmSrm;
  const Strategy t = truthful_strategy(s, 1);
  ASSERT_EQ(t.participations.size(), 1u);
  EXPECT_EQ(t.participations[0].slot, 2u);
  EXPECT_TRUE(t.participations[0].reported_final.approx_equal(Distribution{0.7, 0.3}, 1e-12));
  EXPECT_EQ(t.participations[0].reported_private, (Distribution{0.8, 0.2}));

  s.protocol = Protocol::kSrm;
  EXPECT_FALSE(truthful_strategy(s, 1).participations[0].reported_private.has_value());
}

TEST(TruthfulStrategy, PrivateSignalPaths) {
  Scenario s = paper_example(1);
  s.agents[1].type.believes_nni = false;
  EXPECT_EQ(truthful_strategy(s, 1).participations[0].reported_final, (Distribution{0.8, 0.2}));
  s.agents[1].type.believes_nni = true;
  s.agents[1].type.merge = ConvexMix{1.0};
  EXPECT_EQ(truthful_strategy(s, 1).participations[0].reported_final, (Distribution{0.8, 0.2}));
}

TEST(Play, ReactiveSignalsFollowTheMarket) {
  const PlayResult r = play(paper_example(3));
  ASSERT_EQ(r.ledger.size(), 4u);
  EXPECT_EQ(r.ledger[1].final_estimate, (Distribution{0.51, 0.49}));
  EXPECT_TRUE(r.ledger[2].final_estimate.approx_equal(Distribution{0.8, 0.2}, 1e-12));
  EXPECT_EQ(r.ledger[3].final_estimate, (Distribution{0.4, 0.6}));
  ASSERT_EQ(r.beliefs.size(), 4u);
  EXPECT_FALSE(r.beliefs[1].has_value());
  EXPECT_TRUE(r.beliefs[2].has_value());
  EXPECT_FALSE(r.beliefs[3].has_value());
}

TEST(EvaluateStrategy, PaperValues) {
  const Scenario two = paper_example(2);
  EXPECT_NEAR(evaluate_strategy(two, 1, truthful_strategy(two, 1)).payoff, 0.1920, 5e-5);

  const Scenario three = paper_example(3);
  EXPECT_NEAR(evaluate_strategy(three, 0, *three.agents[0].script).payoff, 0.3777, 5e-5);
  EXPECT_NEAR(evaluate_strategy(three, 0, *three.agents[0].script).payoff,
              -0.0042 + 0.3819, 1e-4);
}

TEST(EvaluateStrategy, RepeatingTheCurrentEstimatePaysNothing) {
  const Scenario s = example_one_spare_slot();
  const Strategy echo{{at(1, Distribution{0.5, 0.5}), at(3, Distribution{0.7, 0.3})}};
  EXPECT_NEAR(evaluate_strategy(s, 0, echo).payoff, 0.0, 1e-15);
}

TEST(EvaluateStrategy, RejectsBadStrategies) {
  const Scenario s = example_one_spare_slot();
  EXPECT_SPML_ERROR(evaluate_strategy(s, 0, Strategy{{at(2, Distribution{0.4, 0.6})}}), ErrorCode::kInvalidArgument);
  EXPECT_SPML_ERROR(evaluate_strategy(s, 0, Strategy{{at(4, Distribution{0.4, 0.6})}}), ErrorCode::kInvalidArgument);
  EXPECT_SPML_ERROR(evaluate_strategy(s, 0, Strategy{{at(3, Distribution{0.4, 0.6}), at(1, Distribution{0.4, 0.6})}}),
                    ErrorCode::kInvalidArgument);
  EXPECT_SPML_ERROR(evaluate_strategy(s, 0, Strategy{}), ErrorCode::kInvalidArgument);
  EXPECT_SPML_ERROR(evaluate_strategy(s, 5, Strategy{{at(1, Distribution{0.4, 0.6})}}), ErrorCode::kInvalidArgument);
}

TEST(Scenario, Validation) {
  Scenario s = paper_example(1);
  s.agents[1].scheduled_slot = 1;
  EXPECT_SPML_ERROR(s.validate(), ErrorCode::kInvalidArgument);
  s = paper_example(1);
  s.agents[1].type.id = s.agents[0].type.id;
  EXPECT_SPML_ERROR(s.validate(), ErrorCode::kInvalidArgument);
  s = paper_example(1);
  s.agents[1].type.id = kMakerId;
  EXPECT_SPML_ERROR(s.validate(), ErrorCode::kInvalidArgument);
  s = paper_example(1);
  s.slot_count = 1;
  EXPECT_SPML_ERROR(s.validate(), ErrorCode::kInvalidArgument);
  EXPECT_SPML_ERROR(s.agent_index(AgentId{"9"}), ErrorCode::kInvalidArgument);
}

TEST(BestResponse, TimingManipulatesSrm) {
  StrategySpace space;
  space.allow_timing_choice = true;
  const VerificationReport r = best_response(example_one_spare_slot(), 0, space);
  EXPECT_NEAR(r.truthful_payoff, 0.0201, 5e-5);
  EXPECT_NEAR(r.best_deviation_payoff, 0.1920, 5e-5);
  ASSERT_EQ(r.best_deviation.participations.size(), 1u);
  EXPECT_EQ(r.best_deviation.participations[0].slot, 3u);
  EXPECT_FALSE(r.truthful_is_best);
  EXPECT_NEAR(r.margin, r.truthful_payoff - r.best_deviation_payoff, 1e-15);
}

TEST(BestResponse, BluffingManipulatesSrm) {
  StrategySpace space;
  space.report_grid_step = 0.01;
  space.max_participations = 2;
  const VerificationReport r = best_response(example_three_open(), 0, space);
  EXPECT_NEAR(r.truthful_payoff, 0.1920, 5e-5);
  EXPECT_GE(r.best_deviation_payoff, 0.3777 - 5e-5);
  EXPECT_FALSE(r.truthful_is_best);
}

TEST(BestResponse, StrategyProofMarketResistsBoth) {
  StrategySpace timing;
  timing.allow_timing_choice = true;
  timing.max_participations = 2;
  timing.allow_false_private = true;
  Scenario one = example_one_spare_slot();
  one.protocol = Protocol::kSpSrm;
  const VerificationReport a = best_response(one, 0, timing);
  EXPECT_TRUE(a.truthful_is_best) << a.best_deviation.to_string() << " margin " << a.margin;
  EXPECT_GE(a.margin, -kOptimalitySlack);

  StrategySpace bluff;
  bluff.report_grid_step = 0.01;
  bluff.max_participations = 2;
  Scenario three = example_three_open();
  three.protocol = Protocol::kSpSrm;
  const VerificationReport b = best_response(three, 0, bluff);
  EXPECT_TRUE(b.truthful_is_best) << b.best_deviation.to_string() << " margin " << b.margin;
  ASSERT_EQ(b.branch_margins.size(), 2u);
  for (double m : b.branch_margins) EXPECT_GE(m, -kOptimalitySlack);
}

TEST(BestResponse, RefusesOversizedSpaces) {
  StrategySpace space;
  space.report_grid_step = 0.01;
  space.max_participations = 2;
  space.cap = 100;
  const Scenario s = example_three_open();
  EXPECT_GT(strategy_count(s, 0, space), 100u);
  EXPECT_SPML_ERROR(best_response(s, 0, space), ErrorCode::kLimit);
  const std::string message = testutil::error_message([&] { best_response(s, 0, space); });
  EXPECT_NE(message.find(std::to_string(strategy_count(s, 0, space))), std::string::npos) << message;
}

TEST(BestResponse, Deterministic) {
  StrategySpace space;
  space.allow_timing_choice = true;
  space.max_participations = 2;
  space.report_grid_step = 0.1;
  const Scenario s = example_one_spare_slot();
  const VerificationReport a = best_response(s, 0, space);
  const VerificationReport b = best_response(s, 0, space);
  EXPECT_EQ(a.best_deviation.to_string(), b.best_deviation.to_string());
  EXPECT_EQ(a.best_deviation_payoff, b.best_deviation_payoff);
  EXPECT_EQ(a.truthful_payoff, b.truthful_payoff);
  EXPECT_EQ(a.strategies_evaluated, b.strategies_evaluated);
  EXPECT_EQ(a.strategies_evaluated, strategy_count(s, 0, space));
}

TEST(BestResponse, TruthfulIsAlwaysInTheSpace) {
  // Off-grid belief: 0.3 * [0.8, 0.2] + 0.7 * [0.45, 0.55].
  Scenario s = paper_example(1);
  s.agents[1].type.merge = ConvexMix{0.3};
  s.protocol = Protocol::kApSrm;
  StrategySpace space;
  space.report_grid_step = 0.1;
  const VerificationReport r = best_response(s, 1, space);
  EXPECT_GE(r.best_deviation_payoff, r.truthful_payoff - 1e-15);
  EXPECT_TRUE(r.truthful_is_best);
}

TEST(Properties, SrmMyopicOptimality) {
  std::mt19937_64 rng(23);
  StrategySpace space;
  for (int trial = 0; trial < 40; ++trial) {
    Scenario s = random_scenario(TheoremId::kT5, 2 + trial % 2, rng);
    s.protocol = Protocol::kSrm;
    const VerificationReport r = best_response(s, 0, space);
    EXPECT_TRUE(r.truthful_is_best) << "trial " << trial << ": " << r.best_deviation.to_string();
  }
}

TEST(Properties, SrmWithoutFixedOrderIsManipulable) {
  // Sanity check that the sweeps are not vacuous.
  std::mt19937_64 rng(29);
  StrategySpace space;
  space.allow_timing_choice = true;
  space.max_participations = 2;
  int manipulable = 0;
  for (int trial = 0; trial < 20; ++trial) {
    Scenario s = random_scenario(TheoremId::kT11, 2, rng);
    s.protocol = Protocol::kSrm;
    if (!best_response(s, 0, space).truthful_is_best) ++manipulable;
  }
  EXPECT_GT(manipulable, 0);
}

TEST(Properties, ApTimingInvariance) {
  Scenario s = example_one_spare_slot();
  s.protocol = Protocol::kApSrm;
  const double early = evaluate_strategy(s, 0, Strategy{{at(1, Distribution{0.4, 0.6})}}).payoff;
  const double late = evaluate_strategy(s, 0, Strategy{{at(3, Distribution{0.4, 0.6})}}).payoff;
  EXPECT_NEAR(early, late, 1e-12);
}

TEST(Properties, NmLastReportDominance) {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 40; ++trial) {
    Scenario s = random_scenario(TheoremId::kT5, 2 + trial % 2, rng);
    s.protocol = Protocol::kNmSrm;
    std::vector<std::size_t> free;
    std::vector<bool> taken(s.slot_count + 1, false);
    for (std::size_t a = 1; a < s.agents.size(); ++a) {
      if (s.agents[a].script) {
        for (const Participation& p : s.agents[a].script->participations) taken[p.slot] = true;
      } else {
        taken[s.agents[a].scheduled_slot] = true;
      }
    }
    for (std::size_t slot = 1; slot <= s.slot_count; ++slot) {
      if (!taken[slot]) free.push_back(slot);
    }
    ASSERT_GE(free.size(), 2u);
    const std::size_t n = s.rule.outcome_count();
    const Distribution bluff = Distribution::uniform(n);
    const Distribution last = s.agents[0].type.private_signal;
    const Strategy two{{at(free.front(), bluff), at(free.back(), last)}};
    const Strategy one{{at(free.back(), last)}};
    EXPECT_NEAR(evaluate_strategy(s, 0, two).payoff, evaluate_strategy(s, 0, one).payoff, 1e-12);
  }
}

TEST(PayoffModel, Names) {
  EXPECT_EQ(parse_payoff_model("branch_belief"), PayoffModel::kBranchBelief);
  EXPECT_EQ(parse_payoff_model(to_string(PayoffModel::kRealizedExpectation)), PayoffModel::kRealizedExpectation);
  EXPECT_SPML_ERROR(parse_payoff_model("max"), ErrorCode::kInvalidArgument);
}

}  // namespace
}  // namespace spml
