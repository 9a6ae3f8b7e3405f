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

#include "spml/beliefs.hpp"

#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "test_util.hpp"

namespace spml {
namespace {

AgentType agent(Distribution prv, PublicSignalSource source, MergeRule rule, bool nni = true) {
  return AgentType{AgentId{"a"}, std::move(prv), std::move(source), rule, nni};
}

void expect_dist(const Distribution& got, std::vector<double> want, double tol = 1e-12) {
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(got[i], want[i], tol) << "entry " << i << " of " << got;
}

TEST(PublicSignal, Sources) {
  const AgentType exo = agent(Distribution{0.8, 0.2}, ExogenousSignal{Distribution{0.45, 0.55}}, PrivateOnly{});
  expect_dist(resolve_public_signal(exo, Distribution{0.9, 0.1}), {0.45, 0.55});
  const AgentType mkt = agent(Distribution{0.7, 0.3}, MarketEstimateSignal{}, PrivateOnly{});
  expect_dist(resolve_public_signal(mkt, Distribution{0.51, 0.49}), {0.51, 0.49});
  expect_dist(resolve_public_signal(mkt, Distribution{0.5, 0.5}), {0.5, 0.5});
}

TEST(Merge, ShiftTowardExamples) {
  expect_dist(merge(ShiftToward{0.1}, Distribution{0.8, 0.2}, Distribution{0.45, 0.55}), {0.7, 0.3});
  expect_dist(merge(ShiftToward{0.1}, Distribution{0.7, 0.3}, Distribution{0.5, 0.5}), {0.7, 0.3});
  expect_dist(merge(ShiftToward{0.1}, Distribution{0.7, 0.3}, Distribution{0.51, 0.49}), {0.8, 0.2});
}

TEST(Merge, ShiftTowardClamps) {
  expect_dist(merge(ShiftToward{0.1}, Distribution{0.95, 0.05}, Distribution{0.6, 0.4}), {1.0 - kShiftClamp, kShiftClamp});
  expect_dist(merge(ShiftToward{0.3}, Distribution{0.2, 0.8}, Distribution{0.9, 0.1}), {0.5, 0.5});
  expect_dist(merge(ShiftToward{0.3}, Distribution{0.9, 0.1}, Distribution{0.1, 0.9}), {0.6, 0.4});
}

TEST(Merge, ShiftTowardNeedsTwoOutcomes) {
  EXPECT_SPML_ERROR(merge(ShiftToward{0.1}, Distribution::uniform(3), Distribution{0.2, 0.3, 0.5}),
                    ErrorCode::kUnsupported);
}

TEST(Merge, ConvexMix) {
  expect_dist(merge(ConvexMix{0.5}, Distribution{0.6, 0.4}, Distribution{0.4, 0.6}), {0.5, 0.5});
  const Distribution prv{0.1, 0.2, 0.7};
  const Distribution pub{0.5, 0.25, 0.25};
  EXPECT_EQ(merge(ConvexMix{1.0}, prv, pub), prv);
  EXPECT_EQ(merge(ConvexMix{0.0}, prv, pub), pub);
  expect_dist(merge(ConvexMix{0.25}, prv, pub), {0.4, 0.2375, 0.3625});
}

TEST(Merge, OutputsAreDistributions) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const Distribution prv(oracle::random_interior(2, rng, 0.0));
    const Distribution pub(oracle::random_interior(2, rng, 0.0));
    const std::vector<MergeRule> rules{ShiftToward{0.01 + 0.98 * unit(rng)}, ConvexMix{unit(rng)}, PrivateOnly{}};
    for (const MergeRule& rule : rules) {
      const Distribution out = merge(rule, prv, pub);
      EXPECT_NEAR(out[0] + out[1], 1.0, 1e-12);
      EXPECT_GE(out.min_entry(), 0.0);
    }
  }
}

TEST(Merge, RejectsBadParameters) {
  EXPECT_SPML_ERROR(validate(ShiftToward{0.0}), ErrorCode::kDomain);
  EXPECT_SPML_ERROR(validate(ShiftToward{1.0}), ErrorCode::kDomain);
  EXPECT_SPML_ERROR(validate(ConvexMix{-0.1}), ErrorCode::kDomain);
  EXPECT_SPML_ERROR(validate(ConvexMix{1.5}), ErrorCode::kDomain);
  EXPECT_SPML_ERROR(merge(ConvexMix{0.5}, Distribution{0.5, 0.5}, Distribution::uniform(3)), ErrorCode::kDomain);
}

TEST(TrueBelief, ExampleOneAgentTwo) {
  const AgentType a = agent(Distribution{0.8, 0.2}, ExogenousSignal{Distribution{0.45, 0.55}}, ShiftToward{0.1});
  expect_dist(form_true_belief(a, Distribution{0.4, 0.6}), {0.7, 0.3});
}

TEST(TrueBelief, ConvexMixMidpoint) {
  const AgentType a = agent(Distribution{0.6, 0.4}, MarketEstimateSignal{}, ConvexMix{0.5});
  expect_dist(form_true_belief(a, Distribution{0.4, 0.6}), {0.5, 0.5});
}

TEST(TrueBelief, DistrustfulAgentNeverReadsPublicSignal) {
  const AgentType a = agent(Distribution{0.7, 0.3}, MarketEstimateSignal{}, ShiftToward{0.1}, false);
  int reads = 0;
  const EstimateSupplier poisoned = [&reads]() -> Distribution {
    ++reads;
    throw std::logic_error("public signal read");
  };
  expect_dist(form_true_belief(a, poisoned), {0.7, 0.3});
  EXPECT_EQ(reads, 0);

  const AgentType trusting = agent(Distribution{0.7, 0.3}, MarketEstimateSignal{}, ShiftToward{0.1}, true);
  const EstimateSupplier market = [&reads]() {
    ++reads;
    return Distribution{0.51, 0.49};
  };
  expect_dist(form_true_belief(trusting, market), {0.8, 0.2});
  EXPECT_EQ(reads, 1);
}

TEST(Nni, Examples) {
  const ScoringRuleSpec log = ScoringRuleSpec::logarithmic(2);
  const Distribution prv{0.8, 0.2};
  EXPECT_TRUE(nni_holds(log, prv, prv, Distribution{0.5, 0.5}));
  EXPECT_TRUE(nni_holds(log, Distribution{0.5, 0.5}, prv, Distribution{0.5, 0.5}));
  EXPECT_TRUE(nni_holds(log, Distribution{0.6, 0.4}, prv, Distribution{0.5, 0.5}));
  EXPECT_FALSE(nni_holds(log, prv, Distribution{0.6, 0.4}, Distribution{0.5, 0.5}));
}

TEST(Nni, EvaluatedAsWritten) {
  // D(p, nat) <= D(prv, nat) with the varying distribution in the first slot.
  std::mt19937_64 rng(11);
  const ScoringRuleSpec log = ScoringRuleSpec::logarithmic(3);
  for (int trial = 0; trial < 300; ++trial) {
    const oracle::Vec p = oracle::random_interior(3, rng);
    const oracle::Vec prv = oracle::random_interior(3, rng);
    const oracle::Vec nat = oracle::random_interior(3, rng);
    const double gap = oracle::kl(prv, nat) - oracle::kl(p, nat);
    if (std::abs(gap) < 1e-12) continue;
    EXPECT_EQ(nni_holds(log, Distribution(p), Distribution(prv), Distribution(nat)), gap > 0.0);
  }
}

}  // namespace
}  // namespace spml
