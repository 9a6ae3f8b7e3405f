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

#include "spml/cfm.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "test_util.hpp"

namespace spml {
namespace {

const CostFunctionSpec kUnit = CostFunctionSpec::lmsr(1.0);

oracle::Vec random_q(std::size_t n, std::mt19937_64& rng, double spread = 3.0) {
  std::uniform_real_distribution<double> draw(-spread, spread);
  oracle::Vec q(n);
  for (double& v : q) v = draw(rng);
  return q;
}

TEST(Cost, Values) {
  EXPECT_NEAR(cost(kUnit, std::vector<double>{0.0, 0.0}), std::log(2.0), 1e-12);
  EXPECT_NEAR(cost(kUnit, std::vector<double>{1.0, 0.0}), 1.313262, 1e-6);
  EXPECT_NEAR(cost(kUnit, std::vector<double>{2.5, 2.5}), 2.5 + std::log(2.0), 1e-12);
}

TEST(Cost, OverflowSafe) {
  const double c = cost(kUnit, std::vector<double>{1000.0, 999.0});
  EXPECT_NEAR(c, 1000.0 + std::log1p(std::exp(-1.0)), 1e-9);
  const Distribution p = prices(kUnit, std::vector<double>{1000.0, 999.0});
  EXPECT_NEAR(p[0], 1.0 / (1.0 + std::exp(-1.0)), 1e-12);
}

TEST(Cost, MatchesNaiveFormulaAndTranslates) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + trial % 3;
    const double b = 0.5 + (trial % 4);
    const CostFunctionSpec spec = CostFunctionSpec::lmsr(b);
    const oracle::Vec q = random_q(n, rng);
    EXPECT_NEAR(cost(spec, q), oracle::lmsr_cost(b, q), 1e-12);
    oracle::Vec shifted = q;
    for (double& v : shifted) v += 1.75;
    EXPECT_NEAR(cost(spec, shifted), cost(spec, q) + 1.75, 1e-12);
    EXPECT_TRUE(prices(spec, shifted).approx_equal(prices(spec, q), 1e-12));
  }
}

TEST(Cost, Convex) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const oracle::Vec a = random_q(3, rng);
    const oracle::Vec b = random_q(3, rng);
    const double lambda = unit(rng);
    oracle::Vec mix(3);
    for (std::size_t i = 0; i < 3; ++i) mix[i] = lambda * a[i] + (1.0 - lambda) * b[i];
    EXPECT_LE(cost(kUnit, mix), lambda * cost(kUnit, a) + (1.0 - lambda) * cost(kUnit, b) + 1e-9);
  }
}

TEST(Prices, Values) {
  EXPECT_EQ(prices(kUnit, std::vector<double>{0.0, 0.0}), (Distribution{0.5, 0.5}));
  const CostFunctionSpec spec = CostFunctionSpec::lmsr(2.0);
  const Distribution p = prices(spec, std::vector<double>{2.0 * std::log(7.0), 2.0 * std::log(3.0)});
  EXPECT_NEAR(p[0], 0.7, 1e-12);
  EXPECT_NEAR(p[1], 0.3, 1e-12);
}

TEST(Prices, AreTheCostGradient) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + trial % 3;
    const double b = 1.0 + 0.5 * (trial % 3);
    const oracle::Vec q = random_q(n, rng);
    const Distribution p = prices(CostFunctionSpec::lmsr(b), q);
    const oracle::Vec g = oracle::lmsr_gradient(b, q);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(p[i], g[i], 1e-6 * p[i]);
  }
}

TEST(Trade, PaymentAndPayoff) {
  const std::vector<double> q{0.3, -0.2};
  EXPECT_EQ(trade_payment(kUnit, q, std::vector<double>{0.0, 0.0}), 0.0);
  EXPECT_NEAR(trade_payment(kUnit, q, std::vector<double>{0.8, 0.8}), 0.8, 1e-12);
  const Distribution belief{0.35, 0.65};
  EXPECT_EQ(expected_payoff_cfm(kUnit, belief, q, std::vector<double>{0.0, 0.0}), 0.0);
  EXPECT_NEAR(expected_payoff_cfm(kUnit, belief, q, std::vector<double>{0.8, 0.8}), 0.0, 1e-12);
}

TEST(Trade, BestBundleMovesPricesToBelief) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> step(0.0, 1e-3);
  for (int trial = 0; trial < 50; ++trial) {
    const oracle::Vec q = random_q(3, rng, 1.0);
    const Distribution belief(oracle::random_interior(3, rng, 0.05));
    const Bundle best = bundle_for_target(kUnit, q, belief);
    const double top = expected_payoff_cfm(kUnit, belief, q, best);
    for (int probe = 0; probe < 20; ++probe) {
      Bundle r = best;
      for (double& v : r) v += step(rng);
      EXPECT_LE(expected_payoff_cfm(kUnit, belief, q, r), top + 1e-12);
    }
  }
}

TEST(Bundle, ClosedForm) {
  const Bundle r = bundle_for_target(kUnit, std::vector<double>{0.0, 0.0}, Distribution{0.7, 0.3});
  EXPECT_NEAR(r[0], std::log(1.4), 1e-12);
  EXPECT_NEAR(r[1], std::log(0.6), 1e-12);
  const std::vector<double> q{0.4, -1.1, 2.0};
  const Bundle zero = bundle_for_target(kUnit, q, prices(kUnit, q));
  for (double v : zero) EXPECT_NEAR(v, 0.0, 1e-12);
}

TEST(Bundle, ReachesTargetAndComposes) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + trial % 3;
    const CostFunctionSpec spec = CostFunctionSpec::lmsr(0.5 + trial % 3);
    const oracle::Vec q = random_q(n, rng);
    const Distribution p1(oracle::random_interior(n, rng));
    const Distribution p2(oracle::random_interior(n, rng));
    oracle::Vec via = q;
    const Bundle r1 = bundle_for_target(spec, q, p1);
    for (std::size_t i = 0; i < n; ++i) via[i] += r1[i];
    EXPECT_TRUE(prices(spec, via).approx_equal(p1, 1e-12));
    const Bundle r2 = bundle_for_target(spec, via, p2);
    for (std::size_t i = 0; i < n; ++i) via[i] += r2[i];
    oracle::Vec direct = q;
    const Bundle r3 = bundle_for_target(spec, q, p2);
    for (std::size_t i = 0; i < n; ++i) direct[i] += r3[i];
    EXPECT_TRUE(prices(spec, via).approx_equal(prices(spec, direct), 1e-12));
  }
}

TEST(Bundle, RejectsBoundaryTarget) {
  EXPECT_SPML_ERROR(bundle_for_target(kUnit, std::vector<double>{0.0, 0.0}, Distribution{1.0, 0.0}), ErrorCode::kDomain);
  EXPECT_SPML_ERROR(bundle_for_target(kUnit, std::vector<double>{0.0}, Distribution{0.5, 0.5}), ErrorCode::kDomain);
}

TEST(Quantities, InvertPrices) {
  const CostFunctionSpec spec = CostFunctionSpec::lmsr(1.5);
  const Distribution p{0.2, 0.3, 0.5};
  EXPECT_TRUE(prices(spec, quantities_for_prices(spec, p)).approx_equal(p, 1e-12));
}

TEST(Equivalence, ExampleAndIdentity) {
  const ScoringRuleSpec rule = ScoringRuleSpec::logarithmic(2);
  for (double d : equivalence_check(rule, kUnit, Distribution{0.5, 0.5}, Distribution{0.7, 0.3})) EXPECT_NEAR(d, 0.0, 1e-9);
  for (double d : equivalence_check(rule, kUnit, Distribution{0.3, 0.7}, Distribution{0.3, 0.7})) EXPECT_NEAR(d, 0.0, 1e-12);
}

TEST(Equivalence, IndependentSides) {
  // Scoring-rule side with std::log, market side with the naive cost.
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + trial % 3;
    const double b = 0.5 + trial % 4;
    const oracle::Vec pc = oracle::random_interior(n, rng);
    const oracle::Vec p = oracle::random_interior(n, rng);
    oracle::Vec q(n);
    oracle::Vec r(n);
    for (std::size_t i = 0; i < n; ++i) {
      q[i] = b * std::log(pc[i]);
      r[i] = b * (std::log(p[i]) - std::log(pc[i]));
    }
    oracle::Vec moved(n);
    for (std::size_t i = 0; i < n; ++i) moved[i] = q[i] + r[i];
    const double paid = oracle::lmsr_cost(b, moved) - oracle::lmsr_cost(b, q);
    const std::vector<double> diff =
        equivalence_check(ScoringRuleSpec::logarithmic(n, b), CostFunctionSpec::lmsr(b), Distribution(pc), Distribution(p));
    for (std::size_t i = 0; i < n; ++i) {
      const double srm = b * (std::log(p[i]) - std::log(pc[i]));
      EXPECT_NEAR(srm - (r[i] - paid), 0.0, 1e-9);
      EXPECT_NEAR(diff[i], 0.0, 1e-9);
    }
  }
}

TEST(Equivalence, RejectsMismatchedParameters) {
  const Distribution a{0.5, 0.5};
  const Distribution b{0.6, 0.4};
  EXPECT_SPML_ERROR(equivalence_check(ScoringRuleSpec::logarithmic(2, 2.0), kUnit, a, b), ErrorCode::kInvalidArgument);
  EXPECT_SPML_ERROR(equivalence_check(ScoringRuleSpec::quadratic(2), kUnit, a, b), ErrorCode::kInvalidArgument);
  ScoringRuleSpec shifted = ScoringRuleSpec::logarithmic(2);
  shifted.offsets = {1.0, 0.0};
  EXPECT_SPML_ERROR(equivalence_check(shifted, kUnit, a, b), ErrorCode::kInvalidArgument);
}

TEST(CfmMarket, RecordsTrades) {
  CfmMarket m(kUnit, {0.0, 0.0});
  const TradeRecord& t = m.trade_to(AgentId{"1"}, Distribution{0.4, 0.6});
  EXPECT_EQ(t.seq, 1u);
  EXPECT_TRUE(t.post_trade_prices.approx_equal(Distribution{0.4, 0.6}, 1e-12));
  EXPECT_TRUE(m.current_prices().approx_equal(Distribution{0.4, 0.6}, 1e-12));
  EXPECT_SPML_ERROR(m.trade(kMakerId, {0.1, 0.0}), ErrorCode::kProtocol);
  EXPECT_SPML_ERROR(m.trade(AgentId{"2"}, {0.1, 0.0, 0.0}), ErrorCode::kDomain);
  EXPECT_EQ(m.ledger().trades.size(), 1u);
}

TEST(ImpliedLedger, MapsPricesToReports) {
  CfmMarket m(kUnit, {0.0, 0.0});
  m.trade_to(AgentId{"1"}, Distribution{0.4, 0.6}, Distribution{0.4, 0.6});
  m.trade_to(AgentId{"2"}, Distribution{0.7, 0.3}, Distribution{0.8, 0.2});
  const Ledger sp = implied_report_ledger(m.ledger(), Protocol::kSpSrm);
  ASSERT_EQ(sp.size(), 3u);
  EXPECT_EQ(sp[0].agent, kMakerId);
  EXPECT_TRUE(sp[0].final_estimate.approx_equal(Distribution{0.5, 0.5}, 1e-12));
  EXPECT_TRUE(sp[2].final_estimate.approx_equal(Distribution{0.7, 0.3}, 1e-12));
  EXPECT_EQ(sp[2].private_estimate, (Distribution{0.8, 0.2}));
  const Ledger ap = implied_report_ledger(m.ledger(), Protocol::kApSrm);
  EXPECT_FALSE(ap[2].private_estimate.has_value());
}

TEST(ImpliedLedger, DetectsInconsistentPrices) {
  CfmMarket m(kUnit, {0.0, 0.0});
  m.trade_to(AgentId{"1"}, Distribution{0.4, 0.6}, Distribution{0.4, 0.6});
  TradeLedger tampered = m.ledger();
  tampered.trades[0].post_trade_prices = Distribution{0.45, 0.55};
  EXPECT_SPML_ERROR(implied_report_ledger(tampered, Protocol::kSpSrm), ErrorCode::kProtocol);
  EXPECT_SPML_ERROR(sp_topup(tampered, Protocol::kSpSrm, Outcome(1)), ErrorCode::kProtocol);

  TradeLedger missing = m.ledger();
  missing.trades[0].private_estimate.reset();
  EXPECT_SPML_ERROR(implied_report_ledger(missing, Protocol::kNmSrm), ErrorCode::kProtocol);
}

TEST(TopUp, SingleTraderNeedsNothing) {
  CfmMarket m(kUnit, {0.0, 0.0});
  m.trade_to(AgentId{"1"}, Distribution{0.3, 0.7}, Distribution{0.3, 0.7});
  for (Protocol protocol : {Protocol::kApSrm, Protocol::kNmSrm, Protocol::kApNmSrm, Protocol::kSpSrm}) {
    for (std::size_t i = 1; i <= 2; ++i) {
      const std::vector<TopUp> t = sp_topup(m.ledger(), protocol, Outcome(i));
      ASSERT_EQ(t.size(), 1u);
      EXPECT_NEAR(t[0].top_up, 0.0, 1e-9) << to_string(protocol);
    }
  }
  EXPECT_SPML_ERROR(sp_topup(m.ledger(), Protocol::kSrm, Outcome(1)), ErrorCode::kInvalidArgument);
}

TEST(TopUp, TwoTraderReplay) {
  CfmMarket m(kUnit, {0.0, 0.0});
  m.trade_to(AgentId{"1"}, Distribution{0.4, 0.6}, Distribution{0.4, 0.6});
  m.trade_to(AgentId{"2"}, Distribution{0.7, 0.3}, Distribution{0.8, 0.2});
  const std::vector<TopUp> t = sp_topup(m.ledger(), Protocol::kSpSrm, Outcome(1));
  ASSERT_EQ(t.size(), 2u);

  // Trader payoffs straight from the naive cost function.
  const TradeLedger& L = m.ledger();
  oracle::Vec q = L.initial_quantities;
  std::vector<double> cfm_payoff;
  for (const TradeRecord& trade : L.trades) {
    oracle::Vec next = q;
    for (std::size_t i = 0; i < q.size(); ++i) next[i] += trade.bundle[i];
    cfm_payoff.push_back(trade.bundle[0] - (oracle::lmsr_cost(1.0, next) - oracle::lmsr_cost(1.0, q)));
    q = next;
  }
  EXPECT_NEAR(cfm_payoff[1], std::log(0.7 / 0.4), 1e-9);

  // Agent 2: max(ln .7 - ln .4, ln .8 - ln .4); agent 1: both references are [0.8, 0.2].
  EXPECT_EQ(t[1].agent.value, "2");
  EXPECT_NEAR(t[1].target_payment, std::log(0.8 / 0.4), 1e-12);
  EXPECT_NEAR(t[1].cfm_payoff, cfm_payoff[1], 1e-9);
  EXPECT_NEAR(t[1].top_up, std::log(8.0 / 7.0), 1e-9);
  EXPECT_NEAR(t[0].target_payment, std::log(0.4 / 0.8), 1e-12);
  EXPECT_NEAR(t[0].top_up, std::log(0.4 / 0.8) - cfm_payoff[0], 1e-9);
}

TEST(TopUp, NonNegativeInExpectationAgainstChainedPayment) {
  // Each trader trades once, reporting its post-trade prices as its private
  // estimate, so the previous prices are another trader's private estimate.
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + trial % 3;
    CfmMarket m(kUnit, QuantityVector(n, 0.0));
    const std::size_t traders = 2 + trial % 4;
    for (std::size_t k = 0; k < traders; ++k) {
      const Distribution target(oracle::random_interior(n, rng, 0.02));
      const Distribution prv = k % 2 ? Distribution(oracle::random_interior(n, rng, 0.02)) : target;
      m.trade_to(AgentId{std::to_string(k)}, target, prv);
    }
    std::vector<std::vector<TopUp>> by_outcome;
    for (std::size_t i = 1; i <= n; ++i) by_outcome.push_back(sp_topup(m.ledger(), Protocol::kSpSrm, Outcome(i)));
    for (std::size_t k = 1; k < traders; ++k) {
      if (!m.ledger().trades[k - 1].private_estimate->approx_equal(m.ledger().trades[k - 1].post_trade_prices)) continue;
      const Distribution& report = m.ledger().trades[k].post_trade_prices;
      double expected = 0.0;
      for (std::size_t i = 0; i < n; ++i) expected += report[i] * by_outcome[i][k].top_up;
      EXPECT_GE(expected, -1e-9) << "trial " << trial << " trader " << k;
    }
  }
}

}  // namespace
}  // namespace spml
