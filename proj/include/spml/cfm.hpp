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

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "spml/beliefs.hpp"
#include "spml/distribution.hpp"
#include "spml/market.hpp"
#include "spml/scoring.hpp"

namespace spml {

enum class CostKind { kLmsr };

/// Convex cost function C(q). Only the logarithmic market scoring rule
/// C(q) = b ln sum_j exp(q_j / b) is provided.
struct CostFunctionSpec {
  CostKind kind = CostKind::kLmsr;
  double liquidity = 1.0;

  static CostFunctionSpec lmsr(double liquidity) { return {CostKind::kLmsr, liquidity}; }
  void validate() const;

  friend bool operator==(const CostFunctionSpec&, const CostFunctionSpec&) = default;
};

/// Outstanding shares of each outcome security.
using QuantityVector = std::vector<double>;
/// Shares bought (positive) or sold (negative) in one trade.
using Bundle = std::vector<double>;

double cost(const CostFunctionSpec& spec, std::span<const double> q);
/// Gradient of the cost function: the instantaneous security prices.
Distribution prices(const CostFunctionSpec& spec, std::span<const double> q);
/// C(q + r) - C(q).
double trade_payment(const CostFunctionSpec& spec, std::span<const double> q, std::span<const double> r);
/// sum_i p_i r_i - (C(q + r) - C(q)).
double expected_payoff_cfm(const CostFunctionSpec& spec, const Distribution& belief,
                           std::span<const double> q, std::span<const double> r);
/// Bundle moving prices(q) to `target`. Rejects boundary targets.
Bundle bundle_for_target(const CostFunctionSpec& spec, std::span<const double> q,
                         const Distribution& target);
/// A quantity vector whose prices equal `p` (q_i = b ln p_i).
QuantityVector quantities_for_prices(const CostFunctionSpec& spec, const Distribution& p);

/// Per-outcome difference between moving a logarithmic scoring-rule market
/// from `current` to `target` and buying the equivalent LMSR bundle.
/// Requires zero offsets and rule scale equal to the liquidity.
std::vector<double> equivalence_check(const ScoringRuleSpec& rule, const CostFunctionSpec& spec,
                                      const Distribution& current, const Distribution& target);

struct TradeRecord {
  std::size_t seq = 0;
  AgentId agent;
  Bundle bundle;
  Distribution post_trade_prices;
  std::optional<Distribution> private_estimate;
};

struct TradeLedger {
  CostFunctionSpec cost;
  QuantityVector initial_quantities;
  std::vector<TradeRecord> trades;  ///< seq 1, 2, ...
};

/// Cost-function market recording a trade ledger.
class CfmMarket {
 public:
  CfmMarket(CostFunctionSpec spec, QuantityVector initial_quantities);

  const TradeRecord& trade(const AgentId& agent, Bundle bundle,
                           std::optional<Distribution> private_estimate = std::nullopt);
  /// Buys the bundle that moves prices to `target`.
  const TradeRecord& trade_to(const AgentId& agent, const Distribution& target,
                              std::optional<Distribution> private_estimate = std::nullopt);

  const QuantityVector& quantities() const noexcept { return quantities_; }
  Distribution current_prices() const { return prices(ledger_.cost, quantities_); }
  const TradeLedger& ledger() const noexcept { return ledger_; }

 private:
  TradeLedger ledger_;
  QuantityVector quantities_;
};

/// Scoring-rule ledger implied by a trade ledger: the initial prices become the
/// maker's estimate and each trade's post-trade prices become its report.
/// Throws when recorded prices disagree with a replay of the quantity path.
Ledger implied_report_ledger(const TradeLedger& trades, Protocol protocol);

struct TopUp {
  AgentId agent;
  double target_payment = 0.0;  ///< payment under the chosen settlement protocol
  double cfm_payoff = 0.0;      ///< realised payoff of the agent's trades
  double top_up = 0.0;          ///< target_payment - cfm_payoff (may be negative)
};

/// Cash-equivalent extra payment that equates each agent's realised trading
/// payoff with its payment under `protocol` (AP, NM, APNM or SP).
std::vector<TopUp> sp_topup(const TradeLedger& trades, Protocol protocol, Outcome outcome);

}  // namespace spml
