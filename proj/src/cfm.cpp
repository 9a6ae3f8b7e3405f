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

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "spml/error.hpp"

namespace spml {
namespace {

void check_quantities(std::span<const double> q) {
  if (q.size() < 2) fail(ErrorCode::kDomain, "quantity vector needs at least 2 securities");
  for (double v : q) {
    if (!std::isfinite(v)) fail(ErrorCode::kDomain, "quantities must be finite");
  }
}

void check_same_size(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) fail(ErrorCode::kDomain, "quantity and bundle sizes differ");
}

// log p_i(q) via log-softmax.
std::vector<double> log_prices(const CostFunctionSpec& spec, std::span<const double> q) {
  const double b = spec.liquidity;
  double top = q[0] / b;
  for (double v : q) top = std::max(top, v / b);
  double sum = 0.0;
  for (double v : q) sum += std::exp(v / b - top);
  const double log_sum = std::log(sum);
  std::vector<double> out(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) out[i] = q[i] / b - top - log_sum;
  return out;
}

std::vector<double> add(std::span<const double> q, std::span<const double> r) {
  std::vector<double> out(q.begin(), q.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += r[i];
  return out;
}

void check_matching_rule(const ScoringRuleSpec& rule, const CostFunctionSpec& spec) {
  rule.validate();
  spec.validate();
  const bool zero_offsets =
      std::all_of(rule.offsets.begin(), rule.offsets.end(), [](double a) { return a == 0.0; });
  if (rule.kind != RuleKind::kLogarithmic || !zero_offsets ||
      std::abs(rule.scale - spec.liquidity) > 1e-12 * spec.liquidity) {
    fail(ErrorCode::kInvalidArgument,
         "equivalence requires a logarithmic rule with zero offsets and scale equal to the LMSR liquidity");
  }
}

}  // namespace

void CostFunctionSpec::validate() const {
  if (!(liquidity > 0.0) || !std::isfinite(liquidity)) {
    fail(ErrorCode::kDomain, "LMSR liquidity must be a positive finite number");
  }
}

double cost(const CostFunctionSpec& spec, std::span<const double> q) {
  spec.validate();
  check_quantities(q);
  const double b = spec.liquidity;
  double top = q[0] / b;
  for (double v : q) top = std::max(top, v / b);
  double sum = 0.0;
  for (double v : q) sum += std::exp(v / b - top);
  return b * (top + std::log(sum));
}

Distribution prices(const CostFunctionSpec& spec, std::span<const double> q) {
  spec.validate();
  check_quantities(q);
  const double b = spec.liquidity;
  double top = q[0] / b;
  for (double v : q) top = std::max(top, v / b);
  std::vector<double> p(q.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) sum += p[i] = std::exp(q[i] / b - top);
  for (double& v : p) v /= sum;
  return Distribution(std::move(p));
}

double trade_payment(const CostFunctionSpec& spec, std::span<const double> q, std::span<const double> r) {
  check_same_size(q, r);
  check_quantities(r);
  return cost(spec, add(q, r)) - cost(spec, q);
}

double expected_payoff_cfm(const CostFunctionSpec& spec, const Distribution& belief,
                           std::span<const double> q, std::span<const double> r) {
  check_same_size(q, r);
  if (belief.size() != q.size()) fail(ErrorCode::kDomain, "belief and quantity sizes differ");
  double payout = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) payout += belief[i] * r[i];
  return payout - trade_payment(spec, q, r);
}

Bundle bundle_for_target(const CostFunctionSpec& spec, std::span<const double> q,
                         const Distribution& target) {
  spec.validate();
  check_quantities(q);
  if (target.size() != q.size()) fail(ErrorCode::kDomain, "target and quantity sizes differ");
  if (!(target.min_entry() > 0.0)) {
    fail(ErrorCode::kDomain, "target prices on the simplex boundary need an infinite bundle");
  }
  const std::vector<double> current = log_prices(spec, q);
  Bundle r(q.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    r[i] = spec.liquidity * (std::log(target[i]) - current[i]);
  }
  return r;
}

QuantityVector quantities_for_prices(const CostFunctionSpec& spec, const Distribution& p) {
  spec.validate();
  if (!(p.min_entry() > 0.0)) fail(ErrorCode::kDomain, "boundary prices are not reachable");
  QuantityVector q(p.size());
  for (std::size_t i = 0; i < q.size(); ++i) q[i] = spec.liquidity * std::log(p[i]);
  return q;
}

std::vector<double> equivalence_check(const ScoringRuleSpec& rule, const CostFunctionSpec& spec,
                                      const Distribution& current, const Distribution& target) {
  check_matching_rule(rule, spec);
  if (current.size() != rule.outcome_count() || target.size() != rule.outcome_count()) {
    fail(ErrorCode::kDomain, "distribution sizes do not match the scoring rule");
  }
  const QuantityVector q = quantities_for_prices(spec, current);
  const Bundle r = bundle_for_target(spec, q, target);
  const double paid = trade_payment(spec, q, r);
  std::vector<double> diff(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    const Outcome outcome(i + 1);
    const double scoring_side = score(rule, target, outcome) - score(rule, current, outcome);
    const double trading_side = r[i] - paid;
    diff[i] = scoring_side - trading_side;
  }
  return diff;
}

CfmMarket::CfmMarket(CostFunctionSpec spec, QuantityVector initial_quantities)
    : ledger_{spec, initial_quantities, {}}, quantities_(std::move(initial_quantities)) {
  spec.validate();
  check_quantities(quantities_);
}

const TradeRecord& CfmMarket::trade(const AgentId& agent, Bundle bundle,
                                    std::optional<Distribution> private_estimate) {
  check_same_size(quantities_, bundle);
  check_quantities(bundle);
  if (agent == kMakerId) fail(ErrorCode::kProtocol, "agents may not use the maker identity");
  if (private_estimate && private_estimate->size() != quantities_.size()) {
    fail(ErrorCode::kDomain, "private estimate size mismatch");
  }
  quantities_ = add(quantities_, bundle);
  ledger_.trades.push_back(TradeRecord{ledger_.trades.size() + 1, agent, std::move(bundle),
                                       prices(ledger_.cost, quantities_), std::move(private_estimate)});
  return ledger_.trades.back();
}

const TradeRecord& CfmMarket::trade_to(const AgentId& agent, const Distribution& target,
                                       std::optional<Distribution> private_estimate) {
  return trade(agent, bundle_for_target(ledger_.cost, quantities_, target), std::move(private_estimate));
}

Ledger implied_report_ledger(const TradeLedger& trades, Protocol protocol) {
  trades.cost.validate();
  check_quantities(trades.initial_quantities);
  QuantityVector q = trades.initial_quantities;
  Ledger ledger;
  ledger.push_back(ReportRecord{0, kMakerId, prices(trades.cost, q), std::nullopt});
  for (std::size_t k = 0; k < trades.trades.size(); ++k) {
    const TradeRecord& t = trades.trades[k];
    const std::string where = "trade " + std::to_string(k + 1);
    if (t.seq != k + 1) fail(ErrorCode::kProtocol, where + ": sequence number out of order");
    check_same_size(q, t.bundle);
    q = add(q, t.bundle);
    Distribution replayed = prices(trades.cost, q);
    if (!replayed.approx_equal(t.post_trade_prices)) {
      fail(ErrorCode::kProtocol, where + ": recorded post-trade prices do not follow from the quantity path");
    }
    std::optional<Distribution> private_estimate;
    if (takes_private_estimates(protocol)) {
      if (!t.private_estimate) {
        fail(ErrorCode::kProtocol, where + ": protocol " + std::string(to_string(protocol)) +
                                       " needs the trader's private estimate");
      }
      private_estimate = t.private_estimate;
    }
    ledger.push_back(ReportRecord{k + 1, t.agent, std::move(replayed), std::move(private_estimate)});
  }
  return ledger;
}

std::vector<TopUp> sp_topup(const TradeLedger& trades, Protocol protocol, Outcome outcome) {
  if (protocol == Protocol::kSrm) {
    fail(ErrorCode::kInvalidArgument, "top-ups are defined against AP, NM, APNM or SP settlement");
  }
  check_outcome(outcome, trades.initial_quantities.size());
  ScoringRuleSpec rule = ScoringRuleSpec::logarithmic(trades.initial_quantities.size(), trades.cost.liquidity);
  const Ledger ledger = implied_report_ledger(trades, protocol);
  const Settlement settlement = settle(protocol, rule, ledger, outcome);

  std::vector<TopUp> out;
  std::map<AgentId, std::size_t> index;
  auto entry = [&](const AgentId& agent) -> TopUp& {
    auto [it, inserted] = index.try_emplace(agent, out.size());
    if (inserted) out.push_back(TopUp{agent, 0.0, 0.0, 0.0});
    return out[it->second];
  };
  QuantityVector q = trades.initial_quantities;
  for (const TradeRecord& t : trades.trades) {
    entry(t.agent).cfm_payoff += t.bundle[outcome.zero_based()] - trade_payment(trades.cost, q, t.bundle);
    q = add(q, t.bundle);
  }
  for (const SettlementLine& line : settlement.lines) entry(line.agent).target_payment += line.payment;
  for (TopUp& t : out) t.top_up = t.target_payment - t.cfm_payoff;
  return out;
}

}  // namespace spml
