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

#include "spml/market.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "spml/error.hpp"

namespace spml {
namespace {

using Scores = std::vector<double>;

double expect(const Distribution& belief, const Scores& scores) {
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (belief[i] > 0.0) total += belief[i] * scores[i];
  }
  return total;
}

// D(s, x, y) from precomputed score vectors; matches discrepancy().
double gap(const Distribution& x, const Scores& sx, const Scores& sy) {
  const double d = expect(x, sx) - expect(x, sy);
  if (std::isnan(d)) fail(ErrorCode::kDomain, "indeterminate discrepancy during settlement");
  return d;
}

std::vector<double> payment_vector(const Scores& paid, const Scores& charged) {
  std::vector<double> out(paid.size());
  for (std::size_t i = 0; i < paid.size(); ++i) {
    out[i] = paid[i] - charged[i];
    if (std::isnan(out[i])) fail(ErrorCode::kDomain, "indeterminate payment during settlement");
  }
  return out;
}

struct Candidate {
  std::size_t seq;
  const Distribution* estimate;
  const Scores* scores;
};

// Candidate maximising D(s, x, candidate); ties go to the earliest candidate.
const Candidate& most_distant(const Distribution& x, const Scores& sx,
                              const std::vector<Candidate>& candidates) {
  std::size_t best = 0;
  double best_gap = gap(x, sx, *candidates[0].scores);
  for (std::size_t k = 1; k < candidates.size(); ++k) {
    const double g = gap(x, sx, *candidates[k].scores);
    if (g > best_gap) {
      best_gap = g;
      best = k;
    }
  }
  return candidates[best];
}

void check_report(Protocol protocol, const ScoringRuleSpec& rule, const Distribution& final_estimate,
                  const std::optional<Distribution>& private_estimate, const std::string& where) {
  const std::size_t n = rule.outcome_count();
  auto check_one = [&](const Distribution& p, const char* what) {
    if (p.size() != n) {
      fail(ErrorCode::kDomain, where + ": " + what + " has " + std::to_string(p.size()) +
                                   " outcomes, expected " + std::to_string(n));
    }
    if (rule.kind == RuleKind::kLogarithmic && !p.is_interior(kReportInteriorEpsilon)) {
      fail(ErrorCode::kDomain, where + ": " + what +
                                   " must be interior under the logarithmic rule (entries >= 1e-9)");
    }
  };
  check_one(final_estimate, "final estimate");
  if (takes_private_estimates(protocol)) {
    if (!private_estimate) {
      fail(ErrorCode::kProtocol, where + ": protocol " + std::string(to_string(protocol)) +
                                     " requires a private estimate");
    }
    check_one(*private_estimate, "private estimate");
  } else if (private_estimate) {
    fail(ErrorCode::kProtocol, where + ": protocol " + std::string(to_string(protocol)) +
                                   " does not accept a private estimate");
  }
}

SettlementTerms make_terms(const ReportRecord& record) {
  return SettlementTerms{record.agent, record.seq, record.final_estimate, record.private_estimate,
                         {}, {}};
}

}  // namespace

std::string_view to_string(Protocol protocol) {
  switch (protocol) {
    case Protocol::kSrm: return "SRM";
    case Protocol::kApSrm: return "AP_SRM";
    case Protocol::kNmSrm: return "NM_SRM";
    case Protocol::kApNmSrm: return "APNM_SRM";
    case Protocol::kSpSrm: return "SP_SRM";
  }
  return "unknown";
}

Protocol parse_protocol(std::string_view text) {
  for (Protocol p : {Protocol::kSrm, Protocol::kApSrm, Protocol::kNmSrm, Protocol::kApNmSrm,
                     Protocol::kSpSrm}) {
    if (text == to_string(p)) return p;
  }
  fail(ErrorCode::kInvalidArgument, "unknown protocol '" + std::string(text) +
                                        "' (expected SRM, AP_SRM, NM_SRM, APNM_SRM or SP_SRM)");
}

bool takes_private_estimates(Protocol protocol) {
  return protocol == Protocol::kNmSrm || protocol == Protocol::kApNmSrm ||
         protocol == Protocol::kSpSrm;
}

bool pays_last_report_only(Protocol protocol) { return takes_private_estimates(protocol); }

void validate_ledger(Protocol protocol, const ScoringRuleSpec& rule,
                     std::span<const ReportRecord> ledger) {
  rule.validate();
  if (ledger.empty()) fail(ErrorCode::kProtocol, "ledger must start with the maker's record");
  const ReportRecord& maker = ledger.front();
  if (maker.seq != 0 || maker.agent != kMakerId || maker.private_estimate) {
    fail(ErrorCode::kProtocol, "ledger seq 0 must be the maker's initial estimate without a private estimate");
  }
  if (maker.final_estimate.size() != rule.outcome_count()) {
    fail(ErrorCode::kDomain, "initial estimate outcome count does not match the scoring rule");
  }
  if (rule.kind == RuleKind::kLogarithmic && !maker.final_estimate.is_interior(kReportInteriorEpsilon)) {
    fail(ErrorCode::kDomain, "initial estimate must be interior under the logarithmic rule");
  }
  for (std::size_t k = 1; k < ledger.size(); ++k) {
    const ReportRecord& r = ledger[k];
    const std::string where = "ledger record " + std::to_string(k);
    if (r.seq != k) fail(ErrorCode::kProtocol, where + ": sequence number out of order");
    if (r.agent == kMakerId) fail(ErrorCode::kProtocol, where + ": reserved maker identity");
    check_report(protocol, rule, r.final_estimate, r.private_estimate, where);
  }
}

double SettlementTerms::payment(Outcome outcome) const {
  check_outcome(outcome, report.size());
  double best = branches.front()[outcome.zero_based()];
  for (std::size_t b = 1; b < branches.size(); ++b) {
    best = std::max(best, branches[b][outcome.zero_based()]);
  }
  return best;
}

std::vector<SettlementTerms> settlement_terms(Protocol protocol, const ScoringRuleSpec& rule,
                                              std::span<const ReportRecord> ledger,
                                              const AgentId* only_agent) {
  validate_ledger(protocol, rule, ledger);
  const std::size_t count = ledger.size();

  std::vector<Scores> finals(count);
  std::vector<Scores> privates(count);
  for (std::size_t k = 0; k < count; ++k) {
    finals[k] = score_vector(rule, ledger[k].final_estimate);
    if (ledger[k].private_estimate) privates[k] = score_vector(rule, *ledger[k].private_estimate);
  }
  auto wanted = [&](const AgentId& agent) { return only_agent == nullptr || agent == *only_agent; };

  std::vector<SettlementTerms> out;
  if (protocol == Protocol::kSrm || protocol == Protocol::kApSrm) {
    std::vector<Candidate> everything;
    for (std::size_t k = 0; k < count; ++k) {
      everything.push_back({k, &ledger[k].final_estimate, &finals[k]});
    }
    for (std::size_t m = 1; m < count; ++m) {
      const ReportRecord& r = ledger[m];
      if (!wanted(r.agent)) continue;
      SettlementTerms terms = make_terms(r);
      if (protocol == Protocol::kSrm) {
        terms.references.push_back({"p_c", m - 1, ledger[m - 1].final_estimate});
        terms.branches.push_back(payment_vector(finals[m], finals[m - 1]));
      } else {
        const Candidate& ref = most_distant(r.final_estimate, finals[m], everything);
        terms.references.push_back({"p'_c", ref.seq, *ref.estimate});
        terms.branches.push_back(payment_vector(finals[m], *ref.scores));
      }
      out.push_back(std::move(terms));
    }
    return out;
  }

  // Last report of each agent, in ledger order of those last reports.
  std::map<AgentId, std::size_t> last_by_agent;
  for (std::size_t k = 1; k < count; ++k) last_by_agent[ledger[k].agent] = k;
  std::vector<std::size_t> last_reports;
  for (const auto& [agent, k] : last_by_agent) {
    if (wanted(agent)) last_reports.push_back(k);
  }
  std::sort(last_reports.begin(), last_reports.end());

  const Candidate initial{0, &ledger[0].final_estimate, &finals[0]};
  for (std::size_t last : last_reports) {
    const ReportRecord& r = ledger[last];
    SettlementTerms terms = make_terms(r);

    if (protocol == Protocol::kNmSrm) {
      Candidate ref = initial;
      for (std::size_t k = last; k-- > 1;) {
        if (ledger[k].agent != r.agent) {
          ref = {k, &*ledger[k].private_estimate, &privates[k]};
          break;
        }
      }
      terms.references.push_back({"p_c^prv", ref.seq, *ref.estimate});
      terms.branches.push_back(payment_vector(finals[last], *ref.scores));
      out.push_back(std::move(terms));
      continue;
    }

    std::vector<Candidate> others;
    for (std::size_t k = 1; k < count; ++k) {
      if (ledger[k].agent != r.agent) others.push_back({k, &*ledger[k].private_estimate, &privates[k]});
    }
    if (others.empty()) others.push_back(initial);

    if (protocol == Protocol::kApNmSrm) {
      const Candidate& ref = most_distant(r.final_estimate, finals[last], others);
      terms.references.push_back({"p''_c", ref.seq, *ref.estimate});
      terms.branches.push_back(payment_vector(finals[last], *ref.scores));
    } else {
      const Candidate& first = most_distant(r.final_estimate, finals[last], others);
      const Candidate& second = most_distant(*r.private_estimate, privates[last], others);
      terms.references.push_back({"p_c^1", first.seq, *first.estimate});
      terms.references.push_back({"p_c^2", second.seq, *second.estimate});
      terms.branches.push_back(payment_vector(finals[last], *first.scores));
      terms.branches.push_back(payment_vector(privates[last], *second.scores));
    }
    out.push_back(std::move(terms));
  }
  return out;
}

Settlement settle(Protocol protocol, const ScoringRuleSpec& rule,
                  std::span<const ReportRecord> ledger, Outcome outcome) {
  check_outcome(outcome, rule.outcome_count());
  Settlement settlement;
  settlement.protocol = protocol;
  settlement.outcome = outcome;
  for (SettlementTerms& terms : settlement_terms(protocol, rule, ledger)) {
    const double payment = terms.payment(outcome);
    settlement.lines.push_back(SettlementLine{std::move(terms.agent), terms.report_seq, payment,
                                              std::move(terms.report),
                                              std::move(terms.private_report),
                                              std::move(terms.references)});
  }
  settlement.maker_loss = maker_loss_realized(settlement);
  return settlement;
}

Settlement settle_srm(std::span<const ReportRecord> ledger, const ScoringRuleSpec& rule, Outcome outcome) {
  return settle(Protocol::kSrm, rule, ledger, outcome);
}
Settlement settle_ap(std::span<const ReportRecord> ledger, const ScoringRuleSpec& rule, Outcome outcome) {
  return settle(Protocol::kApSrm, rule, ledger, outcome);
}
Settlement settle_nm(std::span<const ReportRecord> ledger, const ScoringRuleSpec& rule, Outcome outcome) {
  return settle(Protocol::kNmSrm, rule, ledger, outcome);
}
Settlement settle_apnm(std::span<const ReportRecord> ledger, const ScoringRuleSpec& rule, Outcome outcome) {
  return settle(Protocol::kApNmSrm, rule, ledger, outcome);
}
Settlement settle_sp(std::span<const ReportRecord> ledger, const ScoringRuleSpec& rule, Outcome outcome) {
  return settle(Protocol::kSpSrm, rule, ledger, outcome);
}

double maker_loss_realized(const Settlement& settlement) {
  double total = 0.0;
  for (const SettlementLine& line : settlement.lines) total += line.payment;
  return total;
}

double audit_payment(Protocol protocol, const ScoringRuleSpec& rule, const SettlementLine& line,
                     Outcome outcome) {
  auto find = [&](std::string_view label) -> const Distribution& {
    for (const ReferenceEstimate& ref : line.references) {
      if (ref.label == label) return ref.estimate;
    }
    fail(ErrorCode::kProtocol, "settlement line lacks reference '" + std::string(label) + "'");
  };
  if (protocol == Protocol::kSpSrm) {
    if (!line.private_report) fail(ErrorCode::kProtocol, "strategy-proof line lacks private report");
    const double first = score(rule, line.report, outcome) - score(rule, find("p_c^1"), outcome);
    const double second =
        score(rule, *line.private_report, outcome) - score(rule, find("p_c^2"), outcome);
    return std::max(first, second);
  }
  if (line.references.empty()) fail(ErrorCode::kProtocol, "settlement line has no reference");
  return score(rule, line.report, outcome) - score(rule, line.references.front().estimate, outcome);
}

Market::Market(Protocol protocol, ScoringRuleSpec rule, Distribution initial_estimate)
    : protocol_(protocol), rule_(std::move(rule)) {
  rule_.validate();
  ledger_.push_back(ReportRecord{0, kMakerId, std::move(initial_estimate), std::nullopt});
  validate_ledger(protocol_, rule_, ledger_);
}

void Market::submit(const AgentId& agent, Distribution final_estimate,
                    std::optional<Distribution> private_estimate) {
  if (closed_) fail(ErrorCode::kState, "market is closed");
  if (agent == kMakerId) fail(ErrorCode::kProtocol, "agents may not use the maker identity");
  check_report(protocol_, rule_, final_estimate, private_estimate,
               "report by '" + agent.value + "'");
  ledger_.push_back(ReportRecord{ledger_.size(), agent, std::move(final_estimate),
                                 std::move(private_estimate)});
}

Settlement Market::close_and_settle(Outcome outcome) {
  if (closed_) fail(ErrorCode::kState, "market already closed and settled");
  check_outcome(outcome, rule_.outcome_count());
  closed_ = true;
  return settle(protocol_, rule_, ledger_, outcome);
}

}  // namespace spml
