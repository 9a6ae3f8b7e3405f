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
#include <string>
#include <string_view>
#include <vector>

#include "spml/beliefs.hpp"
#include "spml/distribution.hpp"
#include "spml/scoring.hpp"

namespace spml {

/// The five settlement protocols.
///
///   kSrm     sequential shared scoring rule, paid against the previous report
///   kApSrm   arbitrary participation: paid against the most distant report
///   kNmSrm   non-myopic: last report only, against the previous other-agent private report
///   kApNmSrm both: last report only, against the most distant other-agent private report
///   kSpSrm   strategy-proof: best of the final-report and private-report branches
enum class Protocol { kSrm, kApSrm, kNmSrm, kApNmSrm, kSpSrm };

std::string_view to_string(Protocol protocol);
Protocol parse_protocol(std::string_view text);
/// Whether reports must carry a private estimate.
bool takes_private_estimates(Protocol protocol);
/// Whether only an agent's last report is paid.
bool pays_last_report_only(Protocol protocol);

/// Log-rule reports and the initial estimate must keep every entry at or above this.
inline constexpr double kReportInteriorEpsilon = 1e-9;

struct ReportRecord {
  std::size_t seq = 0;
  AgentId agent;
  Distribution final_estimate;
  std::optional<Distribution> private_estimate;
};

/// Append-only record of the market: seq 0 is the maker's initial estimate.
using Ledger = std::vector<ReportRecord>;

/// Throws unless the ledger is well formed for `protocol` and `rule`.
void validate_ledger(Protocol protocol, const ScoringRuleSpec& rule,
                     std::span<const ReportRecord> ledger);

/// An estimate a payment was computed against, e.g. "p_c" or "p_c^2".
struct ReferenceEstimate {
  std::string label;
  std::size_t seq = 0;
  Distribution estimate;
};

/// Outcome-independent part of one agent's settlement. Each branch holds the
/// payment s_i(x) - s_i(reference) for every outcome; the realised payment is
/// the maximum over branches (there is more than one branch only for kSpSrm).
struct SettlementTerms {
  AgentId agent;
  std::size_t report_seq = 0;
  Distribution report;
  std::optional<Distribution> private_report;
  std::vector<ReferenceEstimate> references;
  std::vector<std::vector<double>> branches;

  double payment(Outcome outcome) const;
};

struct SettlementLine {
  AgentId agent;
  std::size_t report_seq = 0;
  double payment = 0.0;
  Distribution report;
  std::optional<Distribution> private_report;
  std::vector<ReferenceEstimate> references;
};

struct Settlement {
  Protocol protocol = Protocol::kSrm;
  Outcome outcome{1};
  std::vector<SettlementLine> lines;
  double maker_loss = 0.0;
};

/// Settlement terms for every paid report, or only `only_agent`'s when given.
/// Lines follow report order (SRM, AP) or the order of each agent's last report.
std::vector<SettlementTerms> settlement_terms(Protocol protocol, const ScoringRuleSpec& rule,
                                              std::span<const ReportRecord> ledger,
                                              const AgentId* only_agent = nullptr);

Settlement settle(Protocol protocol, const ScoringRuleSpec& rule,
                  std::span<const ReportRecord> ledger, Outcome outcome);

Settlement settle_srm(std::span<const ReportRecord> ledger, const ScoringRuleSpec& rule, Outcome outcome);
Settlement settle_ap(std::span<const ReportRecord> ledger, const ScoringRuleSpec& rule, Outcome outcome);
Settlement settle_nm(std::span<const ReportRecord> ledger, const ScoringRuleSpec& rule, Outcome outcome);
Settlement settle_apnm(std::span<const ReportRecord> ledger, const ScoringRuleSpec& rule, Outcome outcome);
Settlement settle_sp(std::span<const ReportRecord> ledger, const ScoringRuleSpec& rule, Outcome outcome);

/// Sum of all line payments.
double maker_loss_realized(const Settlement& settlement);

/// Recomputes a line's payment from its report and recorded references alone.
double audit_payment(Protocol protocol, const ScoringRuleSpec& rule, const SettlementLine& line,
                     Outcome outcome);

/// A single market: open, accept reports in order, then close and settle once.
/// Single writer; a closed market may be read concurrently.
class Market {
 public:
  Market(Protocol protocol, ScoringRuleSpec rule, Distribution initial_estimate);

  void submit(const AgentId& agent, Distribution final_estimate,
              std::optional<Distribution> private_estimate = std::nullopt);
  Settlement close_and_settle(Outcome outcome);

  Protocol protocol() const noexcept { return protocol_; }
  const ScoringRuleSpec& rule() const noexcept { return rule_; }
  const Ledger& ledger() const noexcept { return ledger_; }
  const Distribution& current_estimate() const noexcept { return ledger_.back().final_estimate; }
  bool closed() const noexcept { return closed_; }

 private:
  Protocol protocol_;
  ScoringRuleSpec rule_;
  Ledger ledger_;
  bool closed_ = false;
};

}  // namespace spml
