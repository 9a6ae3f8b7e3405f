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

#include <span>
#include <string>
#include <string_view>

#include "spml/cfm.hpp"
#include "spml/market.hpp"

namespace spml {

// Line-oriented JSON record formats. Every file starts with a header record
// ("type": "market" / "settlement" / "cfm") followed by one record per line.
// Numbers are written with enough digits to round-trip exactly.

struct LedgerDocument {
  Protocol protocol = Protocol::kSrm;
  ScoringRuleSpec rule;
  Ledger ledger;
};

std::string write_ledger_jsonl(Protocol protocol, const ScoringRuleSpec& rule,
                               std::span<const ReportRecord> ledger);
/// Parses and validates a ledger file; errors name the offending line.
LedgerDocument read_ledger_jsonl(std::string_view text);

std::string write_settlement_jsonl(const Settlement& settlement);
/// agent_id,report_seq,outcome,payment,report,private_report,references
std::string write_settlement_csv(const Settlement& settlement);

std::string write_trade_ledger_jsonl(const TradeLedger& trades);
TradeLedger read_trade_ledger_jsonl(std::string_view text);

}  // namespace spml
