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

// JSON conversions for oracle and settlement types.

#pragma once

#include <span>
#include <string>

#include "json_codec.hpp"
#include "spml/market.hpp"
#include "spml/oracle.hpp"
#include "spml/theorems.hpp"

namespace spml::detail {

json to_json(const ReportRecord& record);
json to_json(const SettlementLine& line);
json ledger_records(Protocol protocol, const ScoringRuleSpec& rule, std::span<const ReportRecord> ledger);
json to_json(const Settlement& settlement);

json to_json(const Strategy& strategy);
Strategy strategy_from_json(const json& value, const std::string& path);

json to_json(const Scenario& scenario);
Scenario scenario_from_json(const json& value, const std::string& path);

json to_json(const StrategySpace& space);
StrategySpace space_from_json(const json& value, const std::string& path);

json to_json(const VerificationReport& report, const Scenario& scenario, std::size_t focal);
json to_json(const TheoremSummary& summary);

}  // namespace spml::detail
