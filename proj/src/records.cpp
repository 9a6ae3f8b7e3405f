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

#include "spml/records.hpp"

#include <sstream>
#include <vector>

#include "scenario_codec.hpp"

namespace spml {
namespace {

using detail::json;

std::vector<json> parse_lines(std::string_view text) {
  std::vector<json> records;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    ++line_no;
    if (line.find_first_not_of(" \t\r") != std::string_view::npos) {
      try {
        records.push_back(json::parse(line));
      } catch (const json::parse_error& e) {
        fail(ErrorCode::kParse, "line " + std::to_string(line_no) + ": " + e.what());
      }
    }
    start = end + 1;
  }
  return records;
}

std::string compact_estimate(const Distribution& p) {
  std::string out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) out += ';';
    out += detail::format_double(p[i]);
  }
  return out;
}

}  // namespace

namespace detail {

json to_json(const ReportRecord& r) {
  return json{{"type", "report"},
              {"seq", r.seq},
              {"agent_id", r.agent.value},
              {"final_estimate", to_json(r.final_estimate)},
              {"private_estimate", r.private_estimate ? to_json(*r.private_estimate) : json()}};
}

json to_json(const SettlementLine& line) {
  json refs = json::array();
  for (const ReferenceEstimate& ref : line.references) {
    refs.push_back(json{{"label", ref.label}, {"seq", ref.seq}, {"estimate", to_json(ref.estimate)}});
  }
  return json{{"type", "line"},
              {"agent_id", line.agent.value},
              {"report_seq", line.report_seq},
              {"payment", line.payment},
              {"report", to_json(line.report)},
              {"private_report", line.private_report ? to_json(*line.private_report) : json()},
              {"references", refs}};
}

json ledger_records(Protocol protocol, const ScoringRuleSpec& rule, std::span<const ReportRecord> ledger) {
  json out = json::array();
  out.push_back(json{{"type", "market"}, {"protocol", std::string(to_string(protocol))}, {"rule", to_json(rule)}});
  for (const ReportRecord& r : ledger) out.push_back(to_json(r));
  return out;
}

json to_json(const Settlement& settlement) {
  json lines = json::array();
  for (const SettlementLine& line : settlement.lines) lines.push_back(to_json(line));
  return json{{"protocol", std::string(to_string(settlement.protocol))},
              {"outcome", settlement.outcome.one_based()},
              {"maker_loss", settlement.maker_loss},
              {"lines", lines}};
}

}  // namespace detail

std::string write_ledger_jsonl(Protocol protocol, const ScoringRuleSpec& rule,
                               std::span<const ReportRecord> ledger) {
  std::ostringstream out;
  for (const json& record : detail::ledger_records(protocol, rule, ledger)) out << record.dump() << '\n';
  return out.str();
}

LedgerDocument read_ledger_jsonl(std::string_view text) {
  const std::vector<json> records = parse_lines(text);
  if (records.empty()) fail(ErrorCode::kParse, "empty ledger file");
  const json& header = records.front();
  const std::string path = "line 1";
  if (detail::as_string(detail::require(header, "type", path), path + ".type") != "market") {
    detail::invalid(path + ".type", "expected \"market\" header record");
  }
  LedgerDocument doc;
  try {
    doc.protocol = parse_protocol(detail::as_string(detail::require(header, "protocol", path), path + ".protocol"));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kValidation) throw;
    detail::invalid(path + ".protocol", e.what());
  }
  doc.rule = detail::rule_from_json(detail::require(header, "rule", path), path + ".rule");
  for (std::size_t k = 1; k < records.size(); ++k) {
    const json& r = records[k];
    const std::string where = "line " + std::to_string(k + 1);
    if (detail::as_string(detail::require(r, "type", where), where + ".type") != "report") {
      detail::invalid(where + ".type", "expected \"report\" record");
    }
    doc.ledger.push_back(ReportRecord{
        detail::as_index(detail::require(r, "seq", where), where + ".seq"),
        AgentId{detail::as_string(detail::require(r, "agent_id", where), where + ".agent_id")},
        detail::distribution_from_json(detail::require(r, "final_estimate", where), where + ".final_estimate"),
        detail::optional_distribution(r, "private_estimate", where)});
  }
  validate_ledger(doc.protocol, doc.rule, doc.ledger);
  return doc;
}

std::string write_settlement_jsonl(const Settlement& settlement) {
  std::ostringstream out;
  out << json{{"type", "settlement"},
              {"protocol", std::string(to_string(settlement.protocol))},
              {"outcome", settlement.outcome.one_based()},
              {"maker_loss", settlement.maker_loss},
              {"lines", settlement.lines.size()}}
             .dump()
      << '\n';
  for (const SettlementLine& line : settlement.lines) out << detail::to_json(line).dump() << '\n';
  return out.str();
}

std::string write_settlement_csv(const Settlement& settlement) {
  std::ostringstream out;
  out << "agent_id,report_seq,outcome,payment,report,private_report,references\n";
  for (const SettlementLine& line : settlement.lines) {
    out << line.agent.value << ',' << line.report_seq << ',' << settlement.outcome.one_based() << ','
        << detail::format_double(line.payment) << ',' << compact_estimate(line.report) << ','
        << (line.private_report ? compact_estimate(*line.private_report) : std::string()) << ',';
    for (std::size_t k = 0; k < line.references.size(); ++k) {
      const ReferenceEstimate& ref = line.references[k];
      if (k) out << ' ';
      out << ref.label << '@' << ref.seq << '=' << compact_estimate(ref.estimate);
    }
    out << '\n';
  }
  return out.str();
}

std::string write_trade_ledger_jsonl(const TradeLedger& trades) {
  std::ostringstream out;
  out << json{{"type", "cfm"},
              {"cost", {{"kind", "LMSR"}, {"liquidity", trades.cost.liquidity}}},
              {"initial_quantities", detail::number_array(trades.initial_quantities)}}
             .dump()
      << '\n';
  for (const TradeRecord& t : trades.trades) {
    out << json{{"type", "trade"},
                {"seq", t.seq},
                {"agent_id", t.agent.value},
                {"bundle", detail::number_array(t.bundle)},
                {"post_trade_prices", detail::to_json(t.post_trade_prices)},
                {"private_estimate", t.private_estimate ? detail::to_json(*t.private_estimate) : json()}}
               .dump()
        << '\n';
  }
  return out.str();
}

TradeLedger read_trade_ledger_jsonl(std::string_view text) {
  const std::vector<json> records = parse_lines(text);
  if (records.empty()) fail(ErrorCode::kParse, "empty trade ledger file");
  const json& header = records.front();
  const std::string path = "line 1";
  if (detail::as_string(detail::require(header, "type", path), path + ".type") != "cfm") {
    detail::invalid(path + ".type", "expected \"cfm\" header record");
  }
  const json& cost = detail::require(header, "cost", path);
  if (detail::as_string(detail::require(cost, "kind", path + ".cost"), path + ".cost.kind") != "LMSR") {
    detail::invalid(path + ".cost.kind", "only LMSR is supported");
  }
  TradeLedger trades;
  trades.cost = CostFunctionSpec::lmsr(
      detail::as_number(detail::require(cost, "liquidity", path + ".cost"), path + ".cost.liquidity"));
  trades.initial_quantities = detail::numbers_from_json(
      detail::require(header, "initial_quantities", path), path + ".initial_quantities");
  for (std::size_t k = 1; k < records.size(); ++k) {
    const json& r = records[k];
    const std::string where = "line " + std::to_string(k + 1);
    trades.trades.push_back(TradeRecord{
        detail::as_index(detail::require(r, "seq", where), where + ".seq"),
        AgentId{detail::as_string(detail::require(r, "agent_id", where), where + ".agent_id")},
        detail::numbers_from_json(detail::require(r, "bundle", where), where + ".bundle"),
        detail::distribution_from_json(detail::require(r, "post_trade_prices", where),
                                       where + ".post_trade_prices"),
        detail::optional_distribution(r, "private_estimate", where)});
  }
  return trades;
}

}  // namespace spml
