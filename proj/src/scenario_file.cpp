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

#include "spml/scenario_file.hpp"

#include <cstdint>
#include <random>

#include "scenario_codec.hpp"
#include "spml/error.hpp"

namespace spml {
namespace detail {
namespace {

std::string item(const std::string& path, std::size_t index) {
  return path + "[" + std::to_string(index) + "]";
}

// Distribution with the rule's outcome count; interior when the rule is unbounded below.
Distribution reported(const json& value, const std::string& path, const ScoringRuleSpec& rule) {
  Distribution p = distribution_from_json(value, path);
  if (p.size() != rule.outcome_count()) {
    invalid(path, "expected " + std::to_string(rule.outcome_count()) + " entries, got " + std::to_string(p.size()));
  }
  if (rule.unbounded_below() && !p.is_interior(kReportInteriorEpsilon)) {
    invalid(path, "entries must be at least 1e-9 under the logarithmic rule");
  }
  return p;
}

json participation_json(const Participation& p) {
  json out{{"slot", p.slot}, {"final", to_json(p.reported_final)}};
  if (p.reported_private) out["private"] = to_json(*p.reported_private);
  return out;
}

std::vector<Participation> participations_from_json(const json& value, const std::string& path,
                                                    const ScoringRuleSpec& rule, bool needs_private,
                                                    Protocol protocol) {
  if (!value.is_array() || value.empty()) invalid(path, "expected a non-empty array");
  std::vector<Participation> out;
  for (std::size_t k = 0; k < value.size(); ++k) {
    const std::string where = item(path, k);
    const json& p = value[k];
    Participation part{as_index(require(p, "slot", where), field(where, "slot")),
                       reported(require(p, "final", where), field(where, "final"), rule), std::nullopt};
    if (p.contains("private") && !p["private"].is_null()) {
      part.reported_private = reported(p["private"], field(where, "private"), rule);
    } else if (needs_private) {
      invalid(field(where, "private"), "private estimate required under " + std::string(to_string(protocol)));
    }
    out.push_back(std::move(part));
  }
  return out;
}

json agent_json(const ScenarioAgent& agent) {
  const AgentType& type = agent.type;
  json out{{"id", type.id.value}, {"private_signal", to_json(type.private_signal)}};
  if (const auto* ex = std::get_if<ExogenousSignal>(&type.public_source)) {
    out["public_signal"] = json{{"source", "exogenous"}, {"estimate", to_json(ex->estimate)}};
  } else {
    out["public_signal"] = json{{"source", "market"}};
  }
  if (std::holds_alternative<PrivateOnly>(type.merge)) {
    out["merge"] = json{{"rule", "private_only"}};
  } else if (const auto* shift = std::get_if<ShiftToward>(&type.merge)) {
    out["merge"] = json{{"rule", "shift_toward"}, {"delta", shift->delta}};
  } else {
    out["merge"] = json{{"rule", "convex_mix"}, {"lambda", std::get<ConvexMix>(type.merge).lambda}};
  }
  out["believes_nni"] = type.believes_nni;
  if (agent.script) {
    json parts = json::array();
    for (const Participation& p : agent.script->participations) parts.push_back(participation_json(p));
    out["behavior"] = json{{"type", "scripted"}, {"slot", agent.scheduled_slot}, {"participations", parts}};
  } else {
    out["behavior"] = json{{"type", "truthful"}, {"slot", agent.scheduled_slot}};
  }
  return out;
}

ScenarioAgent agent_from_json(const json& value, const std::string& path, const ScoringRuleSpec& rule,
                              Protocol protocol) {
  ScenarioAgent agent;
  AgentType& type = agent.type;
  type.id = AgentId{as_string(require(value, "id", path), field(path, "id"))};
  if (type.id.value.empty() || type.id == kMakerId) invalid(field(path, "id"), "empty or reserved agent id");
  type.private_signal = reported(require(value, "private_signal", path), field(path, "private_signal"), rule);

  const std::string pub_path = field(path, "public_signal");
  const json& pub = require(value, "public_signal", path);
  const std::string source = as_string(require(pub, "source", pub_path), field(pub_path, "source"));
  if (source == "exogenous") {
    const std::string est = field(pub_path, "estimate");
    Distribution e = distribution_from_json(require(pub, "estimate", pub_path), est);
    if (e.size() != rule.outcome_count()) invalid(est, "size does not match the rule");
    type.public_source = ExogenousSignal{std::move(e)};
  } else if (source == "market") {
    type.public_source = MarketEstimateSignal{};
  } else {
    invalid(field(pub_path, "source"), "expected \"exogenous\" or \"market\"");
  }

  const std::string merge_path = field(path, "merge");
  const json& merge = require(value, "merge", path);
  const std::string kind = as_string(require(merge, "rule", merge_path), field(merge_path, "rule"));
  if (kind == "private_only") {
    type.merge = PrivateOnly{};
  } else if (kind == "shift_toward") {
    type.merge = ShiftToward{as_number(require(merge, "delta", merge_path), field(merge_path, "delta"))};
  } else if (kind == "convex_mix") {
    type.merge = ConvexMix{as_number(require(merge, "lambda", merge_path), field(merge_path, "lambda"))};
  } else {
    invalid(field(merge_path, "rule"), "expected \"private_only\", \"shift_toward\" or \"convex_mix\"");
  }
  try {
    validate(type.merge);
  } catch (const Error& e) {
    invalid(merge_path, e.what());
  }
  if (value.contains("believes_nni")) type.believes_nni = as_bool(value["believes_nni"], field(path, "believes_nni"));

  const std::string behavior_path = field(path, "behavior");
  const json& behavior = require(value, "behavior", path);
  const std::string btype = as_string(require(behavior, "type", behavior_path), field(behavior_path, "type"));
  if (btype == "truthful") {
    agent.scheduled_slot = as_index(require(behavior, "slot", behavior_path), field(behavior_path, "slot"));
  } else if (btype == "scripted") {
    Strategy script{participations_from_json(require(behavior, "participations", behavior_path),
                                             field(behavior_path, "participations"), rule,
                                             takes_private_estimates(protocol), protocol)};
    agent.scheduled_slot = behavior.contains("slot")
                               ? as_index(behavior["slot"], field(behavior_path, "slot"))
                               : script.participations.front().slot;
    agent.script = std::move(script);
  } else {
    invalid(field(behavior_path, "type"), "expected \"truthful\" or \"scripted\"");
  }
  return agent;
}

json strategy_entry(const Strategy& strategy, double payoff) {
  return json{{"strategy", to_json(strategy)}, {"payoff", payoff}};
}

json coverage_json(const Coverage& c) {
  json out = to_json(c.space);
  out["outcomes"] = c.outcomes;
  out["scenarios"] = c.scenarios;
  return out;
}

}  // namespace

json to_json(const Strategy& strategy) {
  json parts = json::array();
  for (const Participation& p : strategy.participations) parts.push_back(participation_json(p));
  return json{{"participations", parts}};
}

Strategy strategy_from_json(const json& value, const std::string& path) {
  const json& parts = require(value, "participations", path);
  const std::string parts_path = field(path, "participations");
  if (!parts.is_array() || parts.empty()) invalid(parts_path, "expected a non-empty array");
  Strategy s;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const std::string where = item(parts_path, k);
    s.participations.push_back(Participation{as_index(require(parts[k], "slot", where), field(where, "slot")),
                                             distribution_from_json(require(parts[k], "final", where), field(where, "final")),
                                             optional_distribution(parts[k], "private", where)});
  }
  return s;
}

json to_json(const Scenario& s) {
  json agents = json::array();
  for (const ScenarioAgent& a : s.agents) agents.push_back(agent_json(a));
  json out{{"protocol", std::string(to_string(s.protocol))},
           {"rule", to_json(s.rule)},
           {"initial_estimate", to_json(s.initial_estimate)},
           {"slot_count", s.slot_count},
           {"agents", agents}};
  if (s.nature) out["nature"] = to_json(*s.nature);
  if (s.realized_outcome) out["outcome"] = s.realized_outcome->one_based();
  return out;
}

Scenario scenario_from_json(const json& value, const std::string& path) {
  Scenario s;
  const std::string protocol_path = field(path, "protocol");
  try {
    s.protocol = parse_protocol(as_string(require(value, "protocol", path), protocol_path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kValidation) throw;
    invalid(protocol_path, e.what());
  }
  s.rule = rule_from_json(require(value, "rule", path), field(path, "rule"));
  s.initial_estimate = reported(require(value, "initial_estimate", path), field(path, "initial_estimate"), s.rule);
  s.slot_count = as_index(require(value, "slot_count", path), field(path, "slot_count"));

  const std::string agents_path = field(path, "agents");
  const json& agents = require(value, "agents", path);
  if (!agents.is_array() || agents.empty()) invalid(agents_path, "expected a non-empty array");
  for (std::size_t a = 0; a < agents.size(); ++a) {
    s.agents.push_back(agent_from_json(agents[a], item(agents_path, a), s.rule, s.protocol));
  }
  if (value.contains("nature") && !value["nature"].is_null()) {
    const std::string nature_path = field(path, "nature");
    s.nature = distribution_from_json(value["nature"], nature_path);
    if (s.nature->size() != s.rule.outcome_count()) invalid(nature_path, "size does not match the rule");
  }
  if (value.contains("outcome") && !value["outcome"].is_null()) {
    const std::string outcome_path = field(path, "outcome");
    const std::size_t o = as_index(value["outcome"], outcome_path);
    if (o < 1 || o > s.rule.outcome_count()) {
      invalid(outcome_path, "outcome must lie in 1.." + std::to_string(s.rule.outcome_count()));
    }
    s.realized_outcome = Outcome(o);
  }
  try {
    s.validate();
  } catch (const Error& e) {
    invalid(path.empty() ? "scenario" : path, e.what());
  }
  return s;
}

json to_json(const StrategySpace& space) {
  json out{{"report_grid_step", space.report_grid_step},
           {"max_participations", space.max_participations},
           {"allow_timing_choice", space.allow_timing_choice},
           {"allow_false_private", space.allow_false_private},
           {"cap", space.cap}};
  out["bluff_grid_step"] = space.bluff_grid_step ? json(*space.bluff_grid_step) : json();
  return out;
}

StrategySpace space_from_json(const json& value, const std::string& path) {
  if (!value.is_object()) invalid(path, "expected an object");
  StrategySpace space;
  if (value.contains("report_grid_step")) {
    space.report_grid_step = as_number(value["report_grid_step"], field(path, "report_grid_step"));
  }
  if (value.contains("max_participations")) {
    space.max_participations = as_index(value["max_participations"], field(path, "max_participations"));
  }
  if (value.contains("allow_timing_choice")) {
    space.allow_timing_choice = as_bool(value["allow_timing_choice"], field(path, "allow_timing_choice"));
  }
  if (value.contains("allow_false_private")) {
    space.allow_false_private = as_bool(value["allow_false_private"], field(path, "allow_false_private"));
  }
  if (value.contains("bluff_grid_step") && !value["bluff_grid_step"].is_null()) {
    space.bluff_grid_step = as_number(value["bluff_grid_step"], field(path, "bluff_grid_step"));
  }
  if (value.contains("cap")) space.cap = as_index(value["cap"], field(path, "cap"));
  try {
    space.validate();
  } catch (const Error& e) {
    invalid(path, e.what());
  }
  return space;
}

json to_json(const VerificationReport& report, const Scenario& scenario, std::size_t focal) {
  return json{{"focal", scenario.agents[focal].type.id.value},
              {"truthful", strategy_entry(report.truthful, report.truthful_payoff)},
              {"best_deviation", strategy_entry(report.best_deviation, report.best_deviation_payoff)},
              {"margin", report.margin},
              {"branch_margins", number_array(report.branch_margins)},
              {"truthful_is_best", report.truthful_is_best},
              {"strategies_evaluated", report.strategies_evaluated}};
}

json to_json(const TheoremSummary& s) {
  json coverage = json::array();
  for (const Coverage& c : s.coverage) coverage.push_back(coverage_json(c));
  json out{{"theorem", std::string(to_string(s.theorem))},
           {"claim", s.manipulability ? "manipulable" : "truthful"},
           {"protocol", std::string(to_string(s.protocol))},
           {"passed", s.passed},
           {"trials", s.trials},
           {"seed", s.seed},
           {"payoff_model", std::string(to_string(s.model))},
           {"conditions", s.conditions},
           {"coverage", coverage},
           {"max_agents", s.max_agents},
           {"scenarios_checked", s.scenarios_checked},
           {"strategies_evaluated", s.strategies_evaluated},
           {"violations", s.violations},
           {"worst_margin", s.worst_margin}};
  if (s.witness) {
    const Witness& w = *s.witness;
    out[s.manipulability ? "witness" : "counterexample"] =
        json{{"origin", w.origin},
             {"focal", w.scenario.agents[w.focal].type.id.value},
             {"truthful", strategy_entry(w.truthful, w.truthful_payoff)},
             {"deviation", strategy_entry(w.deviation, w.deviation_payoff)},
             {"gain", w.deviation_payoff - w.truthful_payoff},
             {"branch_margins", number_array(w.branch_margins)},
             {"scenario", to_json(w.scenario)},
             {"ledger", ledger_records(w.scenario.protocol, w.scenario.rule, w.ledger)}};
  }
  return out;
}

}  // namespace detail

using detail::json;

ScenarioFile parse_scenario_file(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::kParse, std::string("scenario file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) detail::invalid("(root)", "expected an object");
  ScenarioFile file;
  const json& version = detail::require(doc, "schema_version", "");
  if (!version.is_number_integer() || version.get<long long>() != kScenarioSchemaVersion) {
    detail::invalid("schema_version", "unsupported version " + version.dump() + " (expected 1)");
  }
  if (doc.contains("seed")) file.seed = detail::as_index(doc["seed"], "seed");
  file.scenario = detail::scenario_from_json(doc, "");
  if (doc.contains("space") && !doc["space"].is_null()) file.space = detail::space_from_json(doc["space"], "space");
  if (doc.contains("focal") && !doc["focal"].is_null()) {
    file.focal = AgentId{detail::as_string(doc["focal"], "focal")};
    try {
      file.scenario.agent_index(*file.focal);
    } catch (const Error& e) {
      detail::invalid("focal", e.what());
    }
  }
  if (doc.contains("payoff_model")) {
    try {
      file.model = parse_payoff_model(detail::as_string(doc["payoff_model"], "payoff_model"));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kValidation) throw;
      detail::invalid("payoff_model", e.what());
    }
  }
  return file;
}

std::string scenario_file_json(const ScenarioFile& file) {
  json out{{"schema_version", file.schema_version}, {"seed", file.seed}};
  out.update(detail::to_json(file.scenario));
  if (file.space) out["space"] = detail::to_json(*file.space);
  if (file.focal) out["focal"] = file.focal->value;
  out["payoff_model"] = std::string(to_string(file.model));
  return out.dump(2) + "\n";
}

namespace {

// Inverse-CDF draw with a 53-bit uniform, identical on every platform.
Outcome sample_outcome(const Distribution& nature, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  double cumulative = 0.0;
  for (std::size_t i = 0; i < nature.size(); ++i) {
    cumulative += nature[i];
    if (u < cumulative) return Outcome(i + 1);
  }
  for (std::size_t i = nature.size(); i-- > 0;) {
    if (nature[i] > 0.0) return Outcome(i + 1);
  }
  return Outcome(nature.size());
}

}  // namespace

RunReport run_scenario(const ScenarioFile& file, std::optional<Outcome> outcome_override) {
  const Scenario& s = file.scenario;
  s.validate();
  RunReport report;
  report.input = file;
  if (outcome_override) {
    check_outcome(*outcome_override, s.rule.outcome_count());
    report.outcome = *outcome_override;
    report.outcome_source = "override";
  } else if (s.realized_outcome) {
    report.outcome = *s.realized_outcome;
    report.outcome_source = "scenario";
  } else if (s.nature) {
    report.outcome = sample_outcome(*s.nature, file.seed);
    report.outcome_source = "sampled";
  } else {
    fail(ErrorCode::kInvalidArgument, "no outcome: set \"outcome\" or \"nature\" in the scenario, or pass an override");
  }

  report.ledger = play(s).ledger;
  report.settlement = settle(s.protocol, s.rule, report.ledger, report.outcome);
  const std::vector<SettlementTerms> terms = settlement_terms(s.protocol, s.rule, report.ledger);
  for (std::size_t a = 0; a < s.agents.size(); ++a) {
    AgentPayoff payoff{s.agents[a].type.id, true_belief(s, a), 0.0};
    for (const SettlementTerms& t : terms) {
      if (t.agent != payoff.agent) continue;
      for (std::size_t i = 0; i < payoff.belief.size(); ++i) {
        if (payoff.belief[i] != 0.0) payoff.expected_payment += payoff.belief[i] * t.payment(Outcome(i + 1));
      }
    }
    report.payoffs.push_back(std::move(payoff));
  }
  if (file.space) {
    report.focal = file.focal ? s.agent_index(*file.focal) : 0;
    report.verification = best_response(s, report.focal, *file.space, file.model);
  }
  return report;
}

std::string run_report_json(const RunReport& report) {
  const Scenario& s = report.input.scenario;
  json payoffs = json::array();
  for (const AgentPayoff& p : report.payoffs) {
    payoffs.push_back(json{{"agent_id", p.agent.value},
                           {"belief", detail::to_json(p.belief)},
                           {"expected_payment", p.expected_payment}});
  }
  json out{{"schema_version", kScenarioSchemaVersion},
           {"seed", report.input.seed},
           {"protocol", std::string(to_string(s.protocol))},
           {"rule", detail::to_json(s.rule)},
           {"outcome", report.outcome.one_based()},
           {"outcome_source", report.outcome_source},
           {"ledger", detail::ledger_records(s.protocol, s.rule, report.ledger)},
           {"settlement", detail::to_json(report.settlement)},
           {"maker_loss", report.settlement.maker_loss},
           {"expected_payoffs", payoffs}};
  if (report.verification) out["verification"] = detail::to_json(*report.verification, s, report.focal);
  return out.dump(2) + "\n";
}

}  // namespace spml
