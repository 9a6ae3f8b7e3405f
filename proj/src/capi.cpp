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

#include "spml/spml.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <new>
#include <optional>
#include <string>
#include <vector>

#include "scenario_codec.hpp"
#include "spml/cfm.hpp"
#include "spml/error.hpp"
#include "spml/market.hpp"
#include "spml/paper_examples.hpp"
#include "spml/records.hpp"
#include "spml/scenario_file.hpp"
#include "spml/scoring.hpp"
#include "spml/theorems.hpp"

struct spml_market {
  spml::Market market;
};

namespace {

using spml::detail::json;

thread_local std::string last_error;

template <typename Body>
spml_status guard(Body&& body) {
  try {
    body();
    last_error.clear();
    return SPML_OK;
  } catch (const spml::Error& e) {
    last_error = e.what();
    return static_cast<spml_status>(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
  } catch (const std::exception& e) {
    last_error = e.what();
  }
  return SPML_INTERNAL;
}

void require(const void* pointer, const char* name) {
  if (pointer == nullptr) spml::fail(spml::ErrorCode::kInvalidArgument, std::string(name) + " must not be NULL");
}

char* duplicate(const std::string& text) {
  char* out = static_cast<char*>(std::malloc(text.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, text.c_str(), text.size() + 1);
  return out;
}

spml::Distribution vec(const double* values, std::size_t n, const char* name) {
  require(values, name);
  return spml::Distribution(std::vector<double>(values, values + n));
}

spml::ScoringRuleSpec make_rule(const char* kind, double scale, const double* offsets, std::size_t n) {
  require(kind, "rule");
  spml::ScoringRuleSpec rule;
  rule.kind = spml::parse_rule_kind(kind);
  rule.scale = scale;
  rule.offsets = offsets ? std::vector<double>(offsets, offsets + n) : std::vector<double>(n, 0.0);
  rule.validate();
  return rule;
}

spml::Outcome outcome_of(std::size_t one_based, std::size_t n) {
  spml::Outcome o(one_based);
  spml::check_outcome(o, n);
  return o;
}

json table_to_json(const spml::PaperTable& table) {
  json rows = json::array();
  for (const spml::TableRow& r : table.rows) {
    rows.push_back(json{{"agent", r.agent.value},
                        {"belief", spml::detail::to_json(r.belief)},
                        {"order", r.order},
                        {"current", spml::detail::to_json(r.current)},
                        {"report", spml::detail::to_json(r.report)},
                        {"expected_payoff", r.expected_payoff},
                        {"rounded", spml::round4(r.expected_payoff)}});
  }
  json out{{"example", table.example}, {"rows", rows}, {"published", table.published}, {"matches", table.matches}};
  if (table.net) {
    out["net"] = *table.net;
    out["net_rounded"] = spml::round4(*table.net);
    out["published_net"] = *table.published_net;
  }
  return out;
}

}  // namespace

extern "C" {

const char* spml_version(void) { return "0.1.0"; }

const char* spml_last_error(void) { return last_error.c_str(); }

const char* spml_status_name(spml_status status) {
  switch (status) {
    case SPML_OK: return "ok";
    case SPML_INVALID_ARGUMENT: return "invalid_argument";
    case SPML_DOMAIN: return "domain";
    case SPML_PROTOCOL: return "protocol";
    case SPML_STATE: return "state";
    case SPML_PARSE: return "parse";
    case SPML_VALIDATION: return "validation";
    case SPML_LIMIT: return "limit";
    case SPML_UNSUPPORTED: return "unsupported";
    case SPML_INTERNAL: return "internal";
  }
  return "unknown";
}

void spml_string_free(char* text) { std::free(text); }

spml_status spml_score(const char* rule, double scale, const double* offsets, const double* p, size_t n,
                       size_t outcome, double* out) {
  return guard([&] {
    require(out, "out");
    *out = spml::score(make_rule(rule, scale, offsets, n), vec(p, n, "p"), outcome_of(outcome, n));
  });
}

spml_status spml_discrepancy(const char* rule, double scale, const double* offsets, const double* x,
                             const double* y, size_t n, double* out) {
  return guard([&] {
    require(out, "out");
    *out = spml::discrepancy(make_rule(rule, scale, offsets, n), vec(x, n, "x"), vec(y, n, "y"));
  });
}

spml_status spml_expected_payoff_change(const char* rule, double scale, const double* offsets,
                                        const double* belief, const double* report, const double* previous,
                                        size_t n, double* out) {
  return guard([&] {
    require(out, "out");
    *out = spml::expected_payoff_change(make_rule(rule, scale, offsets, n), vec(belief, n, "belief"),
                                        vec(report, n, "report"), vec(previous, n, "previous"));
  });
}

spml_status spml_market_open(const char* protocol, const char* rule, double scale, const double* offsets,
                             const double* initial, size_t n, spml_market** out) {
  return guard([&] {
    require(out, "out");
    require(protocol, "protocol");
    *out = new spml_market{spml::Market(spml::parse_protocol(protocol), make_rule(rule, scale, offsets, n),
                                        vec(initial, n, "initial"))};
  });
}

spml_status spml_market_submit(spml_market* market, const char* agent_id, const double* final_estimate,
                               const double* private_estimate) {
  return guard([&] {
    require(market, "market");
    require(agent_id, "agent_id");
    const std::size_t n = market->market.rule().outcome_count();
    std::optional<spml::Distribution> priv;
    if (private_estimate) priv = vec(private_estimate, n, "private_estimate");
    market->market.submit(spml::AgentId{agent_id}, vec(final_estimate, n, "final_estimate"), std::move(priv));
  });
}

spml_status spml_market_current_estimate(const spml_market* market, double* out, size_t n) {
  return guard([&] {
    require(market, "market");
    require(out, "out");
    const spml::Distribution& p = market->market.current_estimate();
    if (n != p.size()) spml::fail(spml::ErrorCode::kInvalidArgument, "output size does not match the market");
    for (std::size_t i = 0; i < n; ++i) out[i] = p[i];
  });
}

spml_status spml_market_close_and_settle(spml_market* market, size_t outcome, char** settlement_json) {
  return guard([&] {
    require(market, "market");
    require(settlement_json, "settlement_json");
    const spml::Settlement s =
        market->market.close_and_settle(outcome_of(outcome, market->market.rule().outcome_count()));
    *settlement_json = duplicate(spml::detail::to_json(s).dump());
  });
}

spml_status spml_market_ledger_jsonl(const spml_market* market, char** ledger_jsonl) {
  return guard([&] {
    require(market, "market");
    require(ledger_jsonl, "ledger_jsonl");
    *ledger_jsonl = duplicate(
        spml::write_ledger_jsonl(market->market.protocol(), market->market.rule(), market->market.ledger()));
  });
}

void spml_market_free(spml_market* market) { delete market; }

spml_status spml_settle_ledger(const char* ledger_jsonl, size_t outcome, char** settlement_csv,
                               char** settlement_jsonl) {
  return guard([&] {
    require(ledger_jsonl, "ledger_jsonl");
    const spml::LedgerDocument doc = spml::read_ledger_jsonl(ledger_jsonl);
    const spml::Settlement s =
        spml::settle(doc.protocol, doc.rule, doc.ledger, outcome_of(outcome, doc.rule.outcome_count()));
    std::string csv = spml::write_settlement_csv(s);
    std::string jsonl = spml::write_settlement_jsonl(s);
    if (settlement_csv) *settlement_csv = duplicate(csv);
    if (settlement_jsonl) {
      try {
        *settlement_jsonl = duplicate(jsonl);
      } catch (...) {
        if (settlement_csv) spml_string_free(*settlement_csv);
        throw;
      }
    }
  });
}

spml_status spml_reproduce_table(int example, char** table_json, int* matches) {
  return guard([&] {
    require(table_json, "table_json");
    const spml::PaperTable table = spml::reproduce_table(example);
    *table_json = duplicate(table_to_json(table).dump());
    if (matches) *matches = table.matches ? 1 : 0;
  });
}

spml_status spml_run_scenario(const char* scenario_json, size_t outcome_override, char** result_json) {
  return guard([&] {
    require(scenario_json, "scenario_json");
    require(result_json, "result_json");
    const spml::ScenarioFile file = spml::parse_scenario_file(scenario_json);
    std::optional<spml::Outcome> override_outcome;
    if (outcome_override != 0) override_outcome = spml::Outcome(outcome_override);
    const spml::RunReport report = spml::run_scenario(file, override_outcome);
    const spml::Scenario& s = report.input.scenario;
    json out{{"ledger_jsonl", spml::write_ledger_jsonl(s.protocol, s.rule, report.ledger)},
             {"settlement_csv", spml::write_settlement_csv(report.settlement)},
             {"settlement_jsonl", spml::write_settlement_jsonl(report.settlement)},
             {"report", json::parse(spml::run_report_json(report))}};
    *result_json = duplicate(out.dump());
  });
}

spml_status spml_wcl(const char* rule, double scale, const char* protocol, size_t outcomes, const double* initial,
                     size_t agents, const double* epsilons, size_t count, char** rows_json) {
  return guard([&] {
    require(rows_json, "rows_json");
    require(protocol, "protocol");
    require(epsilons, "epsilons");
    if (agents == 0) spml::fail(spml::ErrorCode::kInvalidArgument, "agent count must be positive");
    const spml::ScoringRuleSpec r = make_rule(rule, scale, nullptr, outcomes);
    const spml::Protocol p = spml::parse_protocol(protocol);
    const spml::Distribution p0 = initial ? vec(initial, outcomes, "initial") : spml::Distribution::uniform(outcomes);
    json rows = json::array();
    for (std::size_t k = 0; k < count; ++k) {
      const spml::WorstCaseLoss base = spml::wcl_baseline(r, p0, epsilons[k]);
      const spml::WorstCaseLoss family = spml::wcl_per_agent(r, agents, epsilons[k]);
      const spml::WorstCaseLoss& chosen = p == spml::Protocol::kSrm ? base : family;
      auto finite = [](double v) { return std::isfinite(v) ? json(v) : json("inf"); };
      rows.push_back(json{{"epsilon", epsilons[k]},
                          {"protocol", std::string(spml::to_string(p))},
                          {"wcl", chosen.value},
                          {"limit", finite(chosen.boundary_limit)},
                          {"unbounded", chosen.unbounded},
                          {"baseline_wcl", base.value},
                          {"per_agent_wcl", family.value}});
    }
    *rows_json = duplicate(json{{"rule", std::string(spml::to_string(r.kind))},
                                {"scale", scale},
                                {"outcomes", outcomes},
                                {"agents", agents},
                                {"initial_estimate", spml::detail::to_json(p0)},
                                {"rows", rows}}
                               .dump());
  });
}

spml_status spml_verify(const char* theorem, size_t trials, uint64_t seed, const char* model, char** summary_json,
                        int* passed) {
  return guard([&] {
    require(theorem, "theorem");
    require(summary_json, "summary_json");
    spml::VerifyOptions options;
    options.trials = trials;
    options.seed = seed;
    if (model) options.model = spml::parse_payoff_model(model);
    const spml::TheoremSummary s = spml::verify_theorem(spml::parse_theorem(theorem), options);
    *summary_json = duplicate(spml::detail::to_json(s).dump());
    if (passed) *passed = s.passed ? 1 : 0;
  });
}

spml_status spml_cfm_topup(const char* trade_ledger_jsonl, const char* protocol, size_t outcome,
                           char** topups_json) {
  return guard([&] {
    require(trade_ledger_jsonl, "trade_ledger_jsonl");
    require(protocol, "protocol");
    require(topups_json, "topups_json");
    const spml::TradeLedger trades = spml::read_trade_ledger_jsonl(trade_ledger_jsonl);
    const spml::Protocol chosen = spml::parse_protocol(protocol);
    const spml::Outcome realized = outcome_of(outcome, trades.initial_quantities.size());
    const auto topups = spml::sp_topup(trades, chosen, realized);
    json out = json::array();
    for (const spml::TopUp& t : topups) {
      out.push_back(json{{"agent_id", t.agent.value},
                         {"target_payment", t.target_payment},
                         {"cfm_payoff", t.cfm_payoff},
                         {"top_up", t.top_up}});
    }
    *topups_json = duplicate(json{{"protocol", std::string(spml::to_string(chosen))},
                                  {"outcome", realized.one_based()},
                                  {"topups", out}}
                                 .dump());
  });
}

}  // extern "C"
