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

// Command-line front end. Talks to the library only through the C API.

#include <spml/spml.h>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

// Owns a string handed out by the library.
class Owned {
 public:
  Owned() = default;
  Owned(const Owned&) = delete;
  Owned& operator=(const Owned&) = delete;
  ~Owned() { spml_string_free(ptr_); }
  char** out() { return &ptr_; }
  std::string str() const { return ptr_ ? ptr_ : ""; }

 private:
  char* ptr_ = nullptr;
};

struct Failure {
  int exit_code;
  std::string message;
};

void check(spml_status status) {
  if (status != SPML_OK) {
    throw Failure{status == SPML_VALIDATION || status == SPML_PARSE ? kExitUsage : kExitRuntime,
                  std::string(spml_status_name(status)) + ": " + spml_last_error()};
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{kExitUsage, "cannot read " + path};
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Failure{kExitRuntime, "cannot write " + path.string()};
  out << text;
  spdlog::info("wrote {}", path.string());
}

fs::path prepare_dir(const std::string& dir) {
  fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw Failure{kExitRuntime, "cannot create " + dir + ": " + ec.message()};
  return p;
}

// Shortest round-trip form unless a display precision is requested.
std::string number(double v, int digits = 0) {
  char buffer[40];
  if (digits > 0) {
    std::snprintf(buffer, sizeof buffer, "%.*g", digits, v);
    return buffer;
  }
  const auto res = std::to_chars(buffer, buffer + sizeof buffer, v);
  return std::string(buffer, res.ptr);
}

std::string bracketed(const json& p) {
  std::string out = "[";
  for (std::size_t i = 0; i < p.size(); ++i) out += (i ? " " : "") + number(p[i].get<double>(), 6);
  return out + "]";
}

std::string joined(const json& p) {
  std::string out;
  for (std::size_t i = 0; i < p.size(); ++i) out += (i ? ";" : "") + number(p[i].get<double>());
  return out;
}

std::string ordinal(std::size_t k) {
  const char* suffix = (k % 100 >= 11 && k % 100 <= 13) ? "th" : k % 10 == 1 ? "st" : k % 10 == 2 ? "nd" : k % 10 == 3 ? "rd" : "th";
  return std::to_string(k) + suffix;
}

std::string fixed4(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.4f", v);
  return buffer;
}

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("spml");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::warn);
  if (const char* level = std::getenv("SPML_LOG_LEVEL")) {
    const auto parsed = spdlog::level::from_str(level);
    if (parsed == spdlog::level::off && std::string(level) != "off") {
      spdlog::warn("ignoring unknown SPML_LOG_LEVEL '{}'", level);
    } else {
      spdlog::set_level(parsed);
    }
  }
}

struct Common {
  std::optional<std::uint64_t> seed;
  std::size_t trials = 100;
  std::vector<double> epsilons;
  std::string out_dir;
  std::string format = "csv";
};

int cmd_reproduce(int example, const Common& opts) {
  Owned text;
  int matches = 0;
  check(spml_reproduce_table(example, text.out(), &matches));
  const json table = json::parse(text.str());

  std::ostringstream csv;
  csv << "agent,belief,order,current,report,expected_payoff,rounded\n";
  std::printf("Example %d\n%-6s %-14s %-6s %-14s %-14s %s\n", example, "agent", "p", "order", "p_c", "p'", "EP");
  for (const json& row : table["rows"]) {
    std::printf("%-6s %-14s %-6s %-14s %-14s %s\n", row["agent"].get<std::string>().c_str(),
                bracketed(row["belief"]).c_str(), ordinal(row["order"].get<std::size_t>()).c_str(),
                bracketed(row["current"]).c_str(), bracketed(row["report"]).c_str(),
                fixed4(row["rounded"].get<double>()).c_str());
    csv << row["agent"].get<std::string>() << ',' << joined(row["belief"]) << ',' << row["order"].get<std::size_t>()
        << ',' << joined(row["current"]) << ',' << joined(row["report"]) << ','
        << number(row["expected_payoff"].get<double>()) << ',' << fixed4(row["rounded"].get<double>()) << '\n';
  }
  if (table.contains("net")) std::printf("net    %s\n", fixed4(table["net_rounded"].get<double>()).c_str());

  if (!opts.out_dir.empty()) {
    const fs::path dir = prepare_dir(opts.out_dir);
    const std::string stem = "table" + std::to_string(example);
    if (opts.format == "json") {
      write_file(dir / (stem + ".json"), table.dump(2) + "\n");
    } else {
      write_file(dir / (stem + ".csv"), csv.str());
    }
  }

  if (matches) return 0;
  std::fprintf(stderr, "mismatch against the published table:\n");
  const json& rows = table["rows"];
  const json& published = table["published"];
  for (std::size_t r = 0; r < std::max(rows.size(), published.size()); ++r) {
    const std::string got = r < rows.size() ? fixed4(rows[r]["rounded"].get<double>()) : "-";
    const std::string want = r < published.size() ? fixed4(published[r].get<double>()) : "-";
    std::fprintf(stderr, "  row %zu: got %s, expected %s%s\n", r + 1, got.c_str(), want.c_str(),
                 got == want ? "" : "  <--");
  }
  if (table.contains("net")) {
    std::fprintf(stderr, "  net: got %s, expected %s\n", fixed4(table["net_rounded"].get<double>()).c_str(),
                 fixed4(table["published_net"].get<double>()).c_str());
  }
  return kExitCheckFailed;
}

int cmd_run(const std::string& path, std::size_t outcome, const Common& opts) {
  std::string text = read_file(path);
  if (opts.seed) {
    json doc = json::parse(text, nullptr, false);
    if (doc.is_object()) {
      doc["seed"] = *opts.seed;
      text = doc.dump();
    }
  }
  Owned result;
  check(spml_run_scenario(text.c_str(), outcome, result.out()));
  const json out = json::parse(result.str());
  const json& report = out["report"];

  const fs::path dir = prepare_dir(opts.out_dir.empty() ? "." : opts.out_dir);
  write_file(dir / "ledger.jsonl", out["ledger_jsonl"].get<std::string>());
  if (opts.format == "json") {
    write_file(dir / "settlement.jsonl", out["settlement_jsonl"].get<std::string>());
  } else {
    write_file(dir / "settlement.csv", out["settlement_csv"].get<std::string>());
  }
  write_file(dir / "report.json", report.dump(2) + "\n");

  std::printf("protocol %s, outcome %zu (%s), maker loss %s\n", report["protocol"].get<std::string>().c_str(),
              report["outcome"].get<std::size_t>(), report["outcome_source"].get<std::string>().c_str(),
              number(report["maker_loss"].get<double>(), 6).c_str());
  for (const json& line : report["settlement"]["lines"]) {
    std::printf("  %-8s seq %-3zu payment %s\n", line["agent_id"].get<std::string>().c_str(),
                line["report_seq"].get<std::size_t>(), fixed4(line["payment"].get<double>()).c_str());
  }
  if (report.contains("verification")) {
    const json& v = report["verification"];
    std::printf("focal %s: truthful %s, best deviation %s, truthful is best: %s\n",
                v["focal"].get<std::string>().c_str(), fixed4(v["truthful"]["payoff"].get<double>()).c_str(),
                fixed4(v["best_deviation"]["payoff"].get<double>()).c_str(),
                v["truthful_is_best"].get<bool>() ? "yes" : "no");
  }
  return 0;
}

int cmd_settle(const std::string& path, std::size_t outcome, const Common& opts) {
  const std::string text = read_file(path);
  Owned csv;
  Owned jsonl;
  check(spml_settle_ledger(text.c_str(), outcome, csv.out(), jsonl.out()));
  const std::string body = opts.format == "json" ? jsonl.str() : csv.str();
  if (opts.out_dir.empty()) {
    std::fputs(body.c_str(), stdout);
  } else {
    write_file(prepare_dir(opts.out_dir) / (opts.format == "json" ? "settlement.jsonl" : "settlement.csv"), body);
  }
  return 0;
}

struct WclArgs {
  std::string rule = "logarithmic";
  double scale = 1.0;
  std::string protocol = "SRM";
  std::size_t outcomes = 2;
  std::size_t agents = 1;
  std::vector<double> initial;
};

int cmd_wcl(const WclArgs& args, const Common& opts) {
  if (opts.epsilons.empty()) throw Failure{kExitUsage, "wcl needs at least one --epsilon"};
  if (!args.initial.empty() && args.initial.size() != args.outcomes) {
    throw Failure{kExitUsage, "--initial must have --outcomes entries"};
  }
  Owned rows;
  check(spml_wcl(args.rule.c_str(), args.scale, args.protocol.c_str(), args.outcomes,
                 args.initial.empty() ? nullptr : args.initial.data(), args.agents, opts.epsilons.data(),
                 opts.epsilons.size(), rows.out()));
  const json doc = json::parse(rows.str());
  std::string body;
  if (opts.format == "json") {
    body = doc.dump(2) + "\n";
  } else {
    std::ostringstream csv;
    csv << "epsilon,protocol,wcl,limit,unbounded,baseline_wcl,per_agent_wcl\n";
    for (const json& r : doc["rows"]) {
      const std::string limit = r["limit"].is_string() ? r["limit"].get<std::string>() : number(r["limit"].get<double>());
      csv << number(r["epsilon"].get<double>()) << ',' << r["protocol"].get<std::string>() << ','
          << number(r["wcl"].get<double>()) << ',' << limit << ',' << (r["unbounded"].get<bool>() ? "true" : "false")
          << ',' << number(r["baseline_wcl"].get<double>()) << ',' << number(r["per_agent_wcl"].get<double>()) << '\n';
    }
    body = csv.str();
  }
  if (opts.out_dir.empty()) {
    std::fputs(body.c_str(), stdout);
  } else {
    write_file(prepare_dir(opts.out_dir) / (opts.format == "json" ? "wcl.json" : "wcl.csv"), body);
  }
  return 0;
}

int cmd_verify(const std::string& theorem, const std::string& model, const Common& opts) {
  Owned summary;
  int passed = 0;
  spdlog::info("verifying {} with {} trials", theorem, opts.trials);
  check(spml_verify(theorem.c_str(), opts.trials, opts.seed.value_or(7), model.c_str(), summary.out(), &passed));
  const json doc = json::parse(summary.str());
  const std::string body = doc.dump(2) + "\n";
  std::fputs(body.c_str(), stdout);
  if (!opts.out_dir.empty()) write_file(prepare_dir(opts.out_dir) / ("verify_" + theorem + ".json"), body);
  if (!passed) {
    std::fprintf(stderr, "%s: check failed\n", theorem.c_str());
    return kExitCheckFailed;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Scoring-rule market simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", spml_version());

  Common opts;
  auto add_common = [&](CLI::App* cmd, bool formats) {
    cmd->add_option("--seed", opts.seed, "Random seed");
    cmd->add_option("--out-dir", opts.out_dir, "Directory for output files");
    if (formats) {
      cmd->add_option("--format", opts.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    }
  };

  int example = 0;
  auto* reproduce = app.add_subcommand("reproduce", "Regenerate a worked example table (1, 2 or 3)");
  reproduce->add_option("example", example, "Example number")->required()->check(CLI::Range(1, 3));
  add_common(reproduce, true);

  std::string scenario_path;
  std::size_t outcome = 0;
  auto* run = app.add_subcommand("run", "Play and settle a scenario file");
  run->add_option("scenario", scenario_path, "Scenario JSON file")->required()->check(CLI::ExistingFile);
  run->add_option("--outcome", outcome, "Override the realised outcome (1-based)")->check(CLI::PositiveNumber);
  add_common(run, true);

  std::string ledger_path;
  auto* settle = app.add_subcommand("settle", "Settle a ledger file");
  settle->add_option("ledger", ledger_path, "Ledger JSONL file")->required()->check(CLI::ExistingFile);
  settle->add_option("--outcome", outcome, "Realised outcome (1-based)")->required()->check(CLI::PositiveNumber);
  add_common(settle, true);

  WclArgs wcl_args;
  auto* wcl = app.add_subcommand("wcl", "Worst-case loss of the market maker per epsilon");
  wcl->add_option("--rule", wcl_args.rule, "logarithmic or quadratic");
  wcl->add_option("--scale", wcl_args.scale, "Rule scale b");
  wcl->add_option("--protocol", wcl_args.protocol, "SRM, AP_SRM, NM_SRM, APNM_SRM or SP_SRM");
  wcl->add_option("--outcomes", wcl_args.outcomes, "Number of outcomes");
  wcl->add_option("--agents", wcl_args.agents, "Number of paid agents");
  wcl->add_option("--initial", wcl_args.initial, "Initial estimate (uniform by default)")->delimiter(',');
  wcl->add_option("--epsilon", opts.epsilons, "Interior margins")->delimiter(',')->required();
  add_common(wcl, true);

  std::string theorem;
  std::string model = "branch_belief";
  auto* verify = app.add_subcommand("verify", "Check a theorem: T1, T2, T3, T5, T7, T9 or T11");
  verify->add_option("theorem", theorem, "Theorem id")
      ->required()
      ->check(CLI::IsMember({"T1", "T2", "T3", "T5", "T7", "T9", "T11"}));
  verify->add_option("--trials", opts.trials, "Random scenarios to sample")->check(CLI::PositiveNumber);
  verify->add_option("--model", model, "Payoff model")
      ->check(CLI::IsMember({"branch_belief", "realized_expectation"}));
  add_common(verify, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*reproduce) return cmd_reproduce(example, opts);
    if (*run) return cmd_run(scenario_path, outcome, opts);
    if (*settle) return cmd_settle(ledger_path, outcome, opts);
    if (*wcl) return cmd_wcl(wcl_args, opts);
    if (*verify) return cmd_verify(theorem, model, opts);
  } catch (const Failure& f) {
    std::fprintf(stderr, "error: %s\n", f.message.c_str());
    return f.exit_code;
  } catch (const json::exception& e) {
    std::fprintf(stderr, "error: unexpected library output: %s\n", e.what());
    return kExitRuntime;
  }
  return kExitUsage;
}
