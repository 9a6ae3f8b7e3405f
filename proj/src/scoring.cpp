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

#include "spml/scoring.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "spml/error.hpp"

namespace spml {
namespace {

void check_size(const ScoringRuleSpec& rule, const Distribution& p) {
  if (p.size() != rule.outcome_count()) {
    fail(ErrorCode::kDomain, "distribution has " + std::to_string(p.size()) +
                                 " outcomes, scoring rule expects " +
                                 std::to_string(rule.outcome_count()));
  }
}

double checked(double value, const char* what) {
  if (std::isnan(value)) fail(ErrorCode::kDomain, std::string("indeterminate value in ") + what);
  return value;
}

double sum_of_squares(const Distribution& p) {
  double total = 0.0;
  for (double v : p.probs()) total += v * v;
  return total;
}

}  // namespace

std::string_view to_string(RuleKind kind) {
  switch (kind) {
    case RuleKind::kLogarithmic: return "logarithmic";
    case RuleKind::kQuadratic: return "quadratic";
  }
  return "unknown";
}

RuleKind parse_rule_kind(std::string_view text) {
  if (text == "logarithmic" || text == "log") return RuleKind::kLogarithmic;
  if (text == "quadratic" || text == "brier") return RuleKind::kQuadratic;
  fail(ErrorCode::kInvalidArgument, "unknown scoring rule '" + std::string(text) + "'");
}

ScoringRuleSpec ScoringRuleSpec::logarithmic(std::size_t outcome_count, double scale) {
  ScoringRuleSpec rule{RuleKind::kLogarithmic, std::vector<double>(outcome_count, 0.0), scale};
  rule.validate();
  return rule;
}

ScoringRuleSpec ScoringRuleSpec::quadratic(std::size_t outcome_count, double scale) {
  ScoringRuleSpec rule{RuleKind::kQuadratic, std::vector<double>(outcome_count, 0.0), scale};
  rule.validate();
  return rule;
}

void ScoringRuleSpec::validate() const {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    fail(ErrorCode::kDomain, "scoring rule scale must be a positive finite number");
  }
  if (offsets.size() < 2) fail(ErrorCode::kDomain, "scoring rule needs at least 2 outcomes");
  for (double a : offsets) {
    if (!std::isfinite(a)) fail(ErrorCode::kDomain, "scoring rule offsets must be finite");
  }
}

std::vector<double> score_vector(const ScoringRuleSpec& rule, const Distribution& p) {
  check_size(rule, p);
  std::vector<double> scores(p.size());
  switch (rule.kind) {
    case RuleKind::kLogarithmic:
      for (std::size_t i = 0; i < p.size(); ++i) {
        scores[i] = p[i] > 0.0 ? rule.offsets[i] + rule.scale * std::log(p[i])
                               : -std::numeric_limits<double>::infinity();
      }
      break;
    case RuleKind::kQuadratic: {
      const double sq = sum_of_squares(p);
      for (std::size_t i = 0; i < p.size(); ++i) {
        scores[i] = rule.offsets[i] + rule.scale * (2.0 * p[i] - sq);
      }
      break;
    }
  }
  return scores;
}

double score(const ScoringRuleSpec& rule, const Distribution& p, Outcome outcome) {
  check_outcome(outcome, rule.outcome_count());
  check_size(rule, p);
  const std::size_t i = outcome.zero_based();
  switch (rule.kind) {
    case RuleKind::kLogarithmic:
      return p[i] > 0.0 ? rule.offsets[i] + rule.scale * std::log(p[i])
                        : -std::numeric_limits<double>::infinity();
    case RuleKind::kQuadratic:
      return rule.offsets[i] + rule.scale * (2.0 * p[i] - sum_of_squares(p));
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double expected_score(const ScoringRuleSpec& rule, const Distribution& belief,
                      const Distribution& report) {
  check_size(rule, belief);
  const std::vector<double> s = score_vector(rule, report);
  double total = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (belief[i] > 0.0) total += belief[i] * s[i];
  }
  return checked(total, "expected score");
}

double uncertainty(const ScoringRuleSpec& rule, const Distribution& x) {
  return expected_score(rule, x, x);
}

double discrepancy(const ScoringRuleSpec& rule, const Distribution& x, const Distribution& y) {
  return checked(uncertainty(rule, x) - expected_score(rule, x, y), "discrepancy");
}

double expected_payoff_change(const ScoringRuleSpec& rule, const Distribution& belief,
                              const Distribution& report, const Distribution& previous) {
  check_size(rule, belief);
  const std::vector<double> after = score_vector(rule, report);
  const std::vector<double> before = score_vector(rule, previous);
  double total = 0.0;
  for (std::size_t i = 0; i < after.size(); ++i) {
    if (belief[i] > 0.0) total += belief[i] * checked(after[i] - before[i], "score difference");
  }
  return checked(total, "expected payoff change");
}

std::size_t grid_cells(double step) {
  if (!(step > 0.0) || step > 1.0) fail(ErrorCode::kDomain, "grid step must lie in (0, 1]");
  const double cells = std::round(1.0 / step);
  if (std::abs(cells * step - 1.0) > 1e-9) {
    fail(ErrorCode::kDomain, "grid step must divide 1 into an integer number of cells");
  }
  return static_cast<std::size_t>(cells);
}

std::vector<Distribution> simplex_grid(std::size_t outcome_count, double step) {
  if (outcome_count < 2) fail(ErrorCode::kDomain, "grid needs at least 2 outcomes");
  const std::size_t cells = grid_cells(step);
  std::vector<Distribution> grid;
  std::vector<std::size_t> counts(outcome_count, 0);
  // Enumerate compositions of `cells` into `outcome_count` parts, lexicographically.
  auto emit = [&] {
    std::vector<double> probs(outcome_count);
    for (std::size_t i = 0; i < outcome_count; ++i) {
      probs[i] = static_cast<double>(counts[i]) / static_cast<double>(cells);
    }
    grid.emplace_back(std::move(probs));
  };
  std::function<void(std::size_t, std::size_t)> recurse = [&](std::size_t pos, std::size_t left) {
    if (pos + 1 == outcome_count) {
      counts[pos] = left;
      emit();
      return;
    }
    for (std::size_t c = 0; c <= left; ++c) {
      counts[pos] = c;
      recurse(pos + 1, left - c);
    }
  };
  recurse(0, cells);
  return grid;
}

PropernessResult properness_check(const ScoreFunction& score_fn, std::size_t outcome_count,
                                  double grid_step) {
  const std::vector<Distribution> grid = simplex_grid(outcome_count, grid_step);
  std::vector<std::vector<double>> scores;
  scores.reserve(grid.size());
  for (const Distribution& p : grid) {
    std::vector<double> s(outcome_count);
    for (std::size_t i = 0; i < outcome_count; ++i) s[i] = score_fn(p, i);
    scores.push_back(std::move(s));
  }
  auto expect = [&](std::size_t belief, std::size_t report) {
    double total = 0.0;
    for (std::size_t i = 0; i < outcome_count; ++i) {
      if (grid[belief][i] > 0.0) total += grid[belief][i] * scores[report][i];
    }
    return total;
  };

  PropernessResult result;
  for (std::size_t b = 0; b < grid.size(); ++b) {
    const double truthful = expect(b, b);
    for (std::size_t r = 0; r < grid.size(); ++r) {
      if (r == b) continue;
      ++result.pairs_checked;
      const double gain = expect(b, r) - truthful;
      if (gain > 1e-12) {
        result.proper = false;
        ++result.violations;
        result.worst_violation = std::max(result.worst_violation, gain);
      }
      if (!(gain < 0.0)) result.strictly_proper = false;
    }
  }
  if (!result.proper) result.strictly_proper = false;
  return result;
}

PropernessResult properness_check(const ScoringRuleSpec& rule, double grid_step) {
  rule.validate();
  return properness_check(
      [&rule](const Distribution& p, std::size_t i) { return score(rule, p, Outcome(i + 1)); },
      rule.outcome_count(), grid_step);
}

}  // namespace spml
