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
#include <functional>
#include <string_view>
#include <vector>

#include "spml/distribution.hpp"

namespace spml {

enum class RuleKind { kLogarithmic, kQuadratic };

std::string_view to_string(RuleKind kind);
RuleKind parse_rule_kind(std::string_view text);

/// A proper scoring rule with per-outcome offsets a_i and positive scale b.
///
///   logarithmic: s_i(p) = a_i + b ln p_i
///   quadratic:   s_i(p) = a_i + b (2 p_i - sum_j p_j^2)
struct ScoringRuleSpec {
  RuleKind kind = RuleKind::kLogarithmic;
  std::vector<double> offsets;
  double scale = 1.0;

  static ScoringRuleSpec logarithmic(std::size_t outcome_count, double scale = 1.0);
  static ScoringRuleSpec quadratic(std::size_t outcome_count, double scale = 1.0);

  std::size_t outcome_count() const noexcept { return offsets.size(); }
  /// Throws Error(kDomain) unless scale > 0, offsets are finite and N >= 2.
  void validate() const;
  /// Whether some score is -infinity on the simplex boundary.
  bool unbounded_below() const noexcept { return kind == RuleKind::kLogarithmic; }

  friend bool operator==(const ScoringRuleSpec&, const ScoringRuleSpec&) = default;
};

// Scores are extended reals. -infinity is a legal value (log rule at p_i = 0);
// any operation that would produce NaN throws Error(kDomain) instead.

double score(const ScoringRuleSpec& rule, const Distribution& p, Outcome outcome);
/// s(p) for every outcome at once.
std::vector<double> score_vector(const ScoringRuleSpec& rule, const Distribution& p);

/// E(s, p, p') = sum_i p_i s_i(p'). Terms with p_i = 0 contribute nothing.
double expected_score(const ScoringRuleSpec& rule, const Distribution& belief,
                      const Distribution& report);

/// S(s, x) = E(s, x, x).
double uncertainty(const ScoringRuleSpec& rule, const Distribution& x);

/// D(s, x, y) = sum_i x_i s_i(x) - sum_i x_i s_i(y). May be +infinity.
double discrepancy(const ScoringRuleSpec& rule, const Distribution& x, const Distribution& y);

/// E(s, p, p', p_c) = sum_i p_i (s_i(p') - s_i(p_c)), summed term by term.
double expected_payoff_change(const ScoringRuleSpec& rule, const Distribution& belief,
                              const Distribution& report, const Distribution& previous);

/// Arbitrary score function, used to check rules that are not ScoringRuleSpecs.
using ScoreFunction = std::function<double(const Distribution&, std::size_t zero_based_outcome)>;

struct PropernessResult {
  bool proper = true;
  bool strictly_proper = true;
  /// Largest amount by which some report beat the truthful report (0 if none).
  double worst_violation = 0.0;
  std::size_t pairs_checked = 0;
  std::size_t violations = 0;
};

/// All points of the simplex grid with spacing `step` (1/step must be an integer).
std::vector<Distribution> simplex_grid(std::size_t outcome_count, double step);
/// Throws Error(kDomain) unless `step` divides 1 into an integer number of cells.
std::size_t grid_cells(double step);

/// Exhaustive check of E(s,p,p) >= E(s,p,p') - 1e-12 over grid pairs.
PropernessResult properness_check(const ScoringRuleSpec& rule, double grid_step);
PropernessResult properness_check(const ScoreFunction& score, std::size_t outcome_count,
                                  double grid_step);

/// Worst-case loss estimate over the epsilon-interior of the simplex.
struct WorstCaseLoss {
  double value = 0.0;           ///< supremum restricted to the epsilon-interior
  double boundary_limit = 0.0;  ///< limit as epsilon -> 0; +infinity when unbounded
  bool unbounded = false;
  Outcome outcome{1};           ///< outcome attaining the maximum
};

/// max_i sup_p (s_i(p) - s_i(p_0)) for the single-payment market.
WorstCaseLoss wcl_baseline(const ScoringRuleSpec& rule, const Distribution& initial,
                           double epsilon);

/// n * max_i sup_{p, p_c} (s_i(p) - s_i(p_c)) for markets paying every agent.
WorstCaseLoss wcl_per_agent(const ScoringRuleSpec& rule, std::size_t agent_count,
                            double epsilon);

}  // namespace spml
