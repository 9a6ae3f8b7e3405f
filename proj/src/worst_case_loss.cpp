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

// Worst-case-loss functionals. Suprema and infima of s_i over the
// epsilon-interior of the simplex are found numerically: a coarse grid and the
// interior vertices seed the search, then pairwise mass transfers are refined
// by golden-section line search until no transfer improves the objective.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "spml/error.hpp"
#include "spml/scoring.hpp"

namespace spml {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kGolden = 0.6180339887498949;

enum class Sense { kMaximize, kMinimize };

class InteriorSearch {
 public:
  InteriorSearch(const ScoringRuleSpec& rule, std::size_t outcome, double epsilon, Sense sense)
      : rule_(rule), outcome_(outcome), epsilon_(epsilon), sense_(sense) {}

  double run() {
    const std::size_t n = rule_.outcome_count();
    seed_vertices(n);
    seed_grid(n);
    refine(n);
    return sense_ == Sense::kMaximize ? best_value_ : -best_value_;
  }

 private:
  // Objective in "larger is better" form.
  double objective(const std::vector<double>& p) const {
    const double s = score(rule_, Distribution(p), Outcome(outcome_ + 1));
    return sense_ == Sense::kMaximize ? s : -s;
  }

  void offer(const std::vector<double>& p) {
    const double v = objective(p);
    if (best_point_.empty() || v > best_value_) {
      best_value_ = v;
      best_point_ = p;
    }
  }

  void seed_vertices(std::size_t n) {
    const double top = 1.0 - static_cast<double>(n - 1) * epsilon_;
    for (std::size_t k = 0; k < n; ++k) {
      std::vector<double> p(n, epsilon_);
      p[k] = top;
      offer(p);
    }
    offer(std::vector<double>(n, 1.0 / static_cast<double>(n)));
  }

  void seed_grid(std::size_t n) {
    const std::size_t cells = n == 2 ? 200 : n == 3 ? 40 : n == 4 ? 16 : n == 5 ? 10 : 6;
    const double span = 1.0 - static_cast<double>(n) * epsilon_;
    for (const Distribution& g : simplex_grid(n, 1.0 / static_cast<double>(cells))) {
      std::vector<double> p(n);
      for (std::size_t i = 0; i < n; ++i) p[i] = epsilon_ + span * g[i];
      offer(p);
    }
  }

  // Line search over moving mass t from coordinate k to coordinate j.
  bool improve_pair(std::size_t j, std::size_t k) {
    std::vector<double> p = best_point_;
    const double lo = -(p[j] - epsilon_);
    const double hi = p[k] - epsilon_;
    if (!(hi - lo > 0.0)) return false;
    auto at = [&](double t) {
      std::vector<double> q = best_point_;
      q[j] += t;
      q[k] -= t;
      q[j] = std::max(q[j], epsilon_);
      q[k] = std::max(q[k], epsilon_);
      return q;
    };
    double a = lo, b = hi;
    double x1 = b - kGolden * (b - a), x2 = a + kGolden * (b - a);
    double f1 = objective(at(x1)), f2 = objective(at(x2));
    for (int iter = 0; iter < 90 && b - a > 1e-15; ++iter) {
      if (f1 < f2) {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + kGolden * (b - a);
        f2 = objective(at(x2));
      } else {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - kGolden * (b - a);
        f1 = objective(at(x1));
      }
    }
    const double before = best_value_;
    for (double t : {lo, hi, 0.5 * (a + b)}) offer(at(t));
    return best_value_ > before;
  }

  void refine(std::size_t n) {
    for (int sweep = 0; sweep < 60; ++sweep) {
      bool improved = false;
      for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < n; ++k) {
          if (j != k && improve_pair(j, k)) improved = true;
        }
      }
      if (!improved) break;
    }
  }

  const ScoringRuleSpec& rule_;
  std::size_t outcome_;
  double epsilon_;
  Sense sense_;
  std::vector<double> best_point_;
  double best_value_ = -kInf;
};

void check_epsilon(double epsilon, std::size_t n) {
  if (!(epsilon > 0.0) || !(epsilon < 1.0 / static_cast<double>(n))) {
    fail(ErrorCode::kDomain, "epsilon must lie in (0, 1/N)");
  }
}

double sup_score(const ScoringRuleSpec& rule, std::size_t i, double epsilon) {
  return InteriorSearch(rule, i, epsilon, Sense::kMaximize).run();
}

double inf_score(const ScoringRuleSpec& rule, std::size_t i, double epsilon) {
  return InteriorSearch(rule, i, epsilon, Sense::kMinimize).run();
}

}  // namespace

WorstCaseLoss wcl_baseline(const ScoringRuleSpec& rule, const Distribution& initial,
                           double epsilon) {
  rule.validate();
  const std::size_t n = rule.outcome_count();
  if (initial.size() != n) fail(ErrorCode::kDomain, "initial estimate size mismatch");
  check_epsilon(epsilon, n);

  const std::vector<double> start = score_vector(rule, initial);
  WorstCaseLoss wcl;
  wcl.value = -kInf;
  wcl.boundary_limit = -kInf;
  for (std::size_t i = 0; i < n; ++i) {
    const double loss = sup_score(rule, i, epsilon) - start[i];
    if (loss > wcl.value) {
      wcl.value = loss;
      wcl.outcome = Outcome(i + 1);
    }
    double limit = 0.0;
    if (rule.kind == RuleKind::kLogarithmic) {
      // sup of a_i + b ln p_i is a_i, reached at the vertex p_i = 1.
      limit = initial[i] > 0.0 ? -rule.scale * std::log(initial[i]) : kInf;
    } else {
      limit = sup_score(rule, i, 0.0) - start[i];
    }
    wcl.boundary_limit = std::max(wcl.boundary_limit, limit);
  }
  wcl.unbounded = !std::isfinite(wcl.boundary_limit);
  return wcl;
}

WorstCaseLoss wcl_per_agent(const ScoringRuleSpec& rule, std::size_t agent_count,
                            double epsilon) {
  rule.validate();
  const std::size_t n = rule.outcome_count();
  if (agent_count == 0) fail(ErrorCode::kDomain, "agent count must be positive");
  check_epsilon(epsilon, n);

  const double agents = static_cast<double>(agent_count);
  WorstCaseLoss wcl;
  double best_range = -kInf;
  double best_limit = -kInf;
  for (std::size_t i = 0; i < n; ++i) {
    const double range = sup_score(rule, i, epsilon) - inf_score(rule, i, epsilon);
    if (range > best_range) {
      best_range = range;
      wcl.outcome = Outcome(i + 1);
    }
    if (!rule.unbounded_below()) {
      best_limit = std::max(best_limit, sup_score(rule, i, 0.0) - inf_score(rule, i, 0.0));
    }
  }
  wcl.value = agents * best_range;
  wcl.unbounded = rule.unbounded_below();
  wcl.boundary_limit = wcl.unbounded ? kInf : agents * best_limit;
  return wcl;
}

}  // namespace spml
