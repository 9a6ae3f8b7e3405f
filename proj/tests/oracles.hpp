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

// Test-only reference computations. Written directly from the formulas with
// std::log / std::exp, without calling the library's own helpers.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

namespace oracle {

using Vec = std::vector<double>;

inline double log_score(double a, double b, const Vec& p, std::size_t i) { return a + b * std::log(p[i]); }

inline double quadratic_score(double a, double b, const Vec& p, std::size_t i) {
  double squares = 0.0;
  for (double v : p) squares += v * v;
  return a + b * (2.0 * p[i] - squares);
}

/// Sum_i belief_i * (ln report_i - ln previous_i), b = 1.
inline double log_payoff_change(const Vec& belief, const Vec& report, const Vec& previous) {
  double total = 0.0;
  for (std::size_t i = 0; i < belief.size(); ++i) {
    if (belief[i] > 0.0) total += belief[i] * (std::log(report[i]) - std::log(previous[i]));
  }
  return total;
}

/// Kullback-Leibler divergence KL(x || y), the log-rule discrepancy with b = 1.
inline double kl(const Vec& x, const Vec& y) {
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > 0.0) total += x[i] * std::log(x[i] / y[i]);
  }
  return total;
}

/// Uniform point of the simplex (normalised exponentials), pulled toward the
/// centre so every entry is at least floor.
inline Vec random_interior(std::size_t n, std::mt19937_64& rng, double floor = 0.01) {
  std::exponential_distribution<double> draw(1.0);
  Vec p(n);
  for (double& v : p) v = draw(rng);
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  const double keep = 1.0 - floor * static_cast<double>(n);
  for (double& v : p) v = keep * v / total + floor;
  return p;
}

/// All points of the simplex grid with the given number of cells per unit.
inline std::vector<Vec> grid(std::size_t n, std::size_t cells) {
  std::vector<Vec> out;
  std::vector<std::size_t> counts(n, 0);
  auto rec = [&](auto&& self, std::size_t pos, std::size_t left) -> void {
    if (pos + 1 == n) {
      counts[pos] = left;
      Vec p(n);
      for (std::size_t i = 0; i < n; ++i) p[i] = static_cast<double>(counts[i]) / static_cast<double>(cells);
      out.push_back(p);
      return;
    }
    for (std::size_t c = 0; c <= left; ++c) {
      counts[pos] = c;
      self(self, pos + 1, left - c);
    }
  };
  rec(rec, 0, cells);
  return out;
}

/// Brute-force sup over grid points with every entry >= eps of
/// max_i (s_i(p) - s_i(reference)), for a score callback s(p, i).
template <typename Score>
double grid_sup_gain(const Score& s, const Vec& reference, double eps, std::size_t cells) {
  double best = -std::numeric_limits<double>::infinity();
  for (const Vec& p : grid(reference.size(), cells)) {
    if (*std::min_element(p.begin(), p.end()) < eps - 1e-15) continue;
    for (std::size_t i = 0; i < p.size(); ++i) best = std::max(best, s(p, i) - s(reference, i));
  }
  return best;
}

/// LMSR cost evaluated naively (fine for moderate q).
inline double lmsr_cost(double b, const Vec& q) {
  double total = 0.0;
  for (double v : q) total += std::exp(v / b);
  return b * std::log(total);
}

/// Central finite-difference gradient of the LMSR cost.
inline Vec lmsr_gradient(double b, const Vec& q, double h = 1e-5) {
  Vec g(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    Vec up = q;
    Vec down = q;
    up[i] += h;
    down[i] -= h;
    g[i] = (lmsr_cost(b, up) - lmsr_cost(b, down)) / (2.0 * h);
  }
  return g;
}

}  // namespace oracle
