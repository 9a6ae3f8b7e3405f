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

#include "spml/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "spml/error.hpp"

namespace spml {

void check_outcome(Outcome outcome, std::size_t outcome_count) {
  if (outcome.one_based() < 1 || outcome.one_based() > outcome_count) {
    fail(ErrorCode::kDomain, "outcome " + std::to_string(outcome.one_based()) +
                                 " outside 1.." + std::to_string(outcome_count));
  }
}

Distribution::Distribution(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.size() < 2) {
    fail(ErrorCode::kDomain, "distribution needs at least 2 outcomes");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    const double v = probs_[i];
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
      std::ostringstream msg;
      msg << "probability entry " << i << " = " << v << " outside [0, 1]";
      fail(ErrorCode::kDomain, msg.str());
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > kTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "probabilities sum to " << sum << ", expected 1";
    fail(ErrorCode::kDomain, msg.str());
  }
}

Distribution::Distribution(std::initializer_list<double> probs)
    : Distribution(std::vector<double>(probs)) {}

Distribution Distribution::uniform(std::size_t outcome_count) {
  if (outcome_count < 2) {
    fail(ErrorCode::kDomain, "distribution needs at least 2 outcomes");
  }
  return Distribution(std::vector<double>(outcome_count, 1.0 / static_cast<double>(outcome_count)));
}

Distribution Distribution::degenerate(std::size_t outcome_count, Outcome outcome) {
  check_outcome(outcome, outcome_count);
  std::vector<double> probs(outcome_count, 0.0);
  probs[outcome.zero_based()] = 1.0;
  return Distribution(std::move(probs));
}

double Distribution::at(Outcome outcome) const {
  check_outcome(outcome, size());
  return probs_[outcome.zero_based()];
}

bool Distribution::approx_equal(const Distribution& other, double tolerance) const {
  if (other.size() != size()) return false;
  for (std::size_t i = 0; i < size(); ++i) {
    if (std::abs(probs_[i] - other.probs_[i]) > tolerance) return false;
  }
  return true;
}

bool Distribution::is_interior(double epsilon) const { return min_entry() >= epsilon; }

double Distribution::min_entry() const { return *std::min_element(probs_.begin(), probs_.end()); }

std::string Distribution::to_string() const {
  std::ostringstream out;
  out << *this;
  return out.str();
}

std::ostream& operator<<(std::ostream& out, const Distribution& p) {
  out << '[';
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) out << ' ';
    out << p[i];
  }
  return out << ']';
}

}  // namespace spml
