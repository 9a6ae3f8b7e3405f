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

#include <compare>
#include <cstddef>
#include <initializer_list>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace spml {

/// One of the N mutually exclusive outcomes, numbered from 1.
class Outcome {
 public:
  constexpr explicit Outcome(std::size_t one_based) : index_(one_based) {}

  constexpr std::size_t one_based() const noexcept { return index_; }
  constexpr std::size_t zero_based() const noexcept { return index_ - 1; }

  friend constexpr auto operator<=>(Outcome, Outcome) = default;

 private:
  std::size_t index_;
};

/// Checks 1 <= outcome <= outcome_count; throws Error(kDomain) otherwise.
void check_outcome(Outcome outcome, std::size_t outcome_count);

/// A point on the probability simplex over N >= 2 outcomes.
///
/// Entries lie in [0, 1] and sum to one within kTolerance. Construction
/// validates; every Distribution in the system is therefore well formed.
class Distribution {
 public:
  static constexpr double kTolerance = 1e-9;

  explicit Distribution(std::vector<double> probs);
  Distribution(std::initializer_list<double> probs);

  static Distribution uniform(std::size_t outcome_count);
  static Distribution degenerate(std::size_t outcome_count, Outcome outcome);

  std::size_t size() const noexcept { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  double at(Outcome outcome) const;
  std::span<const double> probs() const noexcept { return probs_; }

  /// Per-entry comparison within `tolerance`.
  bool approx_equal(const Distribution& other, double tolerance = kTolerance) const;
  /// True when every entry is at least `epsilon`.
  bool is_interior(double epsilon) const;
  double min_entry() const;

  std::string to_string() const;

  friend bool operator==(const Distribution&, const Distribution&) = default;

 private:
  std::vector<double> probs_;
};

std::ostream& operator<<(std::ostream& out, const Distribution& p);

}  // namespace spml
