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

// The three worked two-agent examples and their expected-payoff tables.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spml/oracle.hpp"

namespace spml {

/// Example scenarios 1, 2 and 3 (logarithmic rule, b = 1, uniform start).
Scenario paper_example(int example);

/// Half away from zero, four decimals.
double round4(double value);

struct TableRow {
  AgentId agent;
  Distribution belief;
  std::size_t order = 0;
  Distribution current;
  Distribution report;
  double expected_payoff = 0.0;
};

struct PaperTable {
  int example = 0;
  std::vector<TableRow> rows;
  /// Net payoff of the agent that reports twice (example 3 only).
  std::optional<double> net;
  std::vector<double> published;
  std::optional<double> published_net;
  bool matches = false;
};

PaperTable reproduce_table(int example);

}  // namespace spml
