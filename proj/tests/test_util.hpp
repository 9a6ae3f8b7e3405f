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

#include <gtest/gtest.h>

#include <string>
#include <vector>

#include "spml/distribution.hpp"
#include "spml/error.hpp"

// Fails unless `stmt` throws spml::Error with the given code.
#define EXPECT_SPML_ERROR(stmt, expected_code)                                  \
  do {                                                                          \
    try {                                                                       \
      stmt;                                                                     \
      ADD_FAILURE() << "expected spml::Error from: " #stmt;                     \
    } catch (const spml::Error& spml_error_) {                                  \
      EXPECT_EQ(spml_error_.code(), expected_code) << spml_error_.what();       \
    }                                                                           \
  } while (0)

namespace testutil {

inline std::vector<double> vec(const spml::Distribution& p) { return {p.probs().begin(), p.probs().end()}; }

inline std::string error_message(auto&& fn) {
  try {
    fn();
  } catch (const spml::Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace testutil
