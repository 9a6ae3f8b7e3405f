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

// JSON conversions shared by the file formats and the C API.

#pragma once

#include <json.hpp>
#include <optional>
#include <span>
#include <string>

#include "spml/distribution.hpp"
#include "spml/error.hpp"
#include "spml/scoring.hpp"

namespace spml::detail {

using nlohmann::json;

[[noreturn]] inline void invalid(const std::string& path, const std::string& what) {
  fail(ErrorCode::kValidation, path + ": " + what);
}

/// "path.key", or just "key" at the document root.
std::string field(const std::string& path, const char* key);
const json& require(const json& object, const char* key, const std::string& path);
double as_number(const json& value, const std::string& path);
std::size_t as_index(const json& value, const std::string& path);
std::string as_string(const json& value, const std::string& path);
bool as_bool(const json& value, const std::string& path);

json to_json(const Distribution& p);
Distribution distribution_from_json(const json& value, const std::string& path);
std::optional<Distribution> optional_distribution(const json& object, const char* key,
                                                  const std::string& path);

json to_json(const ScoringRuleSpec& rule);
ScoringRuleSpec rule_from_json(const json& value, const std::string& path);

json number_array(std::span<const double> values);
std::vector<double> numbers_from_json(const json& value, const std::string& path);

/// %.17g rendering for CSV data files.
std::string format_double(double value);

}  // namespace spml::detail
