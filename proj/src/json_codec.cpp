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

#include "json_codec.hpp"

#include <charconv>
#include <cmath>

namespace spml::detail {

std::string field(const std::string& path, const char* key) {
  return path.empty() ? std::string(key) : path + "." + key;
}

const json& require(const json& object, const char* key, const std::string& path) {
  if (!object.is_object()) invalid(path.empty() ? "(root)" : path, "expected an object");
  auto it = object.find(key);
  if (it == object.end()) invalid(field(path, key), "missing required field");
  return *it;
}

double as_number(const json& value, const std::string& path) {
  if (!value.is_number()) invalid(path, "expected a number");
  return value.get<double>();
}

std::size_t as_index(const json& value, const std::string& path) {
  if (!value.is_number_integer() || value.get<long long>() < 0) {
    invalid(path, "expected a non-negative integer");
  }
  return value.get<std::size_t>();
}

std::string as_string(const json& value, const std::string& path) {
  if (!value.is_string()) invalid(path, "expected a string");
  return value.get<std::string>();
}

bool as_bool(const json& value, const std::string& path) {
  if (!value.is_boolean()) invalid(path, "expected a boolean");
  return value.get<bool>();
}

json number_array(std::span<const double> values) {
  json out = json::array();
  for (double v : values) out.push_back(v);
  return out;
}

std::vector<double> numbers_from_json(const json& value, const std::string& path) {
  if (!value.is_array()) invalid(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < value.size(); ++i) {
    out.push_back(as_number(value[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

json to_json(const Distribution& p) { return number_array(p.probs()); }

Distribution distribution_from_json(const json& value, const std::string& path) {
  std::vector<double> probs = numbers_from_json(value, path);
  try {
    return Distribution(std::move(probs));
  } catch (const Error& e) {
    invalid(path, e.what());
  }
}

std::optional<Distribution> optional_distribution(const json& object, const char* key,
                                                  const std::string& path) {
  auto it = object.find(key);
  if (it == object.end() || it->is_null()) return std::nullopt;
  return distribution_from_json(*it, field(path, key));
}

json to_json(const ScoringRuleSpec& rule) {
  return json{{"kind", std::string(to_string(rule.kind))},
              {"scale", rule.scale},
              {"offsets", number_array(rule.offsets)}};
}

ScoringRuleSpec rule_from_json(const json& value, const std::string& path) {
  ScoringRuleSpec rule;
  try {
    rule.kind = parse_rule_kind(as_string(require(value, "kind", path), path + ".kind"));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kValidation) throw;
    invalid(path + ".kind", e.what());
  }
  if (value.contains("scale")) rule.scale = as_number(value["scale"], path + ".scale");
  if (value.contains("offsets")) {
    rule.offsets = numbers_from_json(value["offsets"], path + ".offsets");
  } else {
    rule.offsets.assign(as_index(require(value, "outcomes", path), path + ".outcomes"), 0.0);
  }
  try {
    rule.validate();
  } catch (const Error& e) {
    invalid(path, e.what());
  }
  return rule;
}

std::string format_double(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  // Shortest representation that parses back to the same double.
  char buffer[32];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, result.ptr);
}

}  // namespace spml::detail
