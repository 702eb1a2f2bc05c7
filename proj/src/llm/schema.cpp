// Copyright 2026 The narrmem Authors.
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

#include "narrmem/llm/schema.hpp"

namespace narrmem {

namespace {

bool type_matches(const nlohmann::json &v, const std::string &type) {
  if (type == "object") return v.is_object();
  if (type == "array") return v.is_array();
  if (type == "string") return v.is_string();
  if (type == "integer") return v.is_number_integer();
  if (type == "number") return v.is_number();
  if (type == "boolean") return v.is_boolean();
  if (type == "null") return v.is_null();
  return false;
}

std::optional<std::string> check(const nlohmann::json &v, const nlohmann::json &schema,
                                 const std::string &path) {
  const std::string where = path.empty() ? "/" : path;
  if (schema.contains("type")) {
    const std::string type = schema["type"].get<std::string>();
    if (!type_matches(v, type)) return where + ": expected " + type;
  }
  if (schema.contains("enum")) {
    bool found = false;
    for (const auto &e : schema["enum"]) found = found || e == v;
    if (!found) return where + ": value " + v.dump() + " not in " + schema["enum"].dump();
  }
  if (v.is_string() && schema.contains("minLength") &&
      v.get<std::string>().size() < schema["minLength"].get<size_t>())
    return where + ": string shorter than " + schema["minLength"].dump();
  if (v.is_array()) {
    if (schema.contains("minItems") && v.size() < schema["minItems"].get<size_t>())
      return where + ": fewer than " + schema["minItems"].dump() + " items";
    if (schema.contains("items")) {
      for (size_t i = 0; i < v.size(); ++i)
        if (auto err = check(v[i], schema["items"], path + "/" + std::to_string(i))) return err;
    }
  }
  if (v.is_object()) {
    if (schema.contains("required")) {
      for (const auto &key : schema["required"])
        if (!v.contains(key.get<std::string>()))
          return where + ": missing required field '" + key.get<std::string>() + "'";
    }
    const bool closed = schema.contains("additionalProperties") &&
                        schema["additionalProperties"].is_boolean() &&
                        !schema["additionalProperties"].get<bool>();
    const auto props = schema.value("properties", nlohmann::json::object());
    for (const auto &[key, child] : v.items()) {
      if (props.contains(key)) {
        if (auto err = check(child, props[key], path + "/" + key)) return err;
      } else if (closed) {
        return where + ": unexpected field '" + key + "'";
      }
    }
  }
  return std::nullopt;
}

}  // namespace

std::optional<std::string> validate_schema(const nlohmann::json &value,
                                           const nlohmann::json &schema) {
  return check(value, schema, "");
}

}  // namespace narrmem
