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

#ifndef NARRMEM_LLM_SCHEMA_HPP_
#define NARRMEM_LLM_SCHEMA_HPP_

#include <optional>
#include <string>

#include "json.hpp"

namespace narrmem {

// Structural validation against the subset of JSON Schema used by the prompt
// catalog: "type" (object, array, string, integer, number, boolean),
// "properties", "required", "additionalProperties": false, "items",
// "minItems", "minLength", "enum".
//
// Returns the first violation as "<json-pointer>: <problem>", or nullopt.
std::optional<std::string> validate_schema(const nlohmann::json &value,
                                           const nlohmann::json &schema);

}  // namespace narrmem

#endif  // NARRMEM_LLM_SCHEMA_HPP_
