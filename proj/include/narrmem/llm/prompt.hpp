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

#ifndef NARRMEM_LLM_PROMPT_HPP_
#define NARRMEM_LLM_PROMPT_HPP_

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

namespace narrmem {

using PromptVariables = std::map<std::string, std::string>;

// A versioned prompt with `{name}` placeholders and the JSON shape its
// response must have.
struct PromptTemplate {
  std::string template_id;
  std::string text;
  nlohmann::json response_schema;
  int version = 1;

  // Placeholder names in order of first appearance.
  std::vector<std::string> placeholders() const;
};

// Strict substitution: every placeholder must be supplied (MISSING_VARIABLE)
// and every supplied variable must be used (UNUSED_VARIABLE). Substituted
// values are not re-scanned.
std::string render_template(const PromptTemplate &tmpl, const PromptVariables &variables);

class PromptCatalog {
 public:
  PromptCatalog() = default;

  // Reads `<dir>/catalog.json`: {"templates": [{"id", "version", "file",
  // "response_schema"}]}, with each template text in `<dir>/<file>`.
  static PromptCatalog load(const std::filesystem::path &dir);
  // Directory from $NARRMEM_PROMPTS_DIR, falling back to the source tree.
  static std::filesystem::path default_dir();

  void add(PromptTemplate tmpl);
  const PromptTemplate &get(const std::string &template_id) const;  // UNKNOWN_TEMPLATE
  bool contains(const std::string &template_id) const;
  std::vector<std::string> ids() const;

  std::string render(const std::string &template_id, const PromptVariables &variables) const;

 private:
  std::map<std::string, PromptTemplate> templates_;
};

}  // namespace narrmem

#endif  // NARRMEM_LLM_PROMPT_HPP_
