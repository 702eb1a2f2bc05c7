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

#include "narrmem/llm/prompt.hpp"

#include <cstdlib>
#include <fstream>
#include <regex>
#include <sstream>

#include "narrmem/core/error.hpp"

namespace narrmem {

namespace {

const std::regex &placeholder_re() {
  static const std::regex re(R"(\{([A-Za-z_][A-Za-z0-9_]*)\})");
  return re;
}

std::string read_file(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("IO_ERROR", "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::vector<std::string> PromptTemplate::placeholders() const {
  std::vector<std::string> names;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), placeholder_re());
       it != std::sregex_iterator(); ++it) {
    std::string name = (*it)[1].str();
    if (std::find(names.begin(), names.end(), name) == names.end()) names.push_back(name);
  }
  return names;
}

std::string render_template(const PromptTemplate &tmpl, const PromptVariables &variables) {
  std::set<std::string> used;
  std::string out;
  out.reserve(tmpl.text.size());
  auto last = tmpl.text.cbegin();
  for (auto it = std::sregex_iterator(tmpl.text.begin(), tmpl.text.end(), placeholder_re());
       it != std::sregex_iterator(); ++it) {
    const auto &m = *it;
    const std::string name = m[1].str();
    auto var = variables.find(name);
    if (var == variables.end())
      throw Error("MISSING_VARIABLE",
                  "template " + tmpl.template_id + " needs placeholder {" + name + "}");
    out.append(last, m[0].first);
    out += var->second;
    last = m[0].second;
    used.insert(name);
  }
  out.append(last, tmpl.text.cend());
  for (const auto &[name, value] : variables)
    if (!used.count(name))
      throw Error("UNUSED_VARIABLE",
                  "template " + tmpl.template_id + " has no placeholder {" + name + "}");
  return out;
}

PromptCatalog PromptCatalog::load(const std::filesystem::path &dir) {
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(read_file(dir / "catalog.json"));
  } catch (const nlohmann::json::exception &e) {
    throw Error("IO_ERROR", "malformed prompt catalog: " + std::string(e.what()));
  }
  PromptCatalog catalog;
  for (const auto &entry : manifest.at("templates")) {
    PromptTemplate t;
    t.template_id = entry.at("id").get<std::string>();
    t.version = entry.at("version").get<int>();
    t.response_schema = entry.at("response_schema");
    t.text = read_file(dir / entry.at("file").get<std::string>());
    catalog.add(std::move(t));
  }
  return catalog;
}

std::filesystem::path PromptCatalog::default_dir() {
  if (const char *env = std::getenv("NARRMEM_PROMPTS_DIR"); env && *env) return env;
#ifdef NARRMEM_DEFAULT_PROMPTS_DIR
  return NARRMEM_DEFAULT_PROMPTS_DIR;
#else
  return "prompts";
#endif
}

void PromptCatalog::add(PromptTemplate tmpl) {
  std::string id = tmpl.template_id;
  templates_[id] = std::move(tmpl);
}

const PromptTemplate &PromptCatalog::get(const std::string &template_id) const {
  auto it = templates_.find(template_id);
  if (it == templates_.end()) throw Error("UNKNOWN_TEMPLATE", "no prompt template " + template_id);
  return it->second;
}

bool PromptCatalog::contains(const std::string &template_id) const {
  return templates_.count(template_id) > 0;
}

std::vector<std::string> PromptCatalog::ids() const {
  std::vector<std::string> out;
  for (const auto &[id, t] : templates_) out.push_back(id);
  return out;
}

std::string PromptCatalog::render(const std::string &template_id,
                                  const PromptVariables &variables) const {
  return render_template(get(template_id), variables);
}

}  // namespace narrmem
