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


#ifndef NARRMEM_SERVICE_CONFIG_HPP_
#define NARRMEM_SERVICE_CONFIG_HPP_

#include <filesystem>
#include <optional>
#include <string>

#include "json.hpp"
#include "narrmem/llm/gateway.hpp"
#include "narrmem/pipeline/agents.hpp"

namespace narrmem {

struct ApiConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path workspace = "workspace";
  // Empty paths resolve inside the workspace; see resolved().
  std::filesystem::path db_path;
  std::filesystem::path vectors_base;
  std::filesystem::path fixtures_dir;
  std::filesystem::path runs_dir;
  std::filesystem::path prompts_dir;
  // Chat rules for live/record mode instead of an HTTP provider.
  std::filesystem::path script_path;
  GatewayMode mode = GatewayMode::kReplay;
  size_t embedding_dim = 256;
  PipelineConfig pipeline;
  double jaccard_threshold = 0.5;
  double cluster_distance = 0.3;
  size_t pronoun_window = 15;
  size_t simplify_chunk = 20;
  // Mention extractor for preprocessing: "heuristic" or "llm".
  std::string ner = "heuristic";

  // Throws INVALID_CONFIG on out-of-range values.
  void validate() const;
  // Copy with every empty path filled in from the workspace.
  ApiConfig resolved() const;

  // Defaults, then the JSON file (if given), then NARRMEM_* environment
  // variables. Throws IO_ERROR / INVALID_CONFIG.
  static ApiConfig load(const std::optional<std::filesystem::path> &file = std::nullopt);
  void apply_env();
};

void to_json(nlohmann::json &j, const ApiConfig &c);
void from_json(const nlohmann::json &j, ApiConfig &c);

}  // namespace narrmem

#endif  // NARRMEM_SERVICE_CONFIG_HPP_
