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


#include "narrmem/service/config.hpp"

#include <cstdlib>
#include <fstream>

#include "narrmem/core/error.hpp"
#include "narrmem/llm/prompt.hpp"

namespace narrmem {

using nlohmann::json;
namespace fs = std::filesystem;

void ApiConfig::validate() const {
  pipeline.validate();
  if (port < 0 || port > 65535) throw Error("INVALID_CONFIG", "port out of range");
  if (jaccard_threshold < 0 || jaccard_threshold > 1)
    throw Error("INVALID_CONFIG", "jaccard_threshold must lie in [0, 1]");
  if (cluster_distance <= 0 || cluster_distance >= 2)
    throw Error("INVALID_CONFIG", "cluster_distance must lie in (0, 2)");
  if (embedding_dim < 2) throw Error("INVALID_CONFIG", "embedding_dim must be >= 2");
  if (pronoun_window == 0 || simplify_chunk == 0)
    throw Error("INVALID_CONFIG", "pronoun_window and simplify_chunk must be >= 1");
  if (ner != "heuristic" && ner != "llm")
    throw Error("INVALID_CONFIG", "ner must be 'heuristic' or 'llm', got '" + ner + "'");
  if (workspace.empty()) throw Error("INVALID_CONFIG", "workspace path is empty");
}

ApiConfig ApiConfig::resolved() const {
  ApiConfig c = *this;
  auto fill = [&](fs::path &p, const char *name) {
    if (p.empty()) p = workspace / name;
  };
  fill(c.db_path, "narrmem.db");
  fill(c.vectors_base, "vectors");
  fill(c.fixtures_dir, "fixtures");
  fill(c.runs_dir, "runs");
  if (c.prompts_dir.empty()) c.prompts_dir = PromptCatalog::default_dir();
  return c;
}

void to_json(json &j, const ApiConfig &c) {
  j = json{{"host", c.host},
           {"port", c.port},
           {"workspace", c.workspace.string()},
           {"db_path", c.db_path.string()},
           {"vectors_base", c.vectors_base.string()},
           {"fixtures_dir", c.fixtures_dir.string()},
           {"runs_dir", c.runs_dir.string()},
           {"prompts_dir", c.prompts_dir.string()},
           {"script_path", c.script_path.string()},
           {"mode", to_string(c.mode)},
           {"embedding_dim", c.embedding_dim},
           {"pipeline", c.pipeline},
           {"jaccard_threshold", c.jaccard_threshold},
           {"cluster_distance", c.cluster_distance},
           {"pronoun_window", c.pronoun_window},
           {"simplify_chunk", c.simplify_chunk},
           {"ner", c.ner}};
}

void from_json(const json &j, ApiConfig &c) {
  auto path = [&](const char *key, fs::path &p) {
    if (j.contains(key)) p = j.at(key).get<std::string>();
  };
  c.host = j.value("host", c.host);
  c.port = j.value("port", c.port);
  path("workspace", c.workspace);
  path("db_path", c.db_path);
  path("vectors_base", c.vectors_base);
  path("fixtures_dir", c.fixtures_dir);
  path("runs_dir", c.runs_dir);
  path("prompts_dir", c.prompts_dir);
  path("script_path", c.script_path);
  if (j.contains("mode")) c.mode = parse_gateway_mode(j.at("mode").get<std::string>());
  c.embedding_dim = j.value("embedding_dim", c.embedding_dim);
  if (j.contains("pipeline")) c.pipeline = j.at("pipeline").get<PipelineConfig>();
  c.jaccard_threshold = j.value("jaccard_threshold", c.jaccard_threshold);
  c.cluster_distance = j.value("cluster_distance", c.cluster_distance);
  c.pronoun_window = j.value("pronoun_window", c.pronoun_window);
  c.simplify_chunk = j.value("simplify_chunk", c.simplify_chunk);
  c.ner = j.value("ner", c.ner);
}

namespace {

std::optional<std::string> env(const char *name) {
  const char *v = std::getenv(name);
  if (!v || !*v) return std::nullopt;
  return std::string(v);
}

double env_double(const std::string &name, const std::string &v) {
  try {
    size_t used = 0;
    double d = std::stod(v, &used);
    if (used == v.size()) return d;
  } catch (const std::exception &) {
  }
  throw Error("INVALID_CONFIG", name + " is not a number: '" + v + "'");
}

}  // namespace

void ApiConfig::apply_env() {
  if (auto v = env("NARRMEM_WORKSPACE")) workspace = *v;
  if (auto v = env("NARRMEM_HOST")) host = *v;
  if (auto v = env("NARRMEM_PORT")) port = static_cast<int>(env_double("NARRMEM_PORT", *v));
  if (auto v = env("NARRMEM_MODE")) mode = parse_gateway_mode(*v);
  if (auto v = env("NARRMEM_FIXTURES_DIR")) fixtures_dir = *v;
  if (auto v = env("NARRMEM_SCRIPT")) script_path = *v;
  if (auto v = env("NARRMEM_THETA_FLAG")) pipeline.theta_flag = env_double("NARRMEM_THETA_FLAG", *v);
  if (auto v = env("NARRMEM_THETA_DEDUP"))
    pipeline.theta_dedup = env_double("NARRMEM_THETA_DEDUP", *v);
  if (auto v = env("NARRMEM_JACCARD")) jaccard_threshold = env_double("NARRMEM_JACCARD", *v);
  if (auto v = env("NARRMEM_CLUSTER_DISTANCE"))
    cluster_distance = env_double("NARRMEM_CLUSTER_DISTANCE", *v);
}

ApiConfig ApiConfig::load(const std::optional<fs::path> &file) {
  ApiConfig c;
  if (file) {
    std::ifstream in(*file);
    if (!in) throw Error("IO_ERROR", "cannot read config " + file->string());
    try {
      json j = json::parse(in);
      from_json(j, c);
    } catch (const json::exception &e) {
      throw Error("INVALID_CONFIG", file->string() + ": " + e.what());
    }
  }
  c.apply_env();
  c.validate();
  return c;
}

}  // namespace narrmem
