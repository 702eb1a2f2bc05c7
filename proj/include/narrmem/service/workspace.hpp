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


#ifndef NARRMEM_SERVICE_WORKSPACE_HPP_
#define NARRMEM_SERVICE_WORKSPACE_HPP_

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "narrmem/eval/evaluation.hpp"
#include "narrmem/ingest/document.hpp"
#include "narrmem/llm/gateway.hpp"
#include "narrmem/memory/memory_stores.hpp"
#include "narrmem/pipeline/runner.hpp"
#include "narrmem/service/config.hpp"

namespace narrmem {

// Everything a CLI verb or the HTTP API needs: stores, staged documents,
// gateways per mode, and the batch operations over them.
class Workspace {
 public:
  explicit Workspace(const ApiConfig &config);
  ~Workspace();

  const ApiConfig &config() const { return config_; }
  MemoryStores &stores() { return *stores_; }
  const EmbeddingProvider &embedder() const { return *embedder_; }

  // Built on first use. Live and record need a chat provider: the script
  // file when configured, otherwise the NARRMEM_LLM_* endpoint
  // (UNAVAILABLE when neither exists).
  LlmGateway &gateway(std::optional<GatewayMode> mode = std::nullopt);
  PipelineContext pipeline_context(std::optional<GatewayMode> mode = std::nullopt);

  std::filesystem::path document_path(const SeriesId &series, const EpisodeKey &episode) const;
  std::optional<EpisodeDocument> find_document(const SeriesId &series,
                                               const EpisodeKey &episode) const;
  // Staged documents of a series (optionally one season) in episode order.
  std::vector<EpisodeDocument> documents(const SeriesId &series,
                                         std::optional<int> season = std::nullopt) const;
  void save_document(const EpisodeDocument &doc) const;

  // Stages every S..E.. plot file of `dir`. A document whose raw text is
  // unchanged keeps its later stages.
  std::vector<EpisodeDocument> ingest(const std::filesystem::path &dir, const SeriesId &series);

  std::vector<EpisodeDocument> preprocess(const SeriesId &series, std::optional<int> season,
                                          std::optional<GatewayMode> mode, bool force);

  // Runs the pipeline over a season in episode order; stops at the first
  // failure.
  std::vector<EpisodeExtractionResult> extract(const SeriesId &series, int season,
                                               std::optional<GatewayMode> mode, bool force,
                                               const EventSink &on_event = {});

  // Canonical dump of every series: characters by id, arcs by (title, id).
  nlohmann::json export_json() const;
  std::string export_text() const;  // export_json().dump(2) + "\n"

  EvalReport evaluate(const GoldStandard &gold,
                      const std::vector<MappingOverride> &extra_overrides = {});

  void flush() { stores_->flush(); }

 private:
  ApiConfig config_;
  std::unique_ptr<MemoryStores> stores_;
  std::unique_ptr<EmbeddingProvider> embedder_;
  std::shared_ptr<FixtureStore> fixtures_;
  std::mutex gateways_mu_;
  std::map<GatewayMode, std::unique_ptr<LlmGateway>> gateways_;
};

}  // namespace narrmem

#endif  // NARRMEM_SERVICE_WORKSPACE_HPP_
