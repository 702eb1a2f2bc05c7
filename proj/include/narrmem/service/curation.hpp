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


// Human-curation operations behind the HTTP API: arc and progression
// editing, merges, character management and the analytics views. Every
// mutation re-validates the arcs it touches and refreshes their embeddings.

#ifndef NARRMEM_SERVICE_CURATION_HPP_
#define NARRMEM_SERVICE_CURATION_HPP_

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "narrmem/core/embedding_provider.hpp"
#include "narrmem/core/error.hpp"
#include "narrmem/core/validate.hpp"
#include "narrmem/ingest/document.hpp"
#include "narrmem/llm/gateway.hpp"
#include "narrmem/memory/analytics.hpp"
#include "narrmem/memory/memory_stores.hpp"

namespace narrmem {

// Raised when a mutation would leave an arc invalid; nothing is written.
class ValidationFailed : public Error {
 public:
  explicit ValidationFailed(ValidationReport report);
  const ValidationReport &report() const { return report_; }

 private:
  ValidationReport report_;
};

struct Curation {
  MemoryStores &stores;
  const EmbeddingProvider &embedder;
  bool embed_utterances = false;

  // Timeline payload: arcs with at least one progression in the season
  // (their progressions restricted to it), the season's episode columns and
  // a character id -> name table.
  nlohmann::json timeline(const SeriesId &series, int season,
                          std::optional<ArcType> type = std::nullopt,
                          std::optional<std::string> character_id = std::nullopt) const;

  // Body: {series, title, description, arc_type, main_characters: [ids],
  // progressions (at least one): [{episode, content: [text], interfering_characters}]}.
  NarrativeArc create_arc(const nlohmann::json &body);
  // Body may set title, description, arc_type, main_characters.
  NarrativeArc patch_arc(const std::string &arc_id, const nlohmann::json &body);
  void delete_arc(const std::string &arc_id);
  // Progressions of both arcs are united; a shared episode gets keep's
  // utterances followed by absorb's. The absorbed arc and its embeddings go.
  NarrativeArc merge_arcs(const std::string &keep_id, const std::string &absorb_id);

  // Body: {episode, content: [text], interfering_characters: [ids]}.
  NarrativeArc add_progression(const std::string &arc_id, const nlohmann::json &body);
  // Body may set episode, content, interfering_characters.
  NarrativeArc patch_progression(const std::string &arc_id, const std::string &progression_id,
                                 const nlohmann::json &body);
  NarrativeArc delete_progression(const std::string &arc_id, const std::string &progression_id);

  // Body may set preferred_name and appellations (full replacement; the
  // preferred name is always kept).
  Character patch_character(const std::string &character_id, const nlohmann::json &body);
  Character merge_characters(const std::string &keep_id, const std::string &drop_id);

  std::vector<ClusterAssignment> clusters(const SeriesId &series, double threshold) const;
  std::vector<ProjectedPoint> pca(const SeriesId &series) const;

  // Runs every stored arc through validate_arc; returns the failing ones.
  std::vector<std::pair<std::string, ValidationReport>> invalid_arcs() const;

 private:
  void store_arc(const NarrativeArc &arc);
};

// LLM-drafted progression of `arc` for `doc`'s episode. Nothing is saved;
// the caller reviews and posts it. Returns {arc_id, episode, content,
// interfering_characters (ids), unresolved_names}.
nlohmann::json generate_progression(LlmGateway &gateway, const RelationalStore &store,
                                    const NarrativeArc &arc, const EpisodeDocument &doc);

}  // namespace narrmem

#endif  // NARRMEM_SERVICE_CURATION_HPP_
