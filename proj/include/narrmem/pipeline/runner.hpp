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


#ifndef NARRMEM_PIPELINE_RUNNER_HPP_
#define NARRMEM_PIPELINE_RUNNER_HPP_

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "narrmem/pipeline/agents.hpp"

namespace narrmem {

inline constexpr int kAgentCount = 9;

// Trace name of agent `n` (1-based).
std::string agent_name(int n);

struct EpisodeExtractionResult {
  EpisodeKey episode;
  std::vector<std::string> committed_arcs;  // one entry per committed draft
  int new_arcs = 0;
  int continued_arcs = 0;
  // One entry per executed agent: {agent, name, output, fingerprints, notes}.
  nlohmann::json agent_trace = nlohmann::json::array();
  // "completed", "partial" (a draft failed to store) or "no_op".
  std::string status = "completed";
};

void to_json(nlohmann::json &j, const EpisodeExtractionResult &r);
void from_json(const nlohmann::json &j, EpisodeExtractionResult &r);

using EventSink = std::function<void(const nlohmann::json &event)>;

struct RunOptions {
  bool force = false;
  // Checkpoints go to <dir>/<series>/<episode>.checkpoint.json. Unset means
  // no checkpointing.
  std::optional<std::filesystem::path> checkpoint_dir;
  EventSink on_event;
};

std::filesystem::path checkpoint_path(const std::filesystem::path &dir, const SeriesId &series,
                                      const EpisodeKey &episode);

// ORDERING unless every earlier episode of the same season is processed.
void check_episode_order(const RelationalStore &store, const SeriesId &series,
                         const EpisodeKey &episode);

// Removes everything a previous run of `episode` stored: its progressions,
// their embeddings, and arcs left without progressions. Returns the ids of
// arcs touched.
std::vector<std::string> retract_episode(MemoryStores &stores, const EmbeddingProvider &embedder,
                                         const SeriesId &series, const EpisodeKey &episode,
                                         bool embed_utterances = false);

// Runs Agents 1-9 on a normalized document and commits the survivors.
// A processed episode yields a no_op result unless options.force. A run that
// fails keeps its checkpoint; the next call resumes after the last completed
// agent (and after the last committed draft inside Agent 9).
EpisodeExtractionResult run_episode(const PipelineContext &ctx, const EpisodeDocument &doc,
                                    const RunOptions &options = {});

}  // namespace narrmem

#endif  // NARRMEM_PIPELINE_RUNNER_HPP_
