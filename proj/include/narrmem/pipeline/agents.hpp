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

// The nine working-memory agents and the semantic commit. Each agent is a
// plain function over drafts; the runner sequences them, records the trace
// and checkpoints between them.

#ifndef NARRMEM_PIPELINE_AGENTS_HPP_
#define NARRMEM_PIPELINE_AGENTS_HPP_

#include <string>
#include <vector>

#include "json.hpp"
#include "narrmem/core/embedding_provider.hpp"
#include "narrmem/ingest/document.hpp"
#include "narrmem/llm/gateway.hpp"
#include "narrmem/memory/memory_stores.hpp"
#include "narrmem/pipeline/draft.hpp"

namespace narrmem {

struct PipelineConfig {
  double theta_flag = 0.55;   // Agent 1 flagging threshold (cosine)
  double theta_dedup = 0.80;  // semantic_commit adjudication threshold (cosine)
  size_t agent1_k = 10;       // hits per Agent 1 query
  size_t paragraph_sentences = 5;
  size_t dedup_k = 5;  // candidates examined by semantic_commit
  bool embed_utterances = false;

  // INVALID_CONFIG unless thresholds lie in [-1, 1] and counts are positive.
  void validate() const;
};

void to_json(nlohmann::json &j, const PipelineConfig &c);
void from_json(const nlohmann::json &j, PipelineConfig &c);

struct PipelineContext {
  MemoryStores &stores;
  LlmGateway &gateway;
  const EmbeddingProvider &embedder;
  PipelineConfig config;
};

// What one agent did, for the trace. `fingerprints` lists every gateway
// request in issue order.
struct AgentLog {
  nlohmann::json output = nlohmann::json::object();
  std::vector<std::string> fingerprints;
  std::vector<std::string> notes;
};

// --- Agent 1: vector lookup of stored arc summaries with episode strictly
// before the current one. Queries are the whole normalized plot plus one per
// paragraph of config.paragraph_sentences sentences; an arc's score is its
// best hit. Each query and its hits land in log.output["queries"].
std::vector<FlaggedArc> agent1_identify_existing(const PipelineContext &ctx,
                                                 const EpisodeDocument &doc, AgentLog &log);

// --- Agent 2: self-contained storylines. Every draft is Anthology/agent2.
std::vector<ArcDraft> agent2_extract_anthology(const PipelineContext &ctx,
                                               const EpisodeDocument &doc, AgentLog &log);

// --- Agent 3: new serial storylines plus a present/absent verdict for each
// flagged arc. Present arcs become agent3_validated drafts that carry the
// stored arc's identity; absent ones are dropped.
std::vector<ArcDraft> agent3_extract_serial(const PipelineContext &ctx, const EpisodeDocument &doc,
                                            const std::vector<FlaggedArc> &flagged, AgentLog &log);

// --- Agent 4: pairwise merge adjudication among Soap/GenreSpecific drafts.
// Pairs of two drafts continuing stored arcs are never merged here.
// Anthology drafts pass through untouched.
std::vector<ArcDraft> agent4_optimize_season(const PipelineContext &ctx, const EpisodeDocument &doc,
                                             std::vector<ArcDraft> drafts, AgentLog &log);

// --- Agent 5: one request over all drafts returning duplicate groups; each
// group collapses onto its first member of the chosen type.
std::vector<ArcDraft> agent5_deduplicate(const PipelineContext &ctx, const EpisodeDocument &doc,
                                         std::vector<ArcDraft> drafts, AgentLog &log);

// --- Agent 6: characters and progression per draft. Names resolve through
// the episode's character map, then the appellation index; unresolved names
// are reported. NO_MAIN_CHARACTERS when a draft ends up without one.
std::vector<ArcDraft> agent6_enhance_details(const PipelineContext &ctx, const EpisodeDocument &doc,
                                             std::vector<ArcDraft> drafts, AgentLog &log);

// --- Agent 7: drops utterances the verifier marks irrelevant; a draft left
// empty is dropped with note VERIFIER_EMPTIED.
std::vector<ArcDraft> agent7_verify_progressions(const PipelineContext &ctx,
                                                 const EpisodeDocument &doc,
                                                 std::vector<ArcDraft> drafts, AgentLog &log);

// --- Agent 8: main/interfering adjudication. Interfering never overlaps
// main; a reply that leaves no resolvable main character is ignored.
std::vector<ArcDraft> agent8_verify_roles(const PipelineContext &ctx, const EpisodeDocument &doc,
                                          std::vector<ArcDraft> drafts, AgentLog &log);

// --- Agent 9 (review half): accept/reject per draft; unmentioned drafts
// are accepted. The runner commits the survivors.
std::vector<ArcDraft> agent9_final_review(const PipelineContext &ctx, const EpisodeDocument &doc,
                                          std::vector<ArcDraft> drafts, AgentLog &log);

struct CommitOutcome {
  enum class Kind { kCreated, kLinked };
  Kind kind = Kind::kCreated;
  std::string arc_id;
  std::string progression_id;
  size_t utterances_added = 0;
  // Similarity candidates examined, with their score and verdict.
  nlohmann::json adjudications = nlohmann::json::array();
  std::vector<std::string> fingerprints;
  std::vector<std::string> notes;
};

void to_json(nlohmann::json &j, const CommitOutcome &o);

// Links `draft` to a stored arc or creates a new one, then writes the
// relational rows and embeddings in one transaction. A draft continuing a
// stored arc links to it directly. Otherwise candidates are arc summaries of
// the series up to this episode with score >= theta_dedup, asked in score
// order; the first affirmative wins. A link that would break validate_arc
// (an anthology gaining a second episode) is refused and the next candidate
// is tried; with none left the draft becomes a new arc.
CommitOutcome semantic_commit(const PipelineContext &ctx, const SeriesId &series,
                              const EpisodeKey &episode, const ArcDraft &draft);

// Refreshes the arc_summary and progression embeddings of a stored arc.
void reembed_arc(MemoryStores &stores, const EmbeddingProvider &embedder, const NarrativeArc &arc,
                 bool embed_utterances = false);

// Prompt formatting shared with the service.
std::string format_draft(const ArcDraft &d);
std::string format_arc(const NarrativeArc &arc, const RelationalStore &store);

}  // namespace narrmem

#endif  // NARRMEM_PIPELINE_AGENTS_HPP_
