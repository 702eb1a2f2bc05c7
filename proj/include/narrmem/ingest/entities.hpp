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

#ifndef NARRMEM_INGEST_ENTITIES_HPP_
#define NARRMEM_INGEST_ENTITIES_HPP_

#include <map>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "narrmem/ingest/document.hpp"
#include "narrmem/llm/gateway.hpp"
#include "narrmem/memory/relational_store.hpp"

namespace narrmem {

enum class MentionSource { kNer, kLlmRefinement };

struct MentionCandidate {
  std::string surface;
  size_t sentence_index = 0;
  MentionSource source = MentionSource::kNer;
  // Proto-entity this mention was grouped into; empty before refinement.
  std::string entity_key;

  friend bool operator==(const MentionCandidate &, const MentionCandidate &) = default;
};

void to_json(nlohmann::json &j, const MentionCandidate &m);

// Person-mention detector over a list of sentences.
class MentionExtractor {
 public:
  virtual ~MentionExtractor() = default;
  virtual std::string name() const = 0;
  virtual std::vector<MentionCandidate> extract(const std::vector<std::string> &sentences) = 0;
};

// Offline default: runs of capitalized words, with an honorific ("Dr.",
// "Mr.", "Mrs.", "Ms.") attached to the following name. Leading function
// words ("When", "After", ...) and possessive "'s" are stripped. Non-person
// hits such as place names are left for the refinement pass to drop.
class CapitalizationMentionExtractor : public MentionExtractor {
 public:
  std::string name() const override { return "capitalization"; }
  std::vector<MentionCandidate> extract(const std::vector<std::string> &sentences) override;
};

// Asks the gateway (template ner_extract). Mentions whose surface does not
// occur in the cited sentence are discarded.
class LlmMentionExtractor : public MentionExtractor {
 public:
  explicit LlmMentionExtractor(LlmGateway &gateway) : gateway_(gateway) {}
  std::string name() const override { return "llm"; }
  std::vector<MentionCandidate> extract(const std::vector<std::string> &sentences) override;

 private:
  LlmGateway &gateway_;
};

// Detects mentions in doc.resolved, then asks the gateway (refine_entities)
// to group surfaces into proto-entities and drop non-characters. Surfaces the
// refinement adds that occur in the text become kLlmRefinement candidates.
// No mentions means no gateway call. STAGE_ORDER unless status >= resolved.
std::vector<MentionCandidate> extract_entities(const EpisodeDocument &doc,
                                               MentionExtractor &extractor,
                                               LlmGateway &gateway);

struct NormalizationResult {
  std::map<std::string, std::string> surface_to_character;  // surface -> character_id
  std::vector<std::string> created;                          // new character ids
  std::vector<std::string> extended;                         // ids that gained appellations
};

void to_json(nlohmann::json &j, const NormalizationResult &r);

// Matches each proto-entity to an existing character through any appellation
// (case-insensitive) or creates one whose preferred name is the longest
// surface. CONFLICT when one surface is claimed by two proto-entities.
NormalizationResult normalize_characters(const std::vector<MentionCandidate> &candidates,
                                         const SeriesId &series, RelationalStore &store);

// Longest-match-first, word-bounded, case-sensitive replacement of surface
// forms by preferred names. Preferred names themselves are protected from
// re-substitution. Writes doc.normalized from doc.resolved.
EpisodeDocument substitute_names(const EpisodeDocument &doc,
                                 const std::map<std::string, std::string> &surface_to_preferred);

// Tokens of all appellations: lowercased, split on non-alphanumerics, with
// the honorifics dr, mr, mrs, ms removed.
std::set<std::string> appellation_tokens(const Character &character);

struct DuplicateSuggestion {
  std::string character_a;
  std::string character_b;
  double score = 0;
};

void to_json(nlohmann::json &j, const DuplicateSuggestion &s);

// Unordered pairs (a < b by id) with token Jaccard >= threshold, sorted by
// score descending then ids.
std::vector<DuplicateSuggestion> suggest_duplicate_characters(const RelationalStore &store,
                                                              const SeriesId &series,
                                                              double threshold = 0.5);

}  // namespace narrmem

#endif  // NARRMEM_INGEST_ENTITIES_HPP_
