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

#ifndef NARRMEM_INGEST_PREPROCESS_HPP_
#define NARRMEM_INGEST_PREPROCESS_HPP_

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "narrmem/ingest/document.hpp"
#include "narrmem/ingest/entities.hpp"
#include "narrmem/llm/gateway.hpp"
#include "narrmem/memory/relational_store.hpp"

namespace narrmem {

inline constexpr size_t kSimplifyChunk = 20;
inline constexpr size_t kPronounWindow = 15;

// Each stage recomputes its own field from the previous stage's field,
// clears later fields and sets the status to itself. Earlier fields are
// never touched. Errors: STAGE_ORDER when the input stage is missing.

// Rewrites `sentences` into one-event sentences, `chunk` per request.
// EMPTY_PLOT when there are no sentences.
EpisodeDocument simplify_plot(const EpisodeDocument &doc, LlmGateway &gateway,
                              size_t chunk = kSimplifyChunk);

// he/him/his/himself, she/her/hers/herself, they/them/their/theirs/themselves
// as whole words, any case.
bool contains_third_person_pronoun(const std::string &sentence);

// Half-open range of context sentences shown with target `index`: at most
// window - 1 preceding sentences, clipped at the start of the document.
std::pair<size_t, size_t> pronoun_context_range(size_t index, size_t window);

// One request per simplified sentence that contains a pronoun; other
// sentences pass through verbatim. INVALID_WINDOW when window == 0.
EpisodeDocument resolve_pronouns(const EpisodeDocument &doc, LlmGateway &gateway,
                                 size_t window = kPronounWindow);

struct PreprocessOptions {
  size_t window = kPronounWindow;
  size_t chunk = kSimplifyChunk;
  bool force = false;  // re-run completed stages
};

struct PreprocessReport {
  std::vector<MentionCandidate> mentions;
  NormalizationResult normalization;
};

// Runs every outstanding stage up to `normalized`, writing characters into
// `store`. Completed stages are skipped unless options.force.
EpisodeDocument preprocess_episode(const EpisodeDocument &doc, LlmGateway &gateway,
                                   RelationalStore &store, MentionExtractor &extractor,
                                   const PreprocessOptions &options = {},
                                   PreprocessReport *report = nullptr);

}  // namespace narrmem

#endif  // NARRMEM_INGEST_PREPROCESS_HPP_
