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

#include "narrmem/ingest/preprocess.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "narrmem/core/error.hpp"
#include "narrmem/core/text.hpp"

namespace narrmem {

namespace {

void require_stage(const EpisodeDocument &doc, DocStatus needed, const char *stage) {
  if (doc.status < needed)
    throw Error("STAGE_ORDER", std::string(stage) + " needs a document at status " +
                                   to_string(needed) + ", got " + to_string(doc.status));
}

}  // namespace

EpisodeDocument simplify_plot(const EpisodeDocument &doc, LlmGateway &gateway, size_t chunk) {
  if (doc.sentences.empty())
    throw Error("EMPTY_PLOT", doc.episode.str() + " has no sentences to simplify");
  if (chunk == 0) throw Error("INVALID_CHUNK", "chunk size must be >= 1");
  EpisodeDocument out = doc;
  out.simplified.clear();
  out.resolved.clear();
  out.normalized.clear();
  out.character_map.clear();
  for (size_t b = 0; b < doc.sentences.size(); b += chunk) {
    size_t e = std::min(doc.sentences.size(), b + chunk);
    std::vector<std::string> part(doc.sentences.begin() + static_cast<long>(b),
                                  doc.sentences.begin() + static_cast<long>(e));
    auto r = gateway.complete_structured(
        "simplify_plot", {{"series", doc.series.str()},
                          {"episode", doc.episode.str()},
                          {"input_json", nlohmann::json({{"sentences", part}}).dump()}});
    for (const auto &s : r.parsed["sentences"]) {
      std::string t = text::collapse_whitespace(s.get<std::string>());
      if (!t.empty()) out.simplified.push_back(std::move(t));
    }
  }
  out.status = DocStatus::kSimplified;
  return out;
}

bool contains_third_person_pronoun(const std::string &sentence) {
  static const std::set<std::string> kPronouns = {
      "he",   "him",  "his",   "himself", "she",    "her",       "hers",
      "herself", "they", "them", "their", "theirs", "themselves"};
  std::string word;
  for (size_t i = 0; i <= sentence.size(); ++i) {
    const char c = i < sentence.size() ? sentence[i] : ' ';
    if (std::isalpha(static_cast<unsigned char>(c))) {
      word.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
      continue;
    }
    // An apostrophe inside a word ("he's") still ends the pronoun.
    if (!word.empty() && kPronouns.count(word)) return true;
    word.clear();
  }
  return false;
}

std::pair<size_t, size_t> pronoun_context_range(size_t index, size_t window) {
  if (window == 0) throw Error("INVALID_WINDOW", "pronoun window must be >= 1");
  size_t before = std::min(index, window - 1);
  return {index - before, index};
}

EpisodeDocument resolve_pronouns(const EpisodeDocument &doc, LlmGateway &gateway, size_t window) {
  require_stage(doc, DocStatus::kSimplified, "resolve_pronouns");
  if (window == 0) throw Error("INVALID_WINDOW", "pronoun window must be >= 1");
  EpisodeDocument out = doc;
  out.resolved.clear();
  out.normalized.clear();
  out.character_map.clear();
  const auto &src = doc.simplified;
  for (size_t i = 0; i < src.size(); ++i) {
    if (!contains_third_person_pronoun(src[i])) {
      out.resolved.push_back(src[i]);
      continue;
    }
    auto [b, e] = pronoun_context_range(i, window);
    std::vector<std::string> ctx(src.begin() + static_cast<long>(b),
                                 src.begin() + static_cast<long>(e));
    std::string context = ctx.empty() ? "(none)" : text::numbered_lines(ctx, b);
    auto r = gateway.complete_structured(
        "resolve_pronouns",
        {{"context", context}, {"target_json", nlohmann::json({{"sentence", src[i]}}).dump()}});
    out.resolved.push_back(text::collapse_whitespace(r.parsed["sentence"].get<std::string>()));
  }
  out.status = DocStatus::kResolved;
  return out;
}

EpisodeDocument preprocess_episode(const EpisodeDocument &doc, LlmGateway &gateway,
                                   RelationalStore &store, MentionExtractor &extractor,
                                   const PreprocessOptions &options, PreprocessReport *report) {
  EpisodeDocument cur = doc;
  if (options.force || cur.status < DocStatus::kSimplified)
    cur = simplify_plot(cur, gateway, options.chunk);
  if (options.force || cur.status < DocStatus::kResolved)
    cur = resolve_pronouns(cur, gateway, options.window);
  if (options.force || cur.status < DocStatus::kNormalized) {
    auto mentions = extract_entities(cur, extractor, gateway);
    NormalizationResult norm;
    store.transaction([&] { norm = normalize_characters(mentions, cur.series, store); });
    std::map<std::string, std::string> to_preferred;
    for (const auto &[surface, id] : norm.surface_to_character)
      to_preferred[surface] = store.load_character(id).preferred_name;
    cur = substitute_names(cur, to_preferred);
    cur.character_map = norm.surface_to_character;
    if (report) {
      report->mentions = std::move(mentions);
      report->normalization = std::move(norm);
    }
  }
  return cur;
}

}  // namespace narrmem
