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


// Scoring extracted arcs and characters against a hand-made gold standard.

#ifndef NARRMEM_EVAL_EVALUATION_HPP_
#define NARRMEM_EVAL_EVALUATION_HPP_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "narrmem/core/embedding_provider.hpp"
#include "narrmem/core/types.hpp"

namespace narrmem {

inline constexpr double kDefaultMatchThreshold = 0.6;

struct GoldArc {
  std::string title;
  ArcType arc_type = ArcType::kSoap;
  std::vector<EpisodeKey> episodes;
  std::vector<std::string> main_characters;  // names
};

// Pins an extracted arc to a gold index, or to nothing when gold_index is
// empty.
struct MappingOverride {
  std::string arc_id;
  std::optional<size_t> gold_index;

  friend bool operator==(const MappingOverride &, const MappingOverride &) = default;
};

struct GoldStandard {
  SeriesId series;
  int season = 1;
  std::vector<GoldArc> gold_arcs;
  std::vector<std::string> gold_characters;
  std::vector<MappingOverride> mapping_overrides;

  static GoldStandard load(const std::filesystem::path &path);  // IO_ERROR, INVALID_GOLD
};

void to_json(nlohmann::json &j, const GoldArc &g);
void from_json(const nlohmann::json &j, GoldArc &g);
void to_json(nlohmann::json &j, const MappingOverride &o);
void from_json(const nlohmann::json &j, MappingOverride &o);
void to_json(nlohmann::json &j, const GoldStandard &g);
void from_json(const nlohmann::json &j, GoldStandard &g);

// Accepts {"mapping_overrides": [...]} or a bare array.
std::vector<MappingOverride> load_overrides(const std::filesystem::path &path);

struct ArcMatch {
  std::string arc_id;
  size_t gold_index = 0;
  double score = 0;  // cosine; 1 for overrides
  bool overridden = false;
};

struct ArcMatching {
  std::vector<ArcMatch> pairs;  // ordered by arc_id
  std::vector<std::string> unmatched_extracted;
  std::vector<size_t> unmatched_gold;
  // Unmatched extracted arcs whose best gold arc (score >= threshold) was
  // already taken.
  std::vector<ArcMatch> duplicates;
};

// Greedy best-first one-to-one matching of arc summary text against gold
// titles. Overrides are applied first and always win. Throws
// CONFLICTING_OVERRIDES when two overrides disagree or pin one gold arc
// twice, and INVALID_OVERRIDE when one names an unknown arc or gold index.
ArcMatching match_arcs(const std::vector<NarrativeArc> &extracted,
                       const std::vector<GoldArc> &gold,
                       const std::vector<MappingOverride> &overrides,
                       const EmbeddingProvider &embedder,
                       double threshold = kDefaultMatchThreshold);

// correct / extracted, or nullopt when nothing was extracted.
std::optional<double> precision(size_t correct, size_t extracted);

struct TypeScore {
  size_t extracted = 0;
  size_t matched = 0;
  size_t correct = 0;  // matched to a gold arc of the same type
  std::optional<double> precision;
};

struct CharacterScore {
  size_t extracted = 0;
  size_t correct = 0;
};

struct EvalReport {
  std::map<ArcType, TypeScore> per_type;  // every type present, possibly zero
  TypeScore overall;
  CharacterScore characters;
  size_t duplication_count = 0;
  size_t unmatched_extracted = 0;
  std::vector<std::string> missed_gold;  // titles of unmatched gold arcs
};

void to_json(nlohmann::json &j, const TypeScore &s);
void to_json(nlohmann::json &j, const EvalReport &r);

// A character is correct when any of its appellations equals a gold name
// after fold_appellation.
CharacterScore score_characters(const std::vector<Character> &extracted,
                                const std::vector<std::string> &gold_names);

EvalReport compute_report(const ArcMatching &matching, const std::vector<NarrativeArc> &extracted,
                          const std::vector<GoldArc> &gold,
                          const std::vector<Character> &characters,
                          const std::vector<std::string> &gold_characters);

// Fixed-width text rendering of a report.
std::string render_table(const EvalReport &report);

}  // namespace narrmem

#endif  // NARRMEM_EVAL_EVALUATION_HPP_
