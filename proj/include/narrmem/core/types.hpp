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

// Domain types shared by every narrmem module: series, episodes, arcs,
// progressions, utterances and characters, with their canonical JSON form.

#ifndef NARRMEM_CORE_TYPES_HPP_
#define NARRMEM_CORE_TYPES_HPP_

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace narrmem {

// Lowercase, hyphen-separated slug naming a series ("greys-anatomy").
class SeriesId {
 public:
  SeriesId() = default;
  // Throws Error("INVALID_SERIES") unless `slug` is a well-formed slug.
  explicit SeriesId(std::string slug);

  const std::string &str() const { return slug_; }
  bool empty() const { return slug_.empty(); }

  static bool is_valid_slug(std::string_view s);

  friend auto operator<=>(const SeriesId &, const SeriesId &) = default;

 private:
  std::string slug_;
};

// Season/episode pair. Ordering is (season, episode) lexicographic.
struct EpisodeKey {
  int season = 1;
  int episode = 1;

  EpisodeKey() = default;
  // Throws Error("INVALID_EPISODE") unless both numbers are >= 1.
  EpisodeKey(int season, int episode);

  // "S01E03"; numbers >= 100 widen naturally.
  std::string str() const;
  // Inverse of str(); accepts upper- or lowercase letters.
  static EpisodeKey parse(std::string_view text);

  friend auto operator<=>(const EpisodeKey &, const EpisodeKey &) = default;
};

std::strong_ordering compare_episodes(const EpisodeKey &a, const EpisodeKey &b);

enum class ArcType { kAnthology, kSoap, kGenreSpecific };

inline constexpr ArcType kAllArcTypes[] = {ArcType::kAnthology, ArcType::kSoap,
                                           ArcType::kGenreSpecific};

std::string_view to_string(ArcType type);
// Accepts "Anthology", "Soap", "GenreSpecific" and "Genre-Specific",
// case-insensitively. Throws Error("INVALID_ARC_TYPE").
ArcType parse_arc_type(std::string_view text);

struct Character {
  std::string character_id;
  SeriesId series;
  std::string preferred_name;
  // Stored in original casing; compared through fold_appellation().
  std::vector<std::string> appellations;

  bool has_appellation(std::string_view surface) const;
  // Adds `surface` unless an equivalent appellation already exists.
  bool add_appellation(const std::string &surface);

  friend bool operator==(const Character &, const Character &) = default;
};

// Case-insensitive, whitespace-trimmed comparison key for appellations.
std::string fold_appellation(std::string_view surface);

struct Utterance {
  int ordinal = 0;
  std::string text;

  friend bool operator==(const Utterance &, const Utterance &) = default;
};

struct Progression {
  std::string progression_id;
  std::string arc_id;
  SeriesId series;
  EpisodeKey episode;
  std::vector<Utterance> content;
  std::vector<std::string> interfering_characters;

  // Builds utterances with ordinals 0..n-1 from plain sentences.
  static std::vector<Utterance> make_content(const std::vector<std::string> &texts);
  std::vector<std::string> texts() const;

  friend bool operator==(const Progression &, const Progression &) = default;
};

struct NarrativeArc {
  std::string arc_id;
  SeriesId series;
  std::string title;
  std::string description;
  ArcType arc_type = ArcType::kSoap;
  std::vector<std::string> main_characters;
  std::vector<Progression> progressions;

  // Text embedded for the arc_summary record: title and description joined
  // by a spaced U+2014 dash.
  std::string summary_text() const;
  const Progression *find_progression(const EpisodeKey &episode) const;
  Progression *find_progression(const EpisodeKey &episode);
  // Sorts progressions by episode (stable).
  void sort_progressions();

  friend bool operator==(const NarrativeArc &, const NarrativeArc &) = default;
};

// Canonical JSON. Field names follow the struct members; utterances are an
// array of strings whose ordinal is the array position.
void to_json(nlohmann::json &j, const SeriesId &s);
void from_json(const nlohmann::json &j, SeriesId &s);
void to_json(nlohmann::json &j, const EpisodeKey &k);
void from_json(const nlohmann::json &j, EpisodeKey &k);
void to_json(nlohmann::json &j, const ArcType &t);
void from_json(const nlohmann::json &j, ArcType &t);
void to_json(nlohmann::json &j, const Character &c);
void from_json(const nlohmann::json &j, Character &c);
void to_json(nlohmann::json &j, const Progression &p);
void from_json(const nlohmann::json &j, Progression &p);
void to_json(nlohmann::json &j, const NarrativeArc &a);
void from_json(const nlohmann::json &j, NarrativeArc &a);

}  // namespace narrmem

#endif  // NARRMEM_CORE_TYPES_HPP_
