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

#include "narrmem/core/types.hpp"

#include <algorithm>
#include <cstdio>
#include <regex>

#include "narrmem/core/error.hpp"
#include "narrmem/core/text.hpp"

namespace narrmem {

SeriesId::SeriesId(std::string slug) : slug_(std::move(slug)) {
  if (!is_valid_slug(slug_)) throw Error("INVALID_SERIES", "not a series slug: '" + slug_ + "'");
}

bool SeriesId::is_valid_slug(std::string_view s) {
  if (s.empty() || s.front() == '-' || s.back() == '-') return false;
  char prev = 0;
  for (char c : s) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-';
    if (!ok || (c == '-' && prev == '-')) return false;
    prev = c;
  }
  return true;
}

EpisodeKey::EpisodeKey(int s, int e) : season(s), episode(e) {
  if (s < 1 || e < 1) {
    throw Error("INVALID_EPISODE", "season and episode must be >= 1, got " +
                                       std::to_string(s) + "/" + std::to_string(e));
  }
}

std::string EpisodeKey::str() const {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "S%02dE%02d", season, episode);
  return buf;
}

EpisodeKey EpisodeKey::parse(std::string_view text) {
  static const std::regex kPattern("^[Ss](\\d+)[Ee](\\d+)$");
  std::string s(text);
  std::smatch m;
  if (!std::regex_match(s, m, kPattern)) {
    throw Error("KEY_PARSE", "not an episode key: '" + s + "'");
  }
  try {
    return EpisodeKey(std::stoi(m[1]), std::stoi(m[2]));
  } catch (const std::out_of_range &) {
    throw Error("KEY_PARSE", "episode key out of range: '" + s + "'");
  }
}

std::strong_ordering compare_episodes(const EpisodeKey &a, const EpisodeKey &b) { return a <=> b; }

std::string_view to_string(ArcType type) {
  switch (type) {
    case ArcType::kAnthology:
      return "Anthology";
    case ArcType::kSoap:
      return "Soap";
    case ArcType::kGenreSpecific:
      return "GenreSpecific";
  }
  return "Soap";
}

ArcType parse_arc_type(std::string_view text) {
  std::string folded;
  for (char c : text) {
    if (c == '-' || c == '_' || c == ' ') continue;
    folded.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  if (folded == "anthology") return ArcType::kAnthology;
  if (folded == "soap") return ArcType::kSoap;
  if (folded == "genrespecific") return ArcType::kGenreSpecific;
  throw Error("INVALID_ARC_TYPE", "unknown arc type '" + std::string(text) + "'");
}

std::string fold_appellation(std::string_view surface) {
  return text::to_lower(text::collapse_whitespace(surface));
}

bool Character::has_appellation(std::string_view surface) const {
  std::string key = fold_appellation(surface);
  return std::any_of(appellations.begin(), appellations.end(),
                     [&](const std::string &a) { return fold_appellation(a) == key; });
}

bool Character::add_appellation(const std::string &surface) {
  std::string trimmed = text::collapse_whitespace(surface);
  if (trimmed.empty() || has_appellation(trimmed)) return false;
  appellations.push_back(trimmed);
  std::sort(appellations.begin(), appellations.end(),
            [](const std::string &a, const std::string &b) {
              return fold_appellation(a) < fold_appellation(b);
            });
  return true;
}

std::vector<Utterance> Progression::make_content(const std::vector<std::string> &texts) {
  std::vector<Utterance> out;
  out.reserve(texts.size());
  for (size_t i = 0; i < texts.size(); ++i) out.push_back({static_cast<int>(i), texts[i]});
  return out;
}

std::vector<std::string> Progression::texts() const {
  std::vector<std::string> out;
  out.reserve(content.size());
  for (const auto &u : content) out.push_back(u.text);
  return out;
}

std::string NarrativeArc::summary_text() const { return title + " — " + description; }

const Progression *NarrativeArc::find_progression(const EpisodeKey &episode) const {
  for (const auto &p : progressions)
    if (p.episode == episode) return &p;
  return nullptr;
}

Progression *NarrativeArc::find_progression(const EpisodeKey &episode) {
  for (auto &p : progressions)
    if (p.episode == episode) return &p;
  return nullptr;
}

void NarrativeArc::sort_progressions() {
  std::stable_sort(progressions.begin(), progressions.end(),
                   [](const Progression &a, const Progression &b) { return a.episode < b.episode; });
}

// ---------------------------------------------------------------------------
// JSON

void to_json(nlohmann::json &j, const SeriesId &s) { j = s.str(); }
void from_json(const nlohmann::json &j, SeriesId &s) { s = SeriesId(j.get<std::string>()); }

void to_json(nlohmann::json &j, const EpisodeKey &k) {
  j = nlohmann::json{{"season", k.season}, {"episode", k.episode}};
}
void from_json(const nlohmann::json &j, EpisodeKey &k) {
  if (j.is_string()) {
    k = EpisodeKey::parse(j.get<std::string>());
    return;
  }
  k = EpisodeKey(j.at("season").get<int>(), j.at("episode").get<int>());
}

void to_json(nlohmann::json &j, const ArcType &t) { j = std::string(to_string(t)); }
void from_json(const nlohmann::json &j, ArcType &t) { t = parse_arc_type(j.get<std::string>()); }

void to_json(nlohmann::json &j, const Character &c) {
  j = nlohmann::json{{"character_id", c.character_id},
                     {"series", c.series},
                     {"preferred_name", c.preferred_name},
                     {"appellations", c.appellations}};
}
void from_json(const nlohmann::json &j, Character &c) {
  c.character_id = j.at("character_id").get<std::string>();
  c.series = j.at("series").get<SeriesId>();
  c.preferred_name = j.at("preferred_name").get<std::string>();
  c.appellations.clear();
  for (const auto &a : j.value("appellations", nlohmann::json::array()))
    c.add_appellation(a.get<std::string>());
  c.add_appellation(c.preferred_name);
}

void to_json(nlohmann::json &j, const Progression &p) {
  j = nlohmann::json{{"progression_id", p.progression_id},
                     {"arc_id", p.arc_id},
                     {"series", p.series},
                     {"episode", p.episode},
                     {"content", p.texts()},
                     {"interfering_characters", p.interfering_characters}};
}
void from_json(const nlohmann::json &j, Progression &p) {
  p.progression_id = j.value("progression_id", std::string());
  p.arc_id = j.value("arc_id", std::string());
  p.series = j.at("series").get<SeriesId>();
  p.episode = j.at("episode").get<EpisodeKey>();
  p.content = Progression::make_content(j.at("content").get<std::vector<std::string>>());
  p.interfering_characters =
      j.value("interfering_characters", std::vector<std::string>{});
}

void to_json(nlohmann::json &j, const NarrativeArc &a) {
  j = nlohmann::json{{"arc_id", a.arc_id},
                     {"series", a.series},
                     {"title", a.title},
                     {"description", a.description},
                     {"arc_type", a.arc_type},
                     {"main_characters", a.main_characters},
                     {"progressions", a.progressions}};
}
void from_json(const nlohmann::json &j, NarrativeArc &a) {
  a.arc_id = j.value("arc_id", std::string());
  a.series = j.at("series").get<SeriesId>();
  a.title = j.at("title").get<std::string>();
  a.description = j.at("description").get<std::string>();
  a.arc_type = j.at("arc_type").get<ArcType>();
  a.main_characters = j.value("main_characters", std::vector<std::string>{});
  a.progressions = j.value("progressions", std::vector<Progression>{});
}

}  // namespace narrmem
