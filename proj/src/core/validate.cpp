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

#include "narrmem/core/validate.hpp"

#include <algorithm>
#include <regex>
#include <set>

#include "narrmem/core/text.hpp"

namespace narrmem {

namespace {

bool blank(const std::string &s) { return text::trim(s).empty(); }

// Template leftovers ("{name}") and explicit pronoun markers ("[PRONOUN]",
// "[UNRESOLVED: she]") count as unresolved.
bool has_placeholder(const std::string &s) {
  static const std::regex kPattern("\\{[A-Za-z_][A-Za-z0-9_]*\\}|\\[(PRONOUN|UNRESOLVED)[^\\]]*\\]",
                                   std::regex::icase);
  return std::regex_search(s, kPattern);
}

}  // namespace

ValidationReport validate_arc(const NarrativeArc &arc, const CharacterExists &character_exists) {
  ValidationReport report;
  auto add = [&](const char *code, std::string detail) {
    report.push_back({code, std::move(detail)});
  };

  if (blank(arc.arc_id)) add(violation::kEmptyArcId, "arc_id is empty");
  if (arc.series.empty()) add(violation::kEmptySeries, "series is empty");
  if (blank(arc.title)) add(violation::kEmptyTitle, "title is empty");
  if (blank(arc.description)) add(violation::kEmptyDescription, "description is empty");

  if (arc.main_characters.empty()) add(violation::kNoMainCharacters, "no main characters");
  std::set<std::string> seen_main;
  for (const auto &c : arc.main_characters) {
    if (!seen_main.insert(c).second) add(violation::kDuplicateMainCharacter, c);
    if (character_exists && !character_exists(c)) add(violation::kUnknownCharacter, c);
  }

  std::set<EpisodeKey> episodes;
  for (size_t i = 0; i < arc.progressions.size(); ++i) {
    const Progression &p = arc.progressions[i];
    const std::string where = p.episode.str();
    if (i > 0 && p.episode < arc.progressions[i - 1].episode)
      add(violation::kProgressionsUnsorted, where);
    if (!episodes.insert(p.episode).second) add(violation::kDuplicateEpisode, where);
    if (blank(p.progression_id)) add(violation::kEmptyProgressionId, where);
    if (p.arc_id != arc.arc_id)
      add(violation::kProgressionArcMismatch, where + ": arc_id '" + p.arc_id + "'");
    if (p.series != arc.series) add(violation::kProgressionSeriesMismatch, where);
    if (p.content.empty()) add(violation::kEmptyProgression, where);
    for (size_t k = 0; k < p.content.size(); ++k) {
      const Utterance &u = p.content[k];
      if (u.ordinal != static_cast<int>(k))
        add(violation::kOrdinalGap, where + ": expected ordinal " + std::to_string(k) + ", got " +
                                        std::to_string(u.ordinal));
      if (blank(u.text)) add(violation::kEmptyUtterance, where + "#" + std::to_string(k));
      else if (has_placeholder(u.text))
        add(violation::kUnresolvedPlaceholder, where + "#" + std::to_string(k));
    }
    if (character_exists) {
      for (const auto &c : p.interfering_characters)
        if (!character_exists(c)) add(violation::kUnknownCharacter, where + ": " + c);
    }
  }

  if (arc.arc_type == ArcType::kAnthology && episodes.size() > 1) {
    std::vector<std::string> names;
    for (const auto &e : episodes) names.push_back(e.str());
    add(violation::kAnthologyMultiEpisode, text::join(names, ","));
  }
  return report;
}

bool has_violation(const ValidationReport &report, std::string_view code) {
  return std::any_of(report.begin(), report.end(),
                     [&](const Violation &v) { return v.code == code; });
}

std::vector<std::string> violation_codes(const ValidationReport &report) {
  std::vector<std::string> out;
  for (const auto &v : report)
    if (std::find(out.begin(), out.end(), v.code) == out.end()) out.push_back(v.code);
  return out;
}

void to_json(nlohmann::json &j, const Violation &v) {
  j = nlohmann::json{{"code", v.code}, {"detail", v.detail}};
}

}  // namespace narrmem
