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


#include "narrmem/pipeline/draft.hpp"

#include "narrmem/core/error.hpp"

namespace narrmem {

using nlohmann::json;

std::string to_string(DraftOrigin origin) {
  switch (origin) {
    case DraftOrigin::kAgent2:
      return "agent2";
    case DraftOrigin::kAgent3New:
      return "agent3_new";
    case DraftOrigin::kAgent3Validated:
      return "agent3_validated";
    case DraftOrigin::kMerged:
      return "merged";
  }
  return "agent2";
}

DraftOrigin parse_draft_origin(const std::string &s) {
  for (auto o : {DraftOrigin::kAgent2, DraftOrigin::kAgent3New, DraftOrigin::kAgent3Validated,
                 DraftOrigin::kMerged})
    if (to_string(o) == s) return o;
  throw Error("INVALID_ORIGIN", "unknown draft origin '" + s + "'");
}

std::string to_string(DraftFlag flag) {
  return flag == DraftFlag::kPossiblyPresent ? "possibly_present" : "needs_disambiguation";
}

DraftFlag parse_draft_flag(const std::string &s) {
  if (s == "possibly_present") return DraftFlag::kPossiblyPresent;
  if (s == "needs_disambiguation") return DraftFlag::kNeedsDisambiguation;
  throw Error("INVALID_FLAG", "unknown draft flag '" + s + "'");
}

void to_json(json &j, const ArcDraft &d) {
  json flags = json::array();
  for (auto f : d.flags) flags.push_back(to_string(f));
  j = json{{"provisional_id", d.provisional_id},
           {"title", d.title},
           {"description", d.description},
           {"arc_type", d.arc_type},
           {"main_characters", d.main_characters},
           {"interfering_characters", d.interfering_characters},
           {"progression_content", d.progression_content},
           {"origin", to_string(d.origin)},
           {"flags", flags},
           {"existing_arc_id", d.existing_arc_id},
           {"main_character_ids", d.main_character_ids},
           {"interfering_character_ids", d.interfering_character_ids},
           {"unresolved_names", d.unresolved_names}};
}

void from_json(const json &j, ArcDraft &d) {
  d = ArcDraft{};
  j.at("provisional_id").get_to(d.provisional_id);
  j.at("title").get_to(d.title);
  j.at("description").get_to(d.description);
  j.at("arc_type").get_to(d.arc_type);
  j.at("main_characters").get_to(d.main_characters);
  j.at("interfering_characters").get_to(d.interfering_characters);
  j.at("progression_content").get_to(d.progression_content);
  d.origin = parse_draft_origin(j.at("origin").get<std::string>());
  for (const auto &f : j.at("flags")) d.flags.insert(parse_draft_flag(f.get<std::string>()));
  d.existing_arc_id = j.value("existing_arc_id", "");
  d.main_character_ids = j.value("main_character_ids", std::vector<std::string>{});
  d.interfering_character_ids = j.value("interfering_character_ids", std::vector<std::string>{});
  d.unresolved_names = j.value("unresolved_names", std::vector<std::string>{});
}

void to_json(json &j, const FlaggedArc &f) {
  j = json{{"arc_id", f.arc_id},
           {"title", f.title},
           {"description", f.description},
           {"arc_type", f.arc_type},
           {"score", f.score}};
}

void from_json(const json &j, FlaggedArc &f) {
  j.at("arc_id").get_to(f.arc_id);
  j.at("title").get_to(f.title);
  j.at("description").get_to(f.description);
  j.at("arc_type").get_to(f.arc_type);
  j.at("score").get_to(f.score);
}

}  // namespace narrmem
