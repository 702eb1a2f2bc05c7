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

#ifndef NARRMEM_PIPELINE_DRAFT_HPP_
#define NARRMEM_PIPELINE_DRAFT_HPP_

#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "narrmem/core/types.hpp"

namespace narrmem {

enum class DraftOrigin { kAgent2, kAgent3New, kAgent3Validated, kMerged };
enum class DraftFlag { kPossiblyPresent, kNeedsDisambiguation };

std::string to_string(DraftOrigin origin);
DraftOrigin parse_draft_origin(const std::string &s);
std::string to_string(DraftFlag flag);
DraftFlag parse_draft_flag(const std::string &s);

// Working-memory candidate arc for the episode being processed.
struct ArcDraft {
  std::string provisional_id;
  std::string title;
  std::string description;
  ArcType arc_type = ArcType::kSoap;
  std::vector<std::string> main_characters;         // preferred names
  std::vector<std::string> interfering_characters;  // preferred names
  std::vector<std::string> progression_content;     // this episode's utterances
  DraftOrigin origin = DraftOrigin::kAgent2;
  std::set<DraftFlag> flags;
  // Arc in long-term memory this draft continues; empty for new storylines.
  std::string existing_arc_id;
  // Filled by Agent 6 and kept in step with the name lists.
  std::vector<std::string> main_character_ids;
  std::vector<std::string> interfering_character_ids;
  std::vector<std::string> unresolved_names;

  friend bool operator==(const ArcDraft &, const ArcDraft &) = default;
};

void to_json(nlohmann::json &j, const ArcDraft &d);
void from_json(const nlohmann::json &j, ArcDraft &d);

// Arc retrieved by Agent 1 as possibly present in the current episode.
struct FlaggedArc {
  std::string arc_id;
  std::string title;
  std::string description;
  ArcType arc_type = ArcType::kSoap;
  double score = 0;

  friend bool operator==(const FlaggedArc &, const FlaggedArc &) = default;
};

void to_json(nlohmann::json &j, const FlaggedArc &f);
void from_json(const nlohmann::json &j, FlaggedArc &f);

}  // namespace narrmem

#endif  // NARRMEM_PIPELINE_DRAFT_HPP_
