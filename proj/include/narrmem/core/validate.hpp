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

#ifndef NARRMEM_CORE_VALIDATE_HPP_
#define NARRMEM_CORE_VALIDATE_HPP_

#include <functional>
#include <string>
#include <vector>

#include "json.hpp"
#include "narrmem/core/types.hpp"

namespace narrmem {

// Violation codes reported by validate_arc.
namespace violation {
inline constexpr const char kEmptyArcId[] = "EMPTY_ARC_ID";
inline constexpr const char kEmptySeries[] = "EMPTY_SERIES";
inline constexpr const char kEmptyTitle[] = "EMPTY_TITLE";
inline constexpr const char kEmptyDescription[] = "EMPTY_DESCRIPTION";
inline constexpr const char kNoMainCharacters[] = "NO_MAIN_CHARACTERS";
inline constexpr const char kDuplicateMainCharacter[] = "DUPLICATE_MAIN_CHARACTER";
inline constexpr const char kUnknownCharacter[] = "UNKNOWN_CHARACTER";
inline constexpr const char kAnthologyMultiEpisode[] = "ANTHOLOGY_MULTI_EPISODE";
inline constexpr const char kProgressionsUnsorted[] = "PROGRESSIONS_UNSORTED";
inline constexpr const char kDuplicateEpisode[] = "DUPLICATE_EPISODE_PROGRESSION";
inline constexpr const char kProgressionArcMismatch[] = "PROGRESSION_ARC_MISMATCH";
inline constexpr const char kProgressionSeriesMismatch[] = "PROGRESSION_SERIES_MISMATCH";
inline constexpr const char kEmptyProgressionId[] = "EMPTY_PROGRESSION_ID";
inline constexpr const char kEmptyProgression[] = "EMPTY_PROGRESSION";
inline constexpr const char kOrdinalGap[] = "UTTERANCE_ORDINAL_GAP";
inline constexpr const char kEmptyUtterance[] = "EMPTY_UTTERANCE";
inline constexpr const char kUnresolvedPlaceholder[] = "UNRESOLVED_PLACEHOLDER";
}  // namespace violation

struct Violation {
  std::string code;
  std::string detail;

  friend bool operator==(const Violation &, const Violation &) = default;
};

using ValidationReport = std::vector<Violation>;

// Returns true when a character id is known. Optional: when absent, character
// references are not checked.
using CharacterExists = std::function<bool(const std::string &character_id)>;

// Checks every arc/progression/utterance invariant. Violations are data; this
// never throws.
ValidationReport validate_arc(const NarrativeArc &arc,
                              const CharacterExists &character_exists = {});

bool has_violation(const ValidationReport &report, std::string_view code);
std::vector<std::string> violation_codes(const ValidationReport &report);

void to_json(nlohmann::json &j, const Violation &v);

}  // namespace narrmem

#endif  // NARRMEM_CORE_VALIDATE_HPP_
