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

#ifndef NARRMEM_CORE_IDS_HPP_
#define NARRMEM_CORE_IDS_HPP_

#include <string>
#include <string_view>

#include "narrmem/core/types.hpp"

namespace narrmem {

enum class IdKind { kArc, kProgression, kCharacter, kEmbedding };

// Lowercase hex SHA-256 digest of `data`.
std::string sha256_hex(std::string_view data);

// Deterministic content-hash id: "<prefix>_<24 hex chars>" where the digest
// covers kind, series and discriminator. Throws Error("EMPTY_DISCRIMINATOR").
std::string derive_id(IdKind kind, const SeriesId &series, std::string_view discriminator);

// Id for a new progression of `arc` at `episode`: derived from arc id and
// episode, with a "#n" suffix while the arc already holds that id (a
// progression whose episode was edited keeps its original id).
std::string new_progression_id(const NarrativeArc &arc, const EpisodeKey &episode);

}  // namespace narrmem

#endif  // NARRMEM_CORE_IDS_HPP_
