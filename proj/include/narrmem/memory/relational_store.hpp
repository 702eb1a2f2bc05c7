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

// Relational long-term memory backed by a single SQLite file: characters and
// their appellations, arcs, progressions, utterances, and the register of
// processed episodes.

#ifndef NARRMEM_MEMORY_RELATIONAL_STORE_HPP_
#define NARRMEM_MEMORY_RELATIONAL_STORE_HPP_

#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "narrmem/core/types.hpp"

struct sqlite3;

namespace narrmem {

struct ArcFilter {
  std::optional<int> season = std::nullopt;  // arcs with at least one progression in it
  std::optional<ArcType> arc_type = std::nullopt;
  std::optional<std::string> character_id = std::nullopt;  // main or interfering
};

class RelationalStore {
 public:
  // `path` may be ":memory:".
  explicit RelationalStore(const std::string &path);
  ~RelationalStore();

  RelationalStore(const RelationalStore &) = delete;
  RelationalStore &operator=(const RelationalStore &) = delete;

  // Runs `fn` inside one transaction; rolls back if it throws. Nested calls
  // join the outer transaction.
  void transaction(const std::function<void()> &fn);

  // --- characters
  // Upsert. Throws APPELLATION_CONFLICT when another character of the same
  // series owns an equivalent appellation.
  void save_character(const Character &character);
  std::optional<Character> find_character(const std::string &character_id) const;
  Character load_character(const std::string &character_id) const;  // UNKNOWN_ID
  std::vector<Character> list_characters(const SeriesId &series) const;
  std::optional<Character> find_by_appellation(const SeriesId &series,
                                               std::string_view surface) const;
  // Unions appellations into `keep_id`, rewrites every arc/progression
  // reference from `drop_id` to `keep_id`, deletes `drop_id`.
  Character merge_characters(const std::string &keep_id, const std::string &drop_id);

  // --- arcs
  // Upsert with its progressions. Throws UNKNOWN_CHARACTER when a referenced
  // character does not exist.
  void save_arc(const NarrativeArc &arc);
  std::optional<NarrativeArc> find_arc(const std::string &arc_id) const;
  NarrativeArc load_arc(const std::string &arc_id) const;  // UNKNOWN_ID
  // Ordered by (title, arc_id).
  std::vector<NarrativeArc> list_arcs(const SeriesId &series, const ArcFilter &filter = {}) const;
  // Cascades to progressions and utterances. Throws UNKNOWN_ID.
  void delete_arc(const std::string &arc_id);
  std::vector<SeriesId> list_series() const;

  // --- processed-episode register
  void mark_processed(const SeriesId &series, const EpisodeKey &episode,
                      const nlohmann::json &result);
  void clear_processed(const SeriesId &series, const EpisodeKey &episode);
  std::optional<nlohmann::json> processed_result(const SeriesId &series,
                                                 const EpisodeKey &episode) const;
  std::vector<EpisodeKey> processed_episodes(const SeriesId &series) const;

  // --- integrity scans
  size_t count_progressions() const;
  size_t count_orphan_progressions() const;
  // Character ids referenced by arcs/progressions that do not exist.
  std::vector<std::string> dangling_character_refs() const;

 private:
  void exec(const char *sql) const;
  void write_arc_locked(const NarrativeArc &arc);
  void write_character_locked(const Character &character);
  std::optional<NarrativeArc> read_arc_locked(const std::string &arc_id) const;
  std::optional<Character> read_character_locked(const std::string &character_id) const;

  sqlite3 *db_ = nullptr;
  mutable std::recursive_mutex mu_;
  int tx_depth_ = 0;
};

}  // namespace narrmem

#endif  // NARRMEM_MEMORY_RELATIONAL_STORE_HPP_
