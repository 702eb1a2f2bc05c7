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

#include "narrmem/memory/relational_store.hpp"

#include <sqlite3.h>

#include <algorithm>
#include <set>

#include "narrmem/core/error.hpp"

namespace narrmem {

namespace {

constexpr const char *kSchema = R"sql(
PRAGMA foreign_keys = ON;
CREATE TABLE IF NOT EXISTS characters (
  character_id TEXT PRIMARY KEY,
  series TEXT NOT NULL,
  preferred_name TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS appellations (
  character_id TEXT NOT NULL REFERENCES characters(character_id) ON DELETE CASCADE,
  series TEXT NOT NULL,
  surface TEXT NOT NULL,
  folded TEXT NOT NULL,
  UNIQUE (series, folded)
);
CREATE TABLE IF NOT EXISTS arcs (
  arc_id TEXT PRIMARY KEY,
  series TEXT NOT NULL,
  title TEXT NOT NULL,
  description TEXT NOT NULL,
  arc_type TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS arc_main_characters (
  arc_id TEXT NOT NULL REFERENCES arcs(arc_id) ON DELETE CASCADE,
  position INTEGER NOT NULL,
  character_id TEXT NOT NULL REFERENCES characters(character_id),
  PRIMARY KEY (arc_id, position)
);
CREATE TABLE IF NOT EXISTS progressions (
  progression_id TEXT PRIMARY KEY,
  arc_id TEXT NOT NULL REFERENCES arcs(arc_id) ON DELETE CASCADE,
  series TEXT NOT NULL,
  season INTEGER NOT NULL,
  episode INTEGER NOT NULL,
  UNIQUE (arc_id, season, episode)
);
CREATE TABLE IF NOT EXISTS utterances (
  progression_id TEXT NOT NULL REFERENCES progressions(progression_id) ON DELETE CASCADE,
  ordinal INTEGER NOT NULL,
  text TEXT NOT NULL,
  PRIMARY KEY (progression_id, ordinal)
);
CREATE TABLE IF NOT EXISTS progression_interfering (
  progression_id TEXT NOT NULL REFERENCES progressions(progression_id) ON DELETE CASCADE,
  position INTEGER NOT NULL,
  character_id TEXT NOT NULL REFERENCES characters(character_id),
  PRIMARY KEY (progression_id, position)
);
CREATE TABLE IF NOT EXISTS processed_episodes (
  series TEXT NOT NULL,
  season INTEGER NOT NULL,
  episode INTEGER NOT NULL,
  result TEXT NOT NULL,
  PRIMARY KEY (series, season, episode)
);
)sql";

// Thin RAII wrapper over a prepared statement.
class Statement {
 public:
  Statement(sqlite3 *db, const char *sql) : db_(db) {
    if (sqlite3_prepare_v2(db, sql, -1, &stmt_, nullptr) != SQLITE_OK)
      throw Error("STORAGE_ERROR", std::string(sqlite3_errmsg(db)) + " in: " + sql);
  }
  ~Statement() { sqlite3_finalize(stmt_); }
  Statement(const Statement &) = delete;
  Statement &operator=(const Statement &) = delete;

  Statement &bind(int idx, const std::string &v) {
    check(sqlite3_bind_text(stmt_, idx, v.data(), static_cast<int>(v.size()), SQLITE_TRANSIENT));
    return *this;
  }
  Statement &bind(int idx, int64_t v) {
    check(sqlite3_bind_int64(stmt_, idx, v));
    return *this;
  }
  Statement &bind(int idx, int v) { return bind(idx, static_cast<int64_t>(v)); }

  // Returns true while rows are available.
  bool step() {
    int rc = sqlite3_step(stmt_);
    if (rc == SQLITE_ROW) return true;
    if (rc == SQLITE_DONE) return false;
    if (rc == SQLITE_CONSTRAINT)
      throw Error("CONSTRAINT_VIOLATION", sqlite3_errmsg(db_));
    throw Error("STORAGE_ERROR", sqlite3_errmsg(db_));
  }
  void run() {
    while (step()) {
    }
  }

  std::string text(int col) const {
    const unsigned char *p = sqlite3_column_text(stmt_, col);
    int n = sqlite3_column_bytes(stmt_, col);
    return p ? std::string(reinterpret_cast<const char *>(p), static_cast<size_t>(n)) : std::string();
  }
  int64_t integer(int col) const { return sqlite3_column_int64(stmt_, col); }

 private:
  void check(int rc) {
    if (rc != SQLITE_OK) throw Error("STORAGE_ERROR", sqlite3_errmsg(db_));
  }

  sqlite3 *db_;
  sqlite3_stmt *stmt_ = nullptr;
};

void dedupe_in_place(std::vector<std::string> &ids) {
  std::set<std::string> seen;
  std::erase_if(ids, [&](const std::string &id) { return !seen.insert(id).second; });
}

}  // namespace

RelationalStore::RelationalStore(const std::string &path) {
  int flags = SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE | SQLITE_OPEN_FULLMUTEX;
  if (sqlite3_open_v2(path.c_str(), &db_, flags, nullptr) != SQLITE_OK) {
    std::string msg = db_ ? sqlite3_errmsg(db_) : "out of memory";
    sqlite3_close(db_);
    db_ = nullptr;
    throw Error("STORAGE_ERROR", "cannot open " + path + ": " + msg);
  }
  sqlite3_busy_timeout(db_, 5000);
  exec(kSchema);
}

RelationalStore::~RelationalStore() { sqlite3_close(db_); }

void RelationalStore::exec(const char *sql) const {
  char *err = nullptr;
  if (sqlite3_exec(db_, sql, nullptr, nullptr, &err) != SQLITE_OK) {
    std::string msg = err ? err : "unknown";
    sqlite3_free(err);
    throw Error("STORAGE_ERROR", msg);
  }
}

void RelationalStore::transaction(const std::function<void()> &fn) {
  std::lock_guard lock(mu_);
  if (tx_depth_ > 0) {
    ++tx_depth_;
    try {
      fn();
    } catch (...) {
      --tx_depth_;
      throw;
    }
    --tx_depth_;
    return;
  }
  exec("BEGIN IMMEDIATE");
  tx_depth_ = 1;
  try {
    fn();
  } catch (...) {
    tx_depth_ = 0;
    exec("ROLLBACK");
    throw;
  }
  tx_depth_ = 0;
  exec("COMMIT");
}

// ---------------------------------------------------------------------------
// characters

void RelationalStore::write_character_locked(const Character &c) {
  if (c.character_id.empty()) throw Error("EMPTY_ID", "character without id");
  if (c.preferred_name.empty()) throw Error("EMPTY_NAME", "character without preferred name");
  Character normalized = c;
  normalized.add_appellation(c.preferred_name);

  for (const auto &a : normalized.appellations) {
    Statement q(db_, "SELECT character_id FROM appellations WHERE series = ? AND folded = ?");
    q.bind(1, c.series.str()).bind(2, fold_appellation(a));
    if (q.step() && q.text(0) != c.character_id) {
      throw Error("APPELLATION_CONFLICT",
                  "'" + a + "' already belongs to " + q.text(0) + " (saving " + c.character_id + ")");
    }
  }
  Statement up(db_,
               "INSERT INTO characters(character_id, series, preferred_name) VALUES (?, ?, ?) "
               "ON CONFLICT(character_id) DO UPDATE SET series = excluded.series, "
               "preferred_name = excluded.preferred_name");
  up.bind(1, c.character_id).bind(2, c.series.str()).bind(3, c.preferred_name).run();
  Statement del(db_, "DELETE FROM appellations WHERE character_id = ?");
  del.bind(1, c.character_id).run();
  for (const auto &a : normalized.appellations) {
    Statement ins(db_,
                  "INSERT INTO appellations(character_id, series, surface, folded) VALUES (?, ?, ?, ?)");
    ins.bind(1, c.character_id).bind(2, c.series.str()).bind(3, a).bind(4, fold_appellation(a)).run();
  }
}

void RelationalStore::save_character(const Character &character) {
  transaction([&] { write_character_locked(character); });
}

std::optional<Character> RelationalStore::read_character_locked(const std::string &id) const {
  Statement q(db_, "SELECT series, preferred_name FROM characters WHERE character_id = ?");
  q.bind(1, id);
  if (!q.step()) return std::nullopt;
  Character c;
  c.character_id = id;
  c.series = SeriesId(q.text(0));
  c.preferred_name = q.text(1);
  Statement a(db_, "SELECT surface FROM appellations WHERE character_id = ? ORDER BY folded");
  a.bind(1, id);
  while (a.step()) c.appellations.push_back(a.text(0));
  return c;
}

std::optional<Character> RelationalStore::find_character(const std::string &id) const {
  std::lock_guard lock(mu_);
  return read_character_locked(id);
}

Character RelationalStore::load_character(const std::string &id) const {
  auto c = find_character(id);
  if (!c) throw Error("UNKNOWN_ID", "no character " + id);
  return *c;
}

std::vector<Character> RelationalStore::list_characters(const SeriesId &series) const {
  std::lock_guard lock(mu_);
  std::vector<std::string> ids;
  {
    Statement q(db_,
                "SELECT character_id FROM characters WHERE series = ? "
                "ORDER BY preferred_name, character_id");
    q.bind(1, series.str());
    while (q.step()) ids.push_back(q.text(0));
  }
  std::vector<Character> out;
  for (const auto &id : ids) out.push_back(*read_character_locked(id));
  return out;
}

std::optional<Character> RelationalStore::find_by_appellation(const SeriesId &series,
                                                              std::string_view surface) const {
  std::lock_guard lock(mu_);
  Statement q(db_, "SELECT character_id FROM appellations WHERE series = ? AND folded = ?");
  q.bind(1, series.str()).bind(2, fold_appellation(surface));
  if (!q.step()) return std::nullopt;
  return read_character_locked(q.text(0));
}

Character RelationalStore::merge_characters(const std::string &keep_id, const std::string &drop_id) {
  if (keep_id == drop_id) throw Error("MERGE_CONFLICT", "cannot merge a character into itself");
  Character result;
  transaction([&] {
    auto keep = read_character_locked(keep_id);
    auto drop = read_character_locked(drop_id);
    if (!keep) throw Error("UNKNOWN_ID", "no character " + keep_id);
    if (!drop) throw Error("UNKNOWN_ID", "no character " + drop_id);
    if (keep->series != drop->series)
      throw Error("MERGE_CONFLICT", "characters belong to different series");

    for (const auto &a : drop->appellations) {
      Statement q(db_, "SELECT character_id FROM appellations WHERE series = ? AND folded = ?");
      q.bind(1, keep->series.str()).bind(2, fold_appellation(a));
      if (q.step() && q.text(0) != keep_id && q.text(0) != drop_id)
        throw Error("APPELLATION_CONFLICT", "'" + a + "' belongs to third character " + q.text(0));
    }

    std::vector<std::string> affected;
    {
      Statement q(db_,
                  "SELECT DISTINCT arc_id FROM arc_main_characters WHERE character_id = ?1 "
                  "UNION SELECT DISTINCT p.arc_id FROM progression_interfering i "
                  "JOIN progressions p ON p.progression_id = i.progression_id "
                  "WHERE i.character_id = ?1 ORDER BY 1");
      q.bind(1, drop_id);
      while (q.step()) affected.push_back(q.text(0));
    }
    std::vector<NarrativeArc> rewritten;
    for (const auto &arc_id : affected) {
      NarrativeArc arc = *read_arc_locked(arc_id);
      auto rewrite = [&](std::vector<std::string> &ids) {
        for (auto &id : ids)
          if (id == drop_id) id = keep_id;
        dedupe_in_place(ids);
      };
      rewrite(arc.main_characters);
      std::set<std::string> mains(arc.main_characters.begin(), arc.main_characters.end());
      for (auto &p : arc.progressions) {
        rewrite(p.interfering_characters);
        std::erase_if(p.interfering_characters, [&](const std::string &id) { return mains.count(id) > 0; });
      }
      rewritten.push_back(std::move(arc));
    }

    keep->appellations.insert(keep->appellations.end(), drop->appellations.begin(),
                              drop->appellations.end());
    Character merged = *keep;
    merged.appellations.clear();
    for (const auto &a : keep->appellations) merged.add_appellation(a);

    for (const auto &arc : rewritten) write_arc_locked(arc);
    {
      Statement d(db_, "DELETE FROM characters WHERE character_id = ?");
      d.bind(1, drop_id).run();
    }
    write_character_locked(merged);
    result = merged;
  });
  return result;
}

// ---------------------------------------------------------------------------
// arcs

void RelationalStore::write_arc_locked(const NarrativeArc &arc) {
  if (arc.arc_id.empty()) throw Error("EMPTY_ID", "arc without id");
  auto require_character = [&](const std::string &id) {
    Statement q(db_, "SELECT 1 FROM characters WHERE character_id = ?");
    q.bind(1, id);
    if (!q.step()) throw Error("UNKNOWN_CHARACTER", "arc " + arc.arc_id + " references " + id);
  };
  for (const auto &c : arc.main_characters) require_character(c);
  for (const auto &p : arc.progressions)
    for (const auto &c : p.interfering_characters) require_character(c);

  {
    Statement d(db_, "DELETE FROM arcs WHERE arc_id = ?");
    d.bind(1, arc.arc_id).run();
  }
  Statement ins(db_,
                "INSERT INTO arcs(arc_id, series, title, description, arc_type) VALUES (?, ?, ?, ?, ?)");
  ins.bind(1, arc.arc_id)
      .bind(2, arc.series.str())
      .bind(3, arc.title)
      .bind(4, arc.description)
      .bind(5, std::string(to_string(arc.arc_type)))
      .run();
  for (size_t i = 0; i < arc.main_characters.size(); ++i) {
    Statement m(db_, "INSERT INTO arc_main_characters(arc_id, position, character_id) VALUES (?, ?, ?)");
    m.bind(1, arc.arc_id).bind(2, static_cast<int64_t>(i)).bind(3, arc.main_characters[i]).run();
  }
  for (const auto &p : arc.progressions) {
    Statement pi(db_,
                 "INSERT INTO progressions(progression_id, arc_id, series, season, episode) "
                 "VALUES (?, ?, ?, ?, ?)");
    pi.bind(1, p.progression_id)
        .bind(2, arc.arc_id)
        .bind(3, p.series.str())
        .bind(4, p.episode.season)
        .bind(5, p.episode.episode)
        .run();
    for (const auto &u : p.content) {
      Statement ui(db_, "INSERT INTO utterances(progression_id, ordinal, text) VALUES (?, ?, ?)");
      ui.bind(1, p.progression_id).bind(2, u.ordinal).bind(3, u.text).run();
    }
    for (size_t i = 0; i < p.interfering_characters.size(); ++i) {
      Statement ii(db_,
                   "INSERT INTO progression_interfering(progression_id, position, character_id) "
                   "VALUES (?, ?, ?)");
      ii.bind(1, p.progression_id).bind(2, static_cast<int64_t>(i)).bind(3, p.interfering_characters[i]).run();
    }
  }
}

void RelationalStore::save_arc(const NarrativeArc &arc) {
  transaction([&] { write_arc_locked(arc); });
}

std::optional<NarrativeArc> RelationalStore::read_arc_locked(const std::string &arc_id) const {
  Statement q(db_, "SELECT series, title, description, arc_type FROM arcs WHERE arc_id = ?");
  q.bind(1, arc_id);
  if (!q.step()) return std::nullopt;
  NarrativeArc arc;
  arc.arc_id = arc_id;
  arc.series = SeriesId(q.text(0));
  arc.title = q.text(1);
  arc.description = q.text(2);
  arc.arc_type = parse_arc_type(q.text(3));

  Statement m(db_, "SELECT character_id FROM arc_main_characters WHERE arc_id = ? ORDER BY position");
  m.bind(1, arc_id);
  while (m.step()) arc.main_characters.push_back(m.text(0));

  Statement p(db_,
              "SELECT progression_id, series, season, episode FROM progressions WHERE arc_id = ? "
              "ORDER BY season, episode");
  p.bind(1, arc_id);
  while (p.step()) {
    Progression prog;
    prog.progression_id = p.text(0);
    prog.arc_id = arc_id;
    prog.series = SeriesId(p.text(1));
    prog.episode = EpisodeKey(static_cast<int>(p.integer(2)), static_cast<int>(p.integer(3)));
    Statement u(db_, "SELECT ordinal, text FROM utterances WHERE progression_id = ? ORDER BY ordinal");
    u.bind(1, prog.progression_id);
    while (u.step()) prog.content.push_back({static_cast<int>(u.integer(0)), u.text(1)});
    Statement i(db_,
                "SELECT character_id FROM progression_interfering WHERE progression_id = ? "
                "ORDER BY position");
    i.bind(1, prog.progression_id);
    while (i.step()) prog.interfering_characters.push_back(i.text(0));
    arc.progressions.push_back(std::move(prog));
  }
  return arc;
}

std::optional<NarrativeArc> RelationalStore::find_arc(const std::string &arc_id) const {
  std::lock_guard lock(mu_);
  return read_arc_locked(arc_id);
}

NarrativeArc RelationalStore::load_arc(const std::string &arc_id) const {
  auto arc = find_arc(arc_id);
  if (!arc) throw Error("UNKNOWN_ID", "no arc " + arc_id);
  return *arc;
}

std::vector<NarrativeArc> RelationalStore::list_arcs(const SeriesId &series,
                                                     const ArcFilter &filter) const {
  std::lock_guard lock(mu_);
  std::vector<std::string> ids;
  {
    Statement q(db_, "SELECT arc_id FROM arcs WHERE series = ? ORDER BY title, arc_id");
    q.bind(1, series.str());
    while (q.step()) ids.push_back(q.text(0));
  }
  std::vector<NarrativeArc> out;
  for (const auto &id : ids) {
    NarrativeArc arc = *read_arc_locked(id);
    if (filter.arc_type && arc.arc_type != *filter.arc_type) continue;
    if (filter.season &&
        std::none_of(arc.progressions.begin(), arc.progressions.end(),
                     [&](const Progression &p) { return p.episode.season == *filter.season; }))
      continue;
    if (filter.character_id) {
      const auto &c = *filter.character_id;
      bool found = std::find(arc.main_characters.begin(), arc.main_characters.end(), c) !=
                   arc.main_characters.end();
      for (const auto &p : arc.progressions)
        found = found || std::find(p.interfering_characters.begin(), p.interfering_characters.end(),
                                   c) != p.interfering_characters.end();
      if (!found) continue;
    }
    out.push_back(std::move(arc));
  }
  return out;
}

void RelationalStore::delete_arc(const std::string &arc_id) {
  transaction([&] {
    Statement q(db_, "SELECT 1 FROM arcs WHERE arc_id = ?");
    q.bind(1, arc_id);
    if (!q.step()) throw Error("UNKNOWN_ID", "no arc " + arc_id);
    Statement d(db_, "DELETE FROM arcs WHERE arc_id = ?");
    d.bind(1, arc_id).run();
  });
}

std::vector<SeriesId> RelationalStore::list_series() const {
  std::lock_guard lock(mu_);
  std::vector<SeriesId> out;
  Statement q(db_,
              "SELECT series FROM arcs UNION SELECT series FROM characters "
              "UNION SELECT series FROM processed_episodes ORDER BY 1");
  while (q.step()) out.emplace_back(q.text(0));
  return out;
}

// ---------------------------------------------------------------------------
// processed episodes

void RelationalStore::mark_processed(const SeriesId &series, const EpisodeKey &episode,
                                     const nlohmann::json &result) {
  std::lock_guard lock(mu_);
  Statement q(db_,
              "INSERT INTO processed_episodes(series, season, episode, result) VALUES (?, ?, ?, ?) "
              "ON CONFLICT(series, season, episode) DO UPDATE SET result = excluded.result");
  q.bind(1, series.str()).bind(2, episode.season).bind(3, episode.episode).bind(4, result.dump()).run();
}

void RelationalStore::clear_processed(const SeriesId &series, const EpisodeKey &episode) {
  std::lock_guard lock(mu_);
  Statement q(db_, "DELETE FROM processed_episodes WHERE series = ? AND season = ? AND episode = ?");
  q.bind(1, series.str()).bind(2, episode.season).bind(3, episode.episode).run();
}

std::optional<nlohmann::json> RelationalStore::processed_result(const SeriesId &series,
                                                                const EpisodeKey &episode) const {
  std::lock_guard lock(mu_);
  Statement q(db_,
              "SELECT result FROM processed_episodes WHERE series = ? AND season = ? AND episode = ?");
  q.bind(1, series.str()).bind(2, episode.season).bind(3, episode.episode);
  if (!q.step()) return std::nullopt;
  return nlohmann::json::parse(q.text(0));
}

std::vector<EpisodeKey> RelationalStore::processed_episodes(const SeriesId &series) const {
  std::lock_guard lock(mu_);
  std::vector<EpisodeKey> out;
  Statement q(db_,
              "SELECT season, episode FROM processed_episodes WHERE series = ? ORDER BY season, episode");
  q.bind(1, series.str());
  while (q.step()) out.emplace_back(static_cast<int>(q.integer(0)), static_cast<int>(q.integer(1)));
  return out;
}

// ---------------------------------------------------------------------------
// scans

size_t RelationalStore::count_progressions() const {
  std::lock_guard lock(mu_);
  Statement q(db_, "SELECT COUNT(*) FROM progressions");
  q.step();
  return static_cast<size_t>(q.integer(0));
}

size_t RelationalStore::count_orphan_progressions() const {
  std::lock_guard lock(mu_);
  Statement q(db_,
              "SELECT (SELECT COUNT(*) FROM progressions p LEFT JOIN arcs a ON a.arc_id = p.arc_id "
              "WHERE a.arc_id IS NULL) + (SELECT COUNT(*) FROM utterances u LEFT JOIN progressions p "
              "ON p.progression_id = u.progression_id WHERE p.progression_id IS NULL)");
  q.step();
  return static_cast<size_t>(q.integer(0));
}

std::vector<std::string> RelationalStore::dangling_character_refs() const {
  std::lock_guard lock(mu_);
  std::vector<std::string> out;
  Statement q(db_,
              "SELECT character_id FROM arc_main_characters WHERE character_id NOT IN "
              "(SELECT character_id FROM characters) UNION SELECT character_id FROM "
              "progression_interfering WHERE character_id NOT IN (SELECT character_id FROM characters) "
              "ORDER BY 1");
  while (q.step()) out.push_back(q.text(0));
  return out;
}

}  // namespace narrmem
