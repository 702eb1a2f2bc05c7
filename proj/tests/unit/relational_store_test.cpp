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

#include <gtest/gtest.h>

#include "narrmem/core/error.hpp"
#include "narrmem/core/ids.hpp"
#include "narrmem/memory/memory_stores.hpp"

namespace narrmem {
namespace {

const SeriesId kSeries("greys-anatomy");

Character character(const std::string &name, std::vector<std::string> extra = {}) {
  Character c;
  c.character_id = derive_id(IdKind::kCharacter, kSeries, name);
  c.series = kSeries;
  c.preferred_name = name;
  c.add_appellation(name);
  for (const auto &a : extra) c.add_appellation(a);
  return c;
}

NarrativeArc arc(const std::string &title, const std::vector<std::string> &mains,
                 const std::vector<EpisodeKey> &episodes,
                 const std::vector<std::string> &interfering = {}) {
  NarrativeArc a;
  a.arc_id = derive_id(IdKind::kArc, kSeries, title);
  a.series = kSeries;
  a.title = title;
  a.description = title + " description";
  a.arc_type = ArcType::kSoap;
  a.main_characters = mains;
  for (const auto &e : episodes) {
    Progression p;
    p.progression_id = derive_id(IdKind::kProgression, kSeries, a.arc_id + e.str());
    p.arc_id = a.arc_id;
    p.series = kSeries;
    p.episode = e;
    p.content = Progression::make_content({"First event.", "Second event."});
    p.interfering_characters = interfering;
    a.progressions.push_back(p);
  }
  return a;
}

class RelationalStoreTest : public ::testing::Test {
 protected:
  MemoryStores stores{4};
  RelationalStore &db = stores.relational();
};

TEST_F(RelationalStoreTest, SaveLoadRoundTrip) {
  auto meredith = character("Meredith Grey", {"Meredith", "Grey"});
  auto derek = character("Derek Shepherd");
  db.save_character(meredith);
  db.save_character(derek);
  auto a = arc("Secret Romance", {meredith.character_id}, {EpisodeKey(1, 1), EpisodeKey(1, 2)},
               {derek.character_id});
  db.save_arc(a);
  EXPECT_EQ(db.load_arc(a.arc_id), a);
  EXPECT_EQ(db.load_character(meredith.character_id), meredith);
}

TEST_F(RelationalStoreTest, ReferentialIntegrityOnSave) {
  auto a = arc("Orphan", {"char_missing"}, {EpisodeKey(1, 1)});
  try {
    db.save_arc(a);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), "UNKNOWN_CHARACTER");
  }
  EXPECT_FALSE(db.find_arc(a.arc_id));
}

TEST_F(RelationalStoreTest, AppellationUniquePerSeries) {
  db.save_character(character("Jerry Frost", {"Frost"}));
  try {
    db.save_character(character("Frost"));
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), "APPELLATION_CONFLICT");
  }
  EXPECT_TRUE(db.find_by_appellation(kSeries, "  FROST "));
}

TEST_F(RelationalStoreTest, ListArcsFilters) {
  auto m = character("Meredith Grey");
  auto c = character("Cristina Yang");
  db.save_character(m);
  db.save_character(c);
  auto a1 = arc("A", {m.character_id}, {EpisodeKey(1, 1)});
  auto a2 = arc("B", {c.character_id}, {EpisodeKey(2, 1)}, {m.character_id});
  a2.arc_type = ArcType::kGenreSpecific;
  db.save_arc(a1);
  db.save_arc(a2);
  EXPECT_EQ(db.list_arcs(kSeries).size(), 2u);
  EXPECT_EQ(db.list_arcs(kSeries, {.season = 2}).size(), 1u);
  EXPECT_EQ(db.list_arcs(kSeries, {.arc_type = ArcType::kSoap}).size(), 1u);
  EXPECT_EQ(db.list_arcs(kSeries, {.character_id = m.character_id}).size(), 2u);
  EXPECT_EQ(db.list_arcs(kSeries, {.character_id = c.character_id}).size(), 1u);
}

TEST_F(RelationalStoreTest, MergeCharactersUnionsAndRewrites) {
  auto a_char = character("Frost");
  Character b_char;
  b_char.character_id = derive_id(IdKind::kCharacter, kSeries, "Jerry");
  b_char.series = kSeries;
  b_char.preferred_name = "Jerry";
  b_char.add_appellation("Jerry");
  auto other = character("Meredith Grey");
  db.save_character(a_char);
  db.save_character(b_char);
  db.save_character(other);
  auto x = arc("Frost Case", {a_char.character_id, other.character_id}, {EpisodeKey(1, 4)},
               {a_char.character_id});
  auto y = arc("Second", {other.character_id}, {EpisodeKey(1, 5)}, {a_char.character_id});
  db.save_arc(x);
  db.save_arc(y);

  auto merged = db.merge_characters(b_char.character_id, a_char.character_id);
  EXPECT_TRUE(merged.has_appellation("Frost"));
  EXPECT_TRUE(merged.has_appellation("Jerry"));
  EXPECT_FALSE(db.find_character(a_char.character_id));
  EXPECT_TRUE(db.dangling_character_refs().empty());

  auto x2 = db.load_arc(x.arc_id);
  EXPECT_EQ(x2.main_characters, (std::vector<std::string>{b_char.character_id, other.character_id}));
  // Main characters never also appear as interfering.
  EXPECT_TRUE(x2.progressions[0].interfering_characters.empty());
  EXPECT_EQ(db.load_arc(y.arc_id).progressions[0].interfering_characters,
            std::vector<std::string>{b_char.character_id});
}

TEST_F(RelationalStoreTest, MergeUnknownIds) {
  db.save_character(character("Meredith Grey"));
  EXPECT_THROW(db.merge_characters(derive_id(IdKind::kCharacter, kSeries, "Meredith Grey"), "char_x"),
               Error);
}

TEST_F(RelationalStoreTest, DeleteArcCascades) {
  auto m = character("Meredith Grey");
  db.save_character(m);
  auto a = arc("Three Episodes", {m.character_id}, {EpisodeKey(1, 1), EpisodeKey(1, 2), EpisodeKey(1, 3)});
  db.save_arc(a);
  EmbeddingRecord summary;
  summary.target_id = a.arc_id;
  summary.series = kSeries;
  summary.vector = {1, 0, 0, 0};
  stores.vectors().upsert(summary);
  for (const auto &p : a.progressions) {
    EmbeddingRecord r;
    r.target_kind = TargetKind::kProgression;
    r.target_id = p.progression_id;
    r.arc_id = a.arc_id;
    r.series = kSeries;
    r.episode = p.episode;
    r.vector = {0, 1, 0, 0};
    stores.vectors().upsert(r);
  }
  EXPECT_EQ(db.count_progressions(), 3u);
  stores.delete_arc(a.arc_id);
  EXPECT_EQ(db.count_progressions(), 0u);
  EXPECT_EQ(db.count_orphan_progressions(), 0u);
  EXPECT_EQ(stores.vectors().size(), 0u);
  EXPECT_EQ(stores.count_orphan_embeddings(), 0u);
  EXPECT_THROW(db.delete_arc(a.arc_id), Error);
}

TEST_F(RelationalStoreTest, TransactionRollsBack) {
  auto m = character("Meredith Grey");
  EXPECT_THROW(db.transaction([&] {
    db.save_character(m);
    throw Error("BOOM", "abort");
  }),
               Error);
  EXPECT_FALSE(db.find_character(m.character_id));
}

TEST_F(RelationalStoreTest, ProcessedRegister) {
  db.mark_processed(kSeries, EpisodeKey(1, 2), {{"new_arcs", 1}});
  db.mark_processed(kSeries, EpisodeKey(1, 1), {{"new_arcs", 2}});
  EXPECT_EQ(db.processed_episodes(kSeries), (std::vector<EpisodeKey>{EpisodeKey(1, 1), EpisodeKey(1, 2)}));
  EXPECT_EQ((*db.processed_result(kSeries, EpisodeKey(1, 1)))["new_arcs"], 2);
  db.clear_processed(kSeries, EpisodeKey(1, 1));
  EXPECT_FALSE(db.processed_result(kSeries, EpisodeKey(1, 1)));
}

}  // namespace
}  // namespace narrmem
