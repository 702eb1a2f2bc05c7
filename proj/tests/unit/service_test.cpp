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
#include <httplib.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <random>

#include "narrmem/core/error.hpp"
#include "narrmem/core/ids.hpp"
#include "narrmem/llm/embedding.hpp"
#include "narrmem/service/api.hpp"
#include "narrmem/service/curation.hpp"

namespace narrmem {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

const SeriesId kSeries("night-shift");

fs::path fresh_dir(const std::string &name) {
  fs::path p = fs::temp_directory_path() / ("narrmem-service-" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

ApiConfig test_config(const std::string &name) {
  ApiConfig c;
  c.workspace = fresh_dir(name);
  c.prompts_dir = NARRMEM_PROMPTS_DIR;
  c.mode = GatewayMode::kReplay;
  return c;
}

std::map<std::string, std::string> seed_characters(RelationalStore &rel) {
  std::map<std::string, std::string> ids;
  for (auto [pref, aliases] : std::vector<std::pair<std::string, std::vector<std::string>>>{
           {"Nora Vance", {"Nora", "Dr. Vance"}},
           {"Theo Marsh", {"Theo"}},
           {"Iris Cole", {"Iris"}},
           {"Iris Coleman", {}}}) {
    Character c;
    c.character_id = derive_id(IdKind::kCharacter, kSeries, fold_appellation(pref));
    c.series = kSeries;
    c.preferred_name = pref;
    c.appellations = {pref};
    for (const auto &a : aliases) c.appellations.push_back(a);
    rel.save_character(c);
    ids[pref] = c.character_id;
  }
  return ids;
}

json arc_body(const std::string &title, const std::string &type, const std::string &main,
              std::vector<std::pair<std::string, std::vector<std::string>>> progs) {
  json ps = json::array();
  for (auto &[ep, content] : progs) ps.push_back({{"episode", ep}, {"content", content}});
  return json{{"series", kSeries.str()},     {"title", title},
              {"description", title + " unfolds."}, {"arc_type", type},
              {"main_characters", {main}},   {"progressions", ps}};
}

std::vector<std::string> texts_of(const json &prog) {
  std::vector<std::string> out;
  return prog["content"].get<std::vector<std::string>>();
}

// ---------------------------------------------------------------------------

TEST(HttpStatus, MapsErrorFamilies) {
  EXPECT_EQ(http_status("VALIDATION_FAILED"), 400);
  EXPECT_EQ(http_status("INVALID_EPISODE"), 400);
  EXPECT_EQ(http_status("EMPTY_NAME"), 400);
  EXPECT_EQ(http_status("BAD_REQUEST"), 400);
  EXPECT_EQ(http_status("UNKNOWN_ID"), 404);
  EXPECT_EQ(http_status("MERGE_CONFLICT"), 409);
  EXPECT_EQ(http_status("APPELLATION_CONFLICT"), 409);
  EXPECT_EQ(http_status("RUN_ACTIVE"), 409);
  EXPECT_EQ(http_status("REPLAY_MISS"), 503);
  EXPECT_EQ(http_status("UNAVAILABLE"), 503);
  EXPECT_EQ(http_status("STORAGE_ERROR"), 500);
}

TEST(ApiConfigTest, EnvOverridesAndRanges) {
  ApiConfig c;
  ::setenv("NARRMEM_THETA_DEDUP", "0.7", 1);
  ::setenv("NARRMEM_PORT", "9001", 1);
  c.apply_env();
  ::unsetenv("NARRMEM_THETA_DEDUP");
  ::unsetenv("NARRMEM_PORT");
  EXPECT_DOUBLE_EQ(c.pipeline.theta_dedup, 0.7);
  EXPECT_EQ(c.port, 9001);
  c.cluster_distance = 2.5;
  EXPECT_THROW(c.validate(), Error);
  c.cluster_distance = 0.3;
  c.ner = "spacy";
  EXPECT_THROW(c.validate(), Error);
  c.ner = "llm";
  EXPECT_NO_THROW(c.validate());
  ApiConfig r = json(c).get<ApiConfig>();
  EXPECT_EQ(json(r), json(c));
  ApiConfig res = c.resolved();
  EXPECT_EQ(res.db_path, c.workspace / "narrmem.db");
}

// --- Curation -----------------------------------------------------------------

struct CurationFixture : ::testing::Test {
  MemoryStores stores{128};
  HashedNgramEmbedder embedder{128};
  Curation cur{stores, embedder, true};
  std::map<std::string, std::string> ids = seed_characters(stores.relational());
};

TEST_F(CurationFixture, MergeConcatenatesSharedEpisodeKeepFirst) {
  auto keep = cur.create_arc(arc_body("Night Rounds", "Soap", ids["Nora Vance"],
                                      {{"S01E01", {"Nora starts nights."}},
                                       {"S01E02", {"Nora misses a page.", "Nora apologizes."}}}));
  auto absorb = cur.create_arc(arc_body("Nightly Rounds", "Soap", ids["Theo Marsh"],
                                        {{"S01E02", {"Theo covers for Nora."}},
                                         {"S01E03", {"Theo quits nights."}}}));
  auto merged = cur.merge_arcs(keep.arc_id, absorb.arc_id);
  ASSERT_EQ(merged.progressions.size(), 3u);
  json j = merged;
  EXPECT_EQ(texts_of(j["progressions"][1]),
            (std::vector<std::string>{"Nora misses a page.", "Nora apologizes.",
                                      "Theo covers for Nora."}));
  for (size_t i = 0; i < merged.progressions[1].content.size(); ++i)
    EXPECT_EQ(merged.progressions[1].content[i].ordinal, static_cast<int>(i));
  EXPECT_EQ(merged.main_characters,
            (std::vector<std::string>{ids["Nora Vance"], ids["Theo Marsh"]}));
  EXPECT_FALSE(stores.relational().find_arc(absorb.arc_id));
  for (const auto &r : stores.vectors().records({})) EXPECT_NE(r.arc_id, absorb.arc_id);
  EXPECT_EQ(stores.count_orphan_embeddings(), 0u);
  EXPECT_TRUE(cur.invalid_arcs().empty());
  // 1 summary + 3 progressions + 5 utterances for the survivor.
  EXPECT_EQ(stores.vectors().size(), 9u);
}

TEST_F(CurationFixture, MergeRejectsAnthologyGainingEpisodesAndSelfMerge) {
  auto a = cur.create_arc(arc_body("Bus Crash", "Anthology", ids["Nora Vance"],
                                   {{"S01E01", {"A bus crashes."}}}));
  auto b = cur.create_arc(arc_body("Theo Night", "Soap", ids["Theo Marsh"],
                                   {{"S01E02", {"Theo works late."}}}));
  try {
    cur.merge_arcs(a.arc_id, b.arc_id);
    FAIL() << "expected VALIDATION_FAILED";
  } catch (const ValidationFailed &e) {
    EXPECT_TRUE(has_violation(e.report(), violation::kAnthologyMultiEpisode));
  }
  EXPECT_TRUE(stores.relational().find_arc(b.arc_id));
  EXPECT_THROW(cur.merge_arcs(a.arc_id, a.arc_id), Error);
}

TEST_F(CurationFixture, PatchRefusesInvalidAndLeavesStoreUntouched) {
  auto a = cur.create_arc(arc_body("Night Rounds", "Soap", ids["Nora Vance"],
                                   {{"S01E01", {"Nora starts nights."}}}));
  EXPECT_THROW(cur.patch_arc(a.arc_id, {{"title", " "}}), ValidationFailed);
  EXPECT_THROW(cur.patch_arc(a.arc_id, {{"main_characters", {"char_nobody"}}}), ValidationFailed);
  EXPECT_THROW(cur.patch_arc(a.arc_id, {{"colour", "red"}}), Error);
  EXPECT_EQ(stores.relational().load_arc(a.arc_id), a);
}

TEST_F(CurationFixture, ProgressionEditsReembed) {
  auto a = cur.create_arc(arc_body("Night Rounds", "Soap", ids["Nora Vance"],
                                   {{"S01E01", {"Nora starts nights."}}}));
  a = cur.add_progression(a.arc_id, {{"episode", "S01E03"}, {"content", {"Nora sleeps."}}});
  ASSERT_EQ(a.progressions.size(), 2u);
  std::string pid = a.progressions[1].progression_id;
  a = cur.patch_progression(a.arc_id, pid, {{"content", {"Nora finally sleeps.", "Theo calls."}}});
  auto rec = stores.vectors().find(TargetKind::kProgression, pid);
  ASSERT_TRUE(rec);
  EXPECT_EQ(rec->vector, embed_texts(embedder, {"Nora finally sleeps. Theo calls."})[0]);
  a = cur.delete_progression(a.arc_id, pid);
  EXPECT_FALSE(stores.vectors().find(TargetKind::kProgression, pid));
  // An arc keeps at least one progression; deleting the arc is the way out.
  try {
    cur.delete_progression(a.arc_id, a.progressions[0].progression_id);
    ADD_FAILURE() << "expected CONFLICT";
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), "CONFLICT");
  }
  EXPECT_THROW(cur.create_arc(arc_body("Bare", "Soap", ids["Nora Vance"], {})), Error);
  EXPECT_EQ(stores.count_orphan_embeddings(), 0u);
}

TEST_F(CurationFixture, ProgressionMovedOffAnEpisodeFreesItForANewOne) {
  auto a = cur.create_arc(arc_body("Night Rounds", "Soap", ids["Nora Vance"],
                                   {{"S01E01", {"Nora starts nights."}}}));
  std::string moved = a.progressions[0].progression_id;
  a = cur.patch_progression(a.arc_id, moved, {{"episode", "S01E02"}});
  a = cur.add_progression(a.arc_id, {{"episode", "S01E01"}, {"content", {"Nora signs up."}}});
  ASSERT_EQ(a.progressions.size(), 2u);
  EXPECT_NE(a.progressions[0].progression_id, moved);
  EXPECT_EQ(a.progressions[1].progression_id, moved);

  // A merge moving a progression onto S01E03 while keep holds the id
  // derived for S01E03 at another episode.
  a = cur.add_progression(a.arc_id, {{"episode", "S01E03"}, {"content", {"Nora naps."}}});
  std::string e3 = a.find_progression(EpisodeKey(1, 3))->progression_id;
  a = cur.patch_progression(a.arc_id, e3, {{"episode", "S01E04"}});
  auto b = cur.create_arc(arc_body("Night Rounds II", "Soap", ids["Theo Marsh"],
                                   {{"S01E03", {"Theo covers."}}}));
  EXPECT_NO_THROW(a = cur.merge_arcs(a.arc_id, b.arc_id));
  EXPECT_EQ(a.progressions.size(), 4u);
  EXPECT_EQ(stores.relational().count_progressions(), a.progressions.size());
  EXPECT_TRUE(cur.invalid_arcs().empty());
}

TEST_F(CurationFixture, PcaOfSingleArcIsOrigin) {
  cur.create_arc(arc_body("Night Rounds", "Soap", ids["Nora Vance"],
                          {{"S01E01", {"Nora starts nights."}}}));
  auto pts = cur.pca(kSeries);
  ASSERT_EQ(pts.size(), 1u);
  EXPECT_EQ(pts[0].x, 0);
  EXPECT_EQ(pts[0].y, 0);
  EXPECT_EQ(pts[0].z, 0);
  EXPECT_EQ(cur.clusters(kSeries, 0.3).size(), 1u);
  EXPECT_TRUE(cur.pca(SeriesId("other")).empty());
}

TEST_F(CurationFixture, TimelineRestrictsToSeasonAndFilters) {
  auto a = cur.create_arc(arc_body("Night Rounds", "Soap", ids["Nora Vance"],
                                   {{"S01E02", {"Nora starts nights."}},
                                    {"S02E01", {"Nora returns."}}}));
  cur.create_arc(arc_body("Bus Crash", "Anthology", ids["Theo Marsh"],
                          {{"S01E01", {"A bus crashes."}}}));
  json t = cur.timeline(kSeries, 1);
  EXPECT_EQ(t["episodes"], json({"S01E01", "S01E02"}));
  EXPECT_EQ(t["arcs"].size(), 2u);
  for (const auto &arc : t["arcs"])
    for (const auto &p : arc["progressions"]) EXPECT_EQ(p["episode"]["season"], 1);
  EXPECT_EQ(t["characters"][ids["Nora Vance"]], "Nora Vance");
  json only = cur.timeline(kSeries, 1, ArcType::kSoap);
  ASSERT_EQ(only["arcs"].size(), 1u);
  EXPECT_EQ(only["arcs"][0]["arc_id"], a.arc_id);
  EXPECT_EQ(cur.timeline(kSeries, 1, std::nullopt, ids["Theo Marsh"])["arcs"].size(), 1u);
}

// Random edit sequences, valid or not, never leave an invalid arc or an
// orphaned embedding behind.
TEST_F(CurationFixture, RandomEditSequencesKeepStoreValid) {
  std::mt19937 rng(7);
  std::vector<std::string> people = {ids["Nora Vance"], ids["Theo Marsh"], ids["Iris Cole"]};
  auto pick = [&](size_t n) { return std::uniform_int_distribution<size_t>(0, n - 1)(rng); };
  auto ep = [&] { return "S01E0" + std::to_string(1 + pick(4)); };
  int refused = 0;
  for (int step = 0; step < 400; ++step) {
    std::vector<NarrativeArc> arcs = stores.relational().list_arcs(kSeries);
    try {
      switch (arcs.empty() ? 0 : pick(7)) {
        case 0:
          cur.create_arc(arc_body("Arc " + std::to_string(pick(6)), pick(3) ? "Soap" : "Anthology",
                                  people[pick(3)], {{ep(), {"Something happens."}}}));
          break;
        case 1:
          cur.patch_arc(arcs[pick(arcs.size())].arc_id,
                        {{"arc_type", pick(2) ? "Anthology" : "GenreSpecific"},
                         {"title", pick(5) ? "Renamed" : ""}});
          break;
        case 2:
          cur.add_progression(arcs[pick(arcs.size())].arc_id,
                              {{"episode", ep()}, {"content", {pick(6) ? "More happens." : " "}}});
          break;
        case 3: {
          const auto &a = arcs[pick(arcs.size())];
          cur.delete_progression(a.arc_id, a.progressions[pick(a.progressions.size())].progression_id);
          break;
        }
        case 4:
          cur.merge_arcs(arcs[pick(arcs.size())].arc_id, arcs[pick(arcs.size())].arc_id);
          break;
        case 5:
          cur.delete_arc(arcs[pick(arcs.size())].arc_id);
          break;
        case 6: {
          const auto &a = arcs[pick(arcs.size())];
          cur.patch_progression(a.arc_id, a.progressions[0].progression_id,
                                {{"interfering_characters", {people[pick(3)]}}});
          break;
        }
      }
    } catch (const Error &) {
      ++refused;
    }
    ASSERT_TRUE(cur.invalid_arcs().empty()) << "step " << step;
    ASSERT_EQ(stores.count_orphan_embeddings(), 0u) << "step " << step;
    for (const auto &a : stores.relational().list_arcs(kSeries))
      ASSERT_TRUE(stores.vectors().find(TargetKind::kArcSummary, a.arc_id)) << "step " << step;
  }
  EXPECT_GT(refused, 0);
}

// --- HTTP API --------------------------------------------------------------------

struct ApiFixture : ::testing::Test {
  Workspace ws{test_config(::testing::UnitTest::GetInstance()->current_test_info()->name())};
  std::map<std::string, std::string> ids = seed_characters(ws.stores().relational());
  ApiServer server{ws};
  int port = server.start("127.0.0.1", 0);
  httplib::Client client{"127.0.0.1", port};
  Curation scan{ws.stores(), ws.embedder(), false};

  json call(const std::string &method, const std::string &path, const json &body, int expect) {
    httplib::Result r;
    std::string b = body.is_null() ? "" : body.dump();
    if (method == "GET") r = client.Get(path);
    if (method == "POST") r = client.Post(path, b, "application/json");
    if (method == "PATCH") r = client.Patch(path, b, "application/json");
    if (method == "DELETE") r = client.Delete(path);
    EXPECT_TRUE(r) << method << " " << path;
    if (!r) return json();
    EXPECT_EQ(r->status, expect) << method << " " << path << ": " << r->body;
    EXPECT_EQ(r->get_header_value("Content-Type"), "application/json");
    if (method != "GET") {
      EXPECT_TRUE(scan.invalid_arcs().empty()) << method << " " << path;
    }
    return json::parse(r->body);
  }
};

TEST_F(ApiFixture, CrudAndMergeRoundTrip) {
  json a = call("POST", "/api/arcs",
                arc_body("Night Rounds", "Soap", ids["Nora Vance"],
                         {{"S01E01", {"Nora starts nights."}}, {"S01E02", {"Nora is paged."}}}),
                201);
  std::string aid = a["arc_id"];
  json b = call("POST", "/api/arcs",
                arc_body("Night Shift Blues", "Soap", ids["Theo Marsh"],
                         {{"S01E02", {"Theo covers the ward."}}}),
                201);
  std::string bid = b["arc_id"];
  EXPECT_EQ(call("GET", "/api/arcs/" + aid, nullptr, 200), a);

  json bad = call("PATCH", "/api/arcs/" + aid, {{"title", ""}}, 400);
  EXPECT_EQ(bad["error"], "VALIDATION_FAILED");
  EXPECT_TRUE(std::find(bad["codes"].begin(), bad["codes"].end(), "EMPTY_TITLE") !=
              bad["codes"].end());
  json patched = call("PATCH", "/api/arcs/" + aid, {{"description", "Nora adapts to nights."}}, 200);
  EXPECT_EQ(patched["description"], "Nora adapts to nights.");
  EXPECT_EQ(patched["title"], "Night Rounds");

  json with3 = call("POST", "/api/arcs/" + aid + "/progressions",
                    {{"episode", "S01E03"}, {"content", {"Nora sleeps through the day."}}}, 201);
  ASSERT_EQ(with3["progressions"].size(), 3u);
  std::string pid = with3["progressions"][2]["progression_id"];
  json edited = call("PATCH", "/api/arcs/" + aid + "/progressions/" + pid,
                     {{"interfering_characters", {ids["Iris Cole"]}}}, 200);
  EXPECT_EQ(edited["progressions"][2]["interfering_characters"], json({ids["Iris Cole"]}));
  call("PATCH", "/api/arcs/" + aid + "/progressions/" + pid,
       {{"interfering_characters", {"char_nobody"}}}, 400);
  call("DELETE", "/api/arcs/" + aid + "/progressions/" + pid, nullptr, 200);
  call("DELETE", "/api/arcs/" + aid + "/progressions/nope", nullptr, 404);

  json merged = call("POST", "/api/arcs/merge", {{"keep_id", aid}, {"absorb_id", bid}}, 200);
  EXPECT_EQ(merged["arc_id"], aid);
  EXPECT_EQ(texts_of(merged["progressions"][1]),
            (std::vector<std::string>{"Nora is paged.", "Theo covers the ward."}));
  json gone = call("GET", "/api/arcs/" + bid, nullptr, 404);
  EXPECT_EQ(gone["error"], "UNKNOWN_ID");
  for (const auto &r : ws.stores().vectors().records({})) EXPECT_NE(r.arc_id, bid);
  call("POST", "/api/arcs/merge", {{"keep_id", aid}, {"absorb_id", aid}}, 409);
  call("POST", "/api/arcs/merge", {{"keep_id", aid}, {"absorb_id", bid}}, 404);

  json timeline = call("GET", "/api/series/night-shift/seasons/1/arcs?type=Soap", nullptr, 200);
  ASSERT_EQ(timeline["arcs"].size(), 1u);
  EXPECT_EQ(timeline["episodes"], json({"S01E01", "S01E02"}));

  json pca = call("GET", "/api/series/night-shift/pca", nullptr, 200);
  ASSERT_EQ(pca.size(), 1u);
  EXPECT_EQ(pca[0]["x"], 0.0);
  EXPECT_EQ(call("GET", "/api/series/night-shift/clusters?threshold=0.4", nullptr, 200).size(), 1u);
  call("GET", "/api/series/night-shift/clusters?threshold=abc", nullptr, 400);

  call("DELETE", "/api/arcs/" + aid, nullptr, 200);
  call("GET", "/api/arcs/" + aid, nullptr, 404);
  EXPECT_EQ(ws.stores().vectors().size(), 0u);
  EXPECT_EQ(call("GET", "/api/series", nullptr, 200), json({"night-shift"}));
}

TEST_F(ApiFixture, MalformedRequests) {
  auto r = client.Post("/api/arcs", "{not json", "application/json");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 400);
  EXPECT_EQ(json::parse(r->body)["error"], "BAD_REQUEST");
  call("POST", "/api/arcs", {{"series", "night-shift"}}, 400);
  json bad_type = arc_body("X", "Sitcom", ids["Nora Vance"], {{"S01E01", {"x"}}});
  call("POST", "/api/arcs", bad_type, 400);
  call("GET", "/api/nothing-here", nullptr, 404);
  call("PATCH", "/api/characters/char_missing", {{"preferred_name", "X"}}, 404);
}

TEST_F(ApiFixture, CharacterEndpoints) {
  json list = call("GET", "/api/series/night-shift/characters", nullptr, 200);
  EXPECT_EQ(list.size(), 4u);
  json dups = call("GET", "/api/series/night-shift/characters/duplicates?threshold=0.3", nullptr, 200);
  ASSERT_FALSE(dups.empty());
  std::set<std::string> pair = {dups[0]["character_a"], dups[0]["character_b"]};
  EXPECT_EQ(pair, (std::set<std::string>{ids["Iris Cole"], ids["Iris Coleman"]}));

  json arc = call("POST", "/api/arcs",
                  arc_body("Iris Returns", "Soap", ids["Iris Coleman"], {{"S01E01", {"Iris returns."}}}),
                  201);
  json patched = call("PATCH", "/api/characters/" + ids["Iris Cole"],
                      {{"appellations", {"Iris", "Nurse Cole"}}}, 200);
  EXPECT_EQ(patched["appellations"].get<std::set<std::string>>(),
            (std::set<std::string>{"Iris", "Nurse Cole", "Iris Cole"}));
  call("PATCH", "/api/characters/" + ids["Iris Cole"], {{"appellations", {"Theo"}}}, 409);

  json merged = call("POST", "/api/characters/merge",
                     {{"keep_id", ids["Iris Cole"]}, {"absorb_id", ids["Iris Coleman"]}}, 200);
  EXPECT_EQ(merged["character_id"], ids["Iris Cole"]);
  json after = call("GET", "/api/arcs/" + arc["arc_id"].get<std::string>(), nullptr, 200);
  EXPECT_EQ(after["main_characters"], json({ids["Iris Cole"]}));
  call("POST", "/api/characters/merge",
       {{"keep_id", ids["Iris Cole"]}, {"absorb_id", ids["Iris Cole"]}}, 409);
}

TEST_F(ApiFixture, MutationsRefusedWhileRunActive) {
  std::promise<void> release;
  auto gate = release.get_future().share();
  std::string run = server.runs().start(kSeries, 1, [gate](const EventSink &) {
    gate.wait();
    return json::array();
  });
  json conflict = call("POST", "/api/arcs",
                       arc_body("Night Rounds", "Soap", ids["Nora Vance"], {{"S01E01", {"x y"}}}), 409);
  EXPECT_EQ(conflict["error"], "RUN_ACTIVE");
  EXPECT_THROW(server.runs().start(kSeries, 1, [](const EventSink &) { return json(); }), Error);
  // Reads stay available.
  call("GET", "/api/series/night-shift/characters", nullptr, 200);
  release.set_value();
  server.runs().join_all();
  EXPECT_EQ(server.runs().snapshot(run).state, "completed");
  call("POST", "/api/arcs",
       arc_body("Night Rounds", "Soap", ids["Nora Vance"], {{"S01E01", {"x y"}}}), 201);
}

TEST_F(ApiFixture, ReplayRunWithoutFixturesStreamsReplayMiss) {
  fs::path plots = ws.config().workspace / "plots";
  fs::create_directories(plots);
  std::ofstream(plots / "S01E01.txt") << "Nora starts the night shift. Theo hands over the ward.\n";
  ws.ingest(plots, kSeries);

  json started = call("POST", "/api/pipeline/run",
                      {{"series", "night-shift"}, {"season", 1}, {"mode", "replay"}}, 202);
  std::string run = started["run_id"];
  auto r = client.Get("/api/pipeline/runs/" + run + "/events");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 200);
  std::vector<json> events;
  std::istringstream in(r->body);
  for (std::string line; std::getline(in, line);) events.push_back(json::parse(line));
  ASSERT_FALSE(events.empty());
  EXPECT_EQ(events.back()["event"], "run_failed");
  EXPECT_EQ(events.back()["code"], "REPLAY_MISS");
  json status = call("GET", "/api/pipeline/runs/" + run, nullptr, 200);
  EXPECT_EQ(status["state"], "failed");
  EXPECT_EQ(status["error"]["error"], "REPLAY_MISS");
  call("GET", "/api/pipeline/runs/run-999", nullptr, 404);
  call("POST", "/api/pipeline/run", {{"series", "night-shift"}, {"season", 4}}, 404);
}

TEST_F(ApiFixture, ExportIsCanonicalAndStable) {
  call("POST", "/api/arcs",
       arc_body("Zebra Case", "Anthology", ids["Theo Marsh"], {{"S01E01", {"A zebra."}}}), 201);
  call("POST", "/api/arcs",
       arc_body("Apple Case", "Anthology", ids["Nora Vance"], {{"S01E02", {"An apple."}}}), 201);
  std::string first = ws.export_text();
  EXPECT_EQ(first, ws.export_text());
  json j = json::parse(first);
  auto arcs = j["series"][0]["arcs"];
  ASSERT_EQ(arcs.size(), 2u);
  EXPECT_EQ(arcs[0]["title"], "Apple Case");
  EXPECT_EQ(arcs[1]["title"], "Zebra Case");
  auto chars = j["series"][0]["characters"];
  for (size_t i = 1; i < chars.size(); ++i)
    EXPECT_LT(chars[i - 1]["character_id"].get<std::string>(),
              chars[i]["character_id"].get<std::string>());
}

}  // namespace
}  // namespace narrmem
