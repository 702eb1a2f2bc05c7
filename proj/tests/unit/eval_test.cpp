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

#include <chrono>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "narrmem/core/error.hpp"
#include "narrmem/eval/evaluation.hpp"

namespace narrmem {
namespace {

using nlohmann::json;

const SeriesId kSeries("greys-anatomy");

std::string code_of(const std::function<void()> &fn) {
  try {
    fn();
  } catch (const Error &e) {
    return e.code();
  }
  return "";
}

// Looks texts up in a table; unknown texts get a fixed far-away vector.
class TableEmbedder : public EmbeddingProvider {
 public:
  std::map<std::string, std::vector<float>> table;
  size_t dim = 3;
  std::string name() const override { return "table"; }
  size_t dimension() const override { return dim; }
  std::vector<std::vector<float>> embed(const std::vector<std::string> &texts) const override {
    std::vector<std::vector<float>> out;
    for (const auto &t : texts) {
      auto it = table.find(t);
      if (it != table.end()) {
        out.push_back(it->second);
      } else {
        std::vector<float> v(dim, 0.0f);
        v[dim - 1] = 1.0f;
        out.push_back(v);
      }
    }
    return out;
  }
};

NarrativeArc arc(const std::string &id, const std::string &title, ArcType type = ArcType::kSoap) {
  NarrativeArc a;
  a.arc_id = id;
  a.series = kSeries;
  a.title = title;
  a.description = "d";
  a.arc_type = type;
  return a;
}

GoldArc gold(const std::string &title, ArcType type = ArcType::kSoap) {
  GoldArc g;
  g.title = title;
  g.arc_type = type;
  return g;
}

double cos3(const std::vector<float> &a, const std::vector<float> &b) {
  double d = 0, na = 0, nb = 0;
  for (size_t i = 0; i < a.size(); ++i) d += a[i] * b[i], na += a[i] * a[i], nb += b[i] * b[i];
  return d / std::sqrt(na * nb);
}

TEST(PrecisionTest, ReportedFiguresAndDivisionGuard) {
  ASSERT_TRUE(precision(25, 28).has_value());
  EXPECT_NEAR(*precision(25, 28), 0.893, 0.001);
  EXPECT_FALSE(precision(0, 0).has_value());
  EXPECT_DOUBLE_EQ(*precision(0, 4), 0.0);
  EXPECT_DOUBLE_EQ(*precision(4, 4), 1.0);
}

TEST(ReportTest, TwentyFiveOfTwentyEightAnthologyArcs) {
  auto start = std::chrono::steady_clock::now();
  std::vector<NarrativeArc> extracted;
  std::vector<GoldArc> golds;
  std::vector<MappingOverride> overrides;
  for (int i = 0; i < 28; ++i) {
    extracted.push_back(arc("arc_" + std::to_string(100 + i), "Case " + std::to_string(i),
                            ArcType::kAnthology));
    if (i < 25) {
      golds.push_back(gold("Gold case " + std::to_string(i), ArcType::kAnthology));
      overrides.push_back({extracted.back().arc_id, static_cast<size_t>(i)});
    } else {
      overrides.push_back({extracted.back().arc_id, std::nullopt});
    }
  }
  TableEmbedder emb;
  auto m = match_arcs(extracted, golds, overrides, emb);
  auto r = compute_report(m, extracted, golds, {}, {});
  const auto &a = r.per_type.at(ArcType::kAnthology);
  EXPECT_EQ(a.extracted, 28u);
  EXPECT_EQ(a.correct, 25u);
  EXPECT_NEAR(*a.precision, 0.893, 0.001);
  EXPECT_FALSE(r.per_type.at(ArcType::kSoap).precision.has_value());  // null, not 0
  EXPECT_EQ(json(r)["per_type"]["Soap"]["precision"], json());
  EXPECT_NE(render_table(r).find("0.893"), std::string::npos);
  EXPECT_LT(std::chrono::steady_clock::now() - start, std::chrono::seconds(1));
}

TEST(ReportTest, SixtyOneOfSixtyTwoCharacters) {
  std::vector<Character> chars;
  std::vector<std::string> gold_names;
  for (int i = 0; i < 62; ++i) {
    Character c;
    c.character_id = "char_" + std::to_string(i);
    c.series = kSeries;
    c.preferred_name = "Person " + std::to_string(i);
    c.appellations = {c.preferred_name};
    chars.push_back(c);
    // One extracted entity is spurious; folding makes case irrelevant.
    if (i != 7) gold_names.push_back(i % 2 ? "PERSON " + std::to_string(i) : c.preferred_name);
  }
  auto s = score_characters(chars, gold_names);
  EXPECT_EQ(s.extracted, 62u);
  EXPECT_EQ(s.correct, 61u);
}

TEST(ReportTest, TypeMismatchIsMatchedButNotCorrect) {
  std::vector<NarrativeArc> ex = {arc("arc_a", "A", ArcType::kGenreSpecific)};
  std::vector<GoldArc> g = {gold("A", ArcType::kAnthology)};
  TableEmbedder emb;
  auto m = match_arcs(ex, g, {{"arc_a", 0}}, emb);
  auto r = compute_report(m, ex, g, {}, {});
  EXPECT_EQ(r.per_type.at(ArcType::kGenreSpecific).matched, 1u);
  EXPECT_EQ(r.per_type.at(ArcType::kGenreSpecific).correct, 0u);
}

TEST(MatchTest, OverrideWinsRegardlessOfScore) {
  TableEmbedder emb;
  std::vector<NarrativeArc> ex = {arc("arc_a", "A"), arc("arc_b", "B")};
  std::vector<GoldArc> g = {gold("G0"), gold("G1"), gold("G2"), gold("G3")};
  emb.table[ex[0].summary_text()] = {1, 0, 0};
  emb.table["G0"] = {1, 0, 0};  // perfect, but A is pinned elsewhere
  emb.table["G3"] = {0, 1, 0};
  emb.table[ex[1].summary_text()] = {0.9f, 0.1f, 0};
  auto m = match_arcs(ex, g, {{"arc_a", 3}}, emb);
  ASSERT_EQ(m.pairs.size(), 2u);
  EXPECT_EQ(m.pairs[0].arc_id, "arc_a");
  EXPECT_EQ(m.pairs[0].gold_index, 3u);
  EXPECT_TRUE(m.pairs[0].overridden);
  EXPECT_EQ(m.pairs[1].gold_index, 0u);  // B takes G0 by score
}

TEST(MatchTest, GreedyOracleOnThreeArcs) {
  TableEmbedder emb;
  std::vector<NarrativeArc> ex = {arc("arc_1", "one"), arc("arc_2", "two"), arc("arc_3", "three")};
  std::vector<GoldArc> g = {gold("Gold romance"), gold("Gold rivalry")};
  emb.table[ex[0].summary_text()] = {1.0f, 0.2f, 0};
  emb.table[ex[1].summary_text()] = {1.0f, 0.1f, 0};  // nearer to gold 0 than arc_1
  emb.table[ex[2].summary_text()] = {0.1f, 1.0f, 0};
  emb.table["Gold romance"] = {1, 0, 0};
  emb.table["Gold rivalry"] = {0, 1, 0};
  // Oracle by hand: arc_2 scores higher than arc_1 against gold 0.
  double s1 = cos3({1.0f, 0.2f, 0}, {1, 0, 0}), s2 = cos3({1.0f, 0.1f, 0}, {1, 0, 0});
  ASSERT_GT(s2, s1);
  auto m = match_arcs(ex, g, {}, emb);
  ASSERT_EQ(m.pairs.size(), 2u);
  EXPECT_EQ(m.pairs[0].arc_id, "arc_2");
  EXPECT_EQ(m.pairs[0].gold_index, 0u);
  EXPECT_NEAR(m.pairs[0].score, s2, 1e-9);
  EXPECT_EQ(m.pairs[1].arc_id, "arc_3");
  EXPECT_EQ(m.unmatched_extracted, std::vector<std::string>{"arc_1"});
  ASSERT_EQ(m.duplicates.size(), 1u);
  EXPECT_EQ(m.duplicates[0].arc_id, "arc_1");
  auto r = compute_report(m, ex, g, {}, {});
  EXPECT_EQ(r.duplication_count, 1u);
  EXPECT_TRUE(r.missed_gold.empty());
}

TEST(MatchTest, EmptyGoldAndThreshold) {
  TableEmbedder emb;
  std::vector<NarrativeArc> ex = {arc("arc_1", "one")};
  auto m = match_arcs(ex, {}, {}, emb);
  EXPECT_TRUE(m.pairs.empty());
  EXPECT_EQ(m.unmatched_extracted.size(), 1u);
  // Below threshold: no pair, and the gold arc is reported missed.
  std::vector<GoldArc> g = {gold("far")};
  emb.table[ex[0].summary_text()] = {1, 0, 0};
  emb.table["far"] = {0, 1, 0};
  m = match_arcs(ex, g, {}, emb);
  EXPECT_TRUE(m.pairs.empty());
  EXPECT_EQ(compute_report(m, ex, g, {}, {}).missed_gold, std::vector<std::string>{"far"});
}

TEST(MatchTest, OverrideErrors) {
  TableEmbedder emb;
  std::vector<NarrativeArc> ex = {arc("arc_a", "A"), arc("arc_b", "B")};
  std::vector<GoldArc> g = {gold("G0"), gold("G1")};
  EXPECT_EQ(code_of([&] { match_arcs(ex, g, {{"arc_a", 0}, {"arc_a", 1}}, emb); }),
            "CONFLICTING_OVERRIDES");
  EXPECT_EQ(code_of([&] { match_arcs(ex, g, {{"arc_a", 0}, {"arc_b", 0}}, emb); }),
            "CONFLICTING_OVERRIDES");
  EXPECT_EQ(code_of([&] { match_arcs(ex, g, {{"arc_zz", 0}}, emb); }), "INVALID_OVERRIDE");
  EXPECT_EQ(code_of([&] { match_arcs(ex, g, {{"arc_a", 9}}, emb); }), "INVALID_OVERRIDE");
  EXPECT_NO_THROW(match_arcs(ex, g, {{"arc_a", 0}, {"arc_a", 0}}, emb));
}

// Independent oracle: repeatedly take the globally best remaining pair.
std::map<std::string, size_t> naive_greedy(const std::vector<NarrativeArc> &ex,
                                           const std::vector<GoldArc> &g,
                                           const TableEmbedder &emb, double theta) {
  std::map<std::string, size_t> out;
  std::set<size_t> used_g;
  while (true) {
    double best = -2;
    std::string ba;
    size_t bg = 0;
    for (const auto &a : ex) {
      if (out.count(a.arc_id)) continue;
      for (size_t j = 0; j < g.size(); ++j) {
        if (used_g.count(j)) continue;
        double s = cos3(emb.table.at(a.summary_text()), emb.table.at(g[j].title));
        if (s > best || (s == best && (a.arc_id < ba || (a.arc_id == ba && j < bg))))
          best = s, ba = a.arc_id, bg = j;
      }
    }
    if (best < theta || ba.empty()) return out;
    out[ba] = bg;
    used_g.insert(bg);
  }
}

TEST(MatchTest, RandomInstancesAreInjectiveConservedAndGreedy) {
  std::mt19937 rng(99);
  std::normal_distribution<float> nd;
  for (int trial = 0; trial < 300; ++trial) {
    TableEmbedder emb;
    emb.dim = 4;
    size_t ne = rng() % 7, ng = rng() % 6;
    std::vector<NarrativeArc> ex;
    std::vector<GoldArc> g;
    auto rv = [&] {
      std::vector<float> v(4);
      for (auto &x : v) x = nd(rng);
      return v;
    };
    for (size_t i = 0; i < ne; ++i) {
      ex.push_back(arc("arc_" + std::to_string(i), "t" + std::to_string(i)));
      emb.table[ex.back().summary_text()] = rv();
    }
    for (size_t j = 0; j < ng; ++j) {
      g.push_back(gold("g" + std::to_string(j)));
      emb.table[g.back().title] = rv();
    }
    auto m = match_arcs(ex, g, {}, emb, 0.3);
    std::set<std::string> arcs;
    std::set<size_t> golds;
    for (const auto &p : m.pairs) {
      EXPECT_TRUE(arcs.insert(p.arc_id).second);
      EXPECT_TRUE(golds.insert(p.gold_index).second);
    }
    EXPECT_EQ(m.pairs.size() + m.unmatched_extracted.size(), ex.size());
    EXPECT_EQ(m.pairs.size() + m.unmatched_gold.size(), g.size());
    auto oracle = naive_greedy(ex, g, emb, 0.3);
    ASSERT_EQ(oracle.size(), m.pairs.size());
    for (const auto &p : m.pairs) EXPECT_EQ(oracle.at(p.arc_id), p.gold_index);
  }
}

TEST(GoldStandardTest, LoadAndOverridesFile) {
  auto dir = std::filesystem::temp_directory_path() / "narrmem_eval_gold";
  std::filesystem::create_directories(dir);
  GoldStandard gs;
  gs.series = kSeries;
  gs.season = 1;
  gs.gold_arcs = {gold("Romance")};
  gs.gold_arcs[0].episodes = {EpisodeKey(1, 1), EpisodeKey(1, 2)};
  gs.gold_characters = {"Meredith Grey"};
  gs.mapping_overrides = {{"arc_a", std::nullopt}};
  std::ofstream(dir / "gold.json") << json(gs).dump(2);
  auto back = GoldStandard::load(dir / "gold.json");
  EXPECT_EQ(json(back), json(gs));
  std::ofstream(dir / "ov.json") << R"({"mapping_overrides": [{"arc_id": "x", "gold_index": 2}]})";
  EXPECT_EQ(load_overrides(dir / "ov.json"), (std::vector<MappingOverride>{{"x", 2}}));
  std::ofstream(dir / "bad.json") << "{not json";
  EXPECT_EQ(code_of([&] { GoldStandard::load(dir / "bad.json"); }), "INVALID_GOLD");
  EXPECT_EQ(code_of([&] { GoldStandard::load(dir / "nope.json"); }), "IO_ERROR");
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace narrmem
