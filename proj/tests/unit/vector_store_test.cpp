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

#include <cmath>
#include <filesystem>
#include <random>

#include "../support/oracles.hpp"
#include "narrmem/core/error.hpp"
#include "narrmem/memory/vector_math.hpp"
#include "narrmem/memory/vector_store.hpp"

namespace narrmem {
namespace {

const SeriesId kSeries("greys-anatomy");

EmbeddingRecord record(const std::string &target, Vector v, TargetKind kind = TargetKind::kArcSummary,
                       std::optional<EpisodeKey> episode = EpisodeKey(1, 1)) {
  EmbeddingRecord r;
  r.target_kind = kind;
  r.target_id = target;
  r.arc_id = target;
  r.series = kSeries;
  r.episode = episode;
  r.vector = std::move(v);
  r.text = target;
  return r;
}

TEST(CosineSimilarityTest, Examples) {
  EXPECT_DOUBLE_EQ(cosine_similarity(Vector{1, 0}, Vector{1, 0}), 1.0);
  EXPECT_DOUBLE_EQ(cosine_similarity(Vector{1, 0}, Vector{0, 1}), 0.0);
  // 1/sqrt(2) by hand.
  EXPECT_NEAR(cosine_similarity(Vector{1, 1}, Vector{1, 0}), 0.70710678, 1e-8);
}

TEST(CosineSimilarityTest, Errors) {
  try {
    cosine_similarity(Vector{1, 0}, Vector{1, 0, 0});
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), "DIMENSION_MISMATCH");
  }
  try {
    cosine_similarity(Vector{0, 0}, Vector{1, 0});
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), "ZERO_VECTOR");
  }
}

TEST(JaccardTest, Examples) {
  EXPECT_DOUBLE_EQ(jaccard_similarity({"meredith", "grey"}, {"meredith", "grey"}), 1.0);
  EXPECT_DOUBLE_EQ(jaccard_similarity({"alex"}, {"izzie"}), 0.0);
  EXPECT_NEAR(jaccard_similarity({"a", "b"}, {"b", "c"}), 0.3333, 1e-4);
  EXPECT_DOUBLE_EQ(jaccard_similarity({}, {}), 1.0);
}

TEST(JaccardTest, SymmetricAndOneIffEqual) {
  std::mt19937 rng(3);
  const std::vector<std::string> pool = {"a", "b", "c", "d", "e"};
  for (int t = 0; t < 300; ++t) {
    std::set<std::string> a, b;
    for (const auto &s : pool) {
      if (rng() % 2) a.insert(s);
      if (rng() % 2) b.insert(s);
    }
    EXPECT_DOUBLE_EQ(jaccard_similarity(a, b), jaccard_similarity(b, a));
    if (!a.empty() && !b.empty()) {
      EXPECT_EQ(jaccard_similarity(a, b) == 1.0, a == b);
    }
  }
}

TEST(VectorStoreTest, UpsertIsIdempotent) {
  VectorStore store(2);
  store.upsert(record("arc_1", {1, 0}));
  store.upsert(record("arc_1", {1, 0}));
  EXPECT_EQ(store.size(), 1u);
}

TEST(VectorStoreTest, NormalizesOnWrite) {
  VectorStore store(2);
  store.upsert(record("arc_1", {3, 4}));
  auto r = store.find(TargetKind::kArcSummary, "arc_1");
  ASSERT_TRUE(r);
  EXPECT_NEAR(r->vector[0], 0.6, 1e-7);
  EXPECT_NEAR(r->vector[1], 0.8, 1e-7);
}

TEST(VectorStoreTest, AcceptsUnknownTargets) {
  VectorStore store(2);
  EXPECT_NO_THROW(store.upsert(record("arc_that_does_not_exist", {1, 2})));
}

TEST(VectorStoreTest, DimensionMismatch) {
  VectorStore store(2);
  EXPECT_THROW(store.upsert(record("x", {1, 2, 3})), Error);
}

TEST(VectorStoreTest, SelfSimilarityFirst) {
  VectorStore store(4);
  store.upsert(record("a", {1, 2, 3, 4}));
  store.upsert(record("b", {4, 3, 2, 1}));
  store.upsert(record("c", {0, 1, 0, 1}));
  auto hits = store.query_similar(Vector{1, 2, 3, 4}, 3);
  ASSERT_EQ(hits.size(), 3u);
  EXPECT_EQ(hits[0].record.target_id, "a");
  EXPECT_NEAR(hits[0].score, 1.0, 1e-6);
}

TEST(VectorStoreTest, KLargerThanStoreAndEmptyStore) {
  VectorStore empty(2);
  EXPECT_TRUE(empty.query_similar(Vector{1, 0}, 5).empty());
  VectorStore store(2);
  store.upsert(record("a", {1, 0}));
  store.upsert(record("b", {0, 1}));
  EXPECT_EQ(store.query_similar(Vector{1, 1}, 10).size(), 2u);
}

TEST(VectorStoreTest, TiesBrokenByRecordId) {
  VectorStore store(2);
  for (const char *id : {"z", "m", "a"}) store.upsert(record(id, {1, 1}));
  auto hits = store.query_similar(Vector{1, 1}, 3);
  ASSERT_EQ(hits.size(), 3u);
  EXPECT_LT(hits[0].record.record_id, hits[1].record.record_id);
  EXPECT_LT(hits[1].record.record_id, hits[2].record.record_id);
}

TEST(VectorStoreTest, FilterSemantics) {
  VectorStore store(2);
  store.upsert(record("a1", {1, 0}, TargetKind::kArcSummary, EpisodeKey(1, 1)));
  store.upsert(record("a2", {1, 0.1f}, TargetKind::kArcSummary, EpisodeKey(1, 2)));
  store.upsert(record("a3", {1, 0.2f}, TargetKind::kArcSummary, EpisodeKey(1, 3)));
  store.upsert(record("p1", {1, 0}, TargetKind::kProgression, EpisodeKey(1, 1)));

  QueryFilter before;
  before.before_episode = EpisodeKey(1, 3);
  before.target_kind = TargetKind::kArcSummary;
  auto hits = store.query_similar(Vector{1, 0}, 10, before);
  ASSERT_EQ(hits.size(), 2u);
  for (const auto &h : hits) EXPECT_LT(*h.record.episode, EpisodeKey(1, 3));

  QueryFilter max;
  max.max_episode = EpisodeKey(1, 2);
  max.exclude_arc_id = "a1";
  for (const auto &h : store.query_similar(Vector{1, 0}, 10, max)) {
    EXPECT_LE(*h.record.episode, EpisodeKey(1, 2));
    EXPECT_NE(h.record.arc_id, "a1");
  }
}

TEST(VectorStoreTest, MatchesExhaustiveOracle) {
  std::mt19937_64 rng(11);
  VectorStore store(16);
  std::vector<std::pair<std::string, std::vector<float>>> items;
  for (int i = 0; i < 50; ++i) {
    std::string id = store.upsert(record("t" + std::to_string(i), oracle::random_vector(rng, 16)));
    items.emplace_back(id, store.find(TargetKind::kArcSummary, "t" + std::to_string(i))->vector);
  }
  for (int q = 0; q < 20; ++q) {
    auto query = oracle::random_vector(rng, 16);
    auto hits = store.query_similar(query, 5);
    std::vector<std::string> got;
    for (const auto &h : hits) got.push_back(h.record.record_id);
    EXPECT_EQ(got, oracle::exhaustive_top_k(items, query, 5));
  }
}

TEST(VectorStoreTest, UnitNormInvariant) {
  std::mt19937_64 rng(5);
  VectorStore store(32);
  for (int i = 0; i < 100; ++i) {
    auto v = oracle::random_vector(rng, 32);
    for (auto &x : v) x *= static_cast<float>(1 + i);
    store.upsert(record("t" + std::to_string(i), v));
  }
  for (const auto &r : store.records()) EXPECT_NEAR(l2_norm(r.vector), 1.0, 1e-6);
}

TEST(VectorStoreTest, PersistenceRoundTrip) {
  auto dir = std::filesystem::temp_directory_path() / "narrmem_vs_test";
  std::filesystem::create_directories(dir);
  std::mt19937_64 rng(9);
  VectorStore store(8);
  for (int i = 0; i < 10; ++i)
    store.upsert(record("t" + std::to_string(i), oracle::random_vector(rng, 8),
                        i % 2 ? TargetKind::kProgression : TargetKind::kArcSummary,
                        i == 3 ? std::nullopt : std::optional(EpisodeKey(1, i + 1))));
  store.save(dir / "v.jsonl", dir / "v.f32");
  EXPECT_EQ(std::filesystem::file_size(dir / "v.f32"), 10u * 8u * 4u);

  VectorStore loaded;
  loaded.load(dir / "v.jsonl", dir / "v.f32");
  ASSERT_EQ(loaded.size(), store.size());
  auto a = store.records(), b = loaded.records();
  for (size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].record_id, b[i].record_id);
    EXPECT_EQ(a[i].vector, b[i].vector);
    EXPECT_EQ(a[i].episode, b[i].episode);
    EXPECT_EQ(a[i].target_kind, b[i].target_kind);
  }
  std::filesystem::remove_all(dir);
}

TEST(VectorStoreTest, RemoveArcCascades) {
  VectorStore store(2);
  auto p = record("prog_1", {0, 1}, TargetKind::kProgression);
  p.arc_id = "arc_1";
  store.upsert(record("arc_1", {1, 0}));
  store.upsert(p);
  store.upsert(record("arc_2", {1, 1}));
  EXPECT_EQ(store.remove_arc("arc_1"), 2u);
  EXPECT_EQ(store.size(), 1u);
}

}  // namespace
}  // namespace narrmem
