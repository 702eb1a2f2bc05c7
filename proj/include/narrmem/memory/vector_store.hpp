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

// Episodic memory: embeddings of arc summaries, progressions and (optionally)
// utterances, searched by exhaustive cosine scan.

#ifndef NARRMEM_MEMORY_VECTOR_STORE_HPP_
#define NARRMEM_MEMORY_VECTOR_STORE_HPP_

#include <filesystem>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "narrmem/core/embedding_provider.hpp"
#include "narrmem/core/types.hpp"
#include "narrmem/memory/vector_math.hpp"

namespace narrmem {

enum class TargetKind { kArcSummary, kProgression, kUtterance };

std::string_view to_string(TargetKind kind);
TargetKind parse_target_kind(std::string_view text);

struct EmbeddingRecord {
  std::string record_id;  // assigned by the store when empty
  TargetKind target_kind = TargetKind::kArcSummary;
  std::string target_id;
  // Owning arc: the target itself for arc summaries, the parent otherwise.
  std::string arc_id;
  SeriesId series;
  std::optional<EpisodeKey> episode;
  Vector vector;
  std::string text;
};

struct SimilarityHit {
  EmbeddingRecord record;
  double score = 0.0;
};

struct QueryFilter {
  std::optional<SeriesId> series;
  std::optional<TargetKind> target_kind;
  std::optional<std::string> exclude_arc_id;
  // Keeps only records whose episode is strictly earlier. Records without an
  // episode are excluded whenever this is set.
  std::optional<EpisodeKey> before_episode;
  // Keeps only records whose episode is at or before this one.
  std::optional<EpisodeKey> max_episode;

  bool accepts(const EmbeddingRecord &r) const;
};

// Orders hits by score descending, then record_id ascending.
bool hit_precedes(const SimilarityHit &a, const SimilarityHit &b);

class VectorStore {
 public:
  // `dimension` 0 means "fixed by the first upsert".
  explicit VectorStore(size_t dimension = 0);

  VectorStore(const VectorStore &) = delete;
  VectorStore &operator=(const VectorStore &) = delete;

  size_t dimension() const;
  size_t size() const;

  // Idempotent on (target_kind, target_id); the vector is L2-normalized on
  // write. Returns the record id. Throws DIMENSION_MISMATCH / ZERO_VECTOR.
  std::string upsert(EmbeddingRecord record);

  std::optional<EmbeddingRecord> find(TargetKind kind, const std::string &target_id) const;
  bool remove(TargetKind kind, const std::string &target_id);
  // Removes every record owned by `arc_id`; returns how many were removed.
  size_t remove_arc(const std::string &arc_id);
  // Re-tags records owned by `from_arc` as owned by `to_arc`.
  void reassign_arc(const std::string &from_arc, const std::string &to_arc);

  // Top-k by cosine among records passing `filter`. Empty store -> empty list.
  std::vector<SimilarityHit> query_similar(std::span<const float> query, size_t k,
                                           const QueryFilter &filter = {}) const;
  std::vector<SimilarityHit> query_similar(const std::string &query_text, size_t k,
                                           const QueryFilter &filter,
                                           const EmbeddingProvider &provider) const;

  // Records passing `filter`, ordered by record_id.
  std::vector<EmbeddingRecord> records(const QueryFilter &filter = {}) const;

  // JSON-lines metadata plus packed little-endian float32 vectors; line i
  // owns bytes [i*d*4, (i+1)*d*4) of the sidecar.
  void save(const std::filesystem::path &metadata_path,
            const std::filesystem::path &vectors_path) const;
  void load(const std::filesystem::path &metadata_path,
            const std::filesystem::path &vectors_path);

 private:
  using Key = std::pair<TargetKind, std::string>;

  mutable std::shared_mutex mu_;
  size_t dimension_;
  std::map<Key, EmbeddingRecord> records_;
};

void to_json(nlohmann::json &j, const EmbeddingRecord &r);  // metadata only, no vector

}  // namespace narrmem

#endif  // NARRMEM_MEMORY_VECTOR_STORE_HPP_
