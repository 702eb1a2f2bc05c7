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

#include "narrmem/memory/vector_store.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <mutex>

#include "narrmem/core/error.hpp"
#include "narrmem/core/ids.hpp"

namespace narrmem {

std::string_view to_string(TargetKind kind) {
  switch (kind) {
    case TargetKind::kArcSummary:
      return "arc_summary";
    case TargetKind::kProgression:
      return "progression";
    case TargetKind::kUtterance:
      return "utterance";
  }
  return "arc_summary";
}

TargetKind parse_target_kind(std::string_view text) {
  if (text == "arc_summary") return TargetKind::kArcSummary;
  if (text == "progression") return TargetKind::kProgression;
  if (text == "utterance") return TargetKind::kUtterance;
  throw Error("INVALID_TARGET_KIND", std::string(text));
}

bool QueryFilter::accepts(const EmbeddingRecord &r) const {
  if (series && r.series != *series) return false;
  if (target_kind && r.target_kind != *target_kind) return false;
  if (exclude_arc_id && r.arc_id == *exclude_arc_id) return false;
  if (before_episode && (!r.episode || !(*r.episode < *before_episode))) return false;
  if (max_episode && (!r.episode || *max_episode < *r.episode)) return false;
  return true;
}

bool hit_precedes(const SimilarityHit &a, const SimilarityHit &b) {
  if (a.score != b.score) return a.score > b.score;
  return a.record.record_id < b.record.record_id;
}

VectorStore::VectorStore(size_t dimension) : dimension_(dimension) {}

size_t VectorStore::dimension() const {
  std::shared_lock lock(mu_);
  return dimension_;
}

size_t VectorStore::size() const {
  std::shared_lock lock(mu_);
  return records_.size();
}

std::string VectorStore::upsert(EmbeddingRecord record) {
  if (record.target_id.empty()) throw Error("EMPTY_TARGET", "embedding record without target_id");
  std::unique_lock lock(mu_);
  if (dimension_ == 0) {
    if (record.vector.size() < 2) throw Error("DIMENSION_MISMATCH", "dimension must be >= 2");
    dimension_ = record.vector.size();
  }
  if (record.vector.size() != dimension_) {
    throw Error("DIMENSION_MISMATCH", "store dimension " + std::to_string(dimension_) +
                                          ", record dimension " +
                                          std::to_string(record.vector.size()));
  }
  record.vector = l2_normalized(record.vector);
  if (record.record_id.empty()) {
    record.record_id = derive_id(IdKind::kEmbedding, record.series,
                                 std::string(to_string(record.target_kind)) + ":" + record.target_id);
  }
  if (record.arc_id.empty() && record.target_kind == TargetKind::kArcSummary)
    record.arc_id = record.target_id;
  Key key{record.target_kind, record.target_id};
  std::string id = record.record_id;
  records_[key] = std::move(record);
  return id;
}

std::optional<EmbeddingRecord> VectorStore::find(TargetKind kind,
                                                 const std::string &target_id) const {
  std::shared_lock lock(mu_);
  auto it = records_.find({kind, target_id});
  if (it == records_.end()) return std::nullopt;
  return it->second;
}

bool VectorStore::remove(TargetKind kind, const std::string &target_id) {
  std::unique_lock lock(mu_);
  return records_.erase({kind, target_id}) > 0;
}

size_t VectorStore::remove_arc(const std::string &arc_id) {
  std::unique_lock lock(mu_);
  return std::erase_if(records_, [&](const auto &kv) { return kv.second.arc_id == arc_id; });
}

void VectorStore::reassign_arc(const std::string &from_arc, const std::string &to_arc) {
  std::unique_lock lock(mu_);
  for (auto &[key, rec] : records_)
    if (rec.arc_id == from_arc && key.first != TargetKind::kArcSummary) rec.arc_id = to_arc;
}

std::vector<SimilarityHit> VectorStore::query_similar(std::span<const float> query, size_t k,
                                                      const QueryFilter &filter) const {
  if (k == 0) throw Error("INVALID_K", "k must be >= 1");
  std::shared_lock lock(mu_);
  std::vector<SimilarityHit> hits;
  if (records_.empty()) return hits;
  if (query.size() != dimension_) {
    throw Error("DIMENSION_MISMATCH", "query dimension " + std::to_string(query.size()) +
                                          ", store dimension " + std::to_string(dimension_));
  }
  Vector q = l2_normalized(query);
  hits.reserve(records_.size());
  for (const auto &[key, rec] : records_) {
    if (!filter.accepts(rec)) continue;
    hits.push_back({rec, cosine_similarity(q, rec.vector)});
  }
  size_t n = std::min(k, hits.size());
  std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(n), hits.end(),
                    hit_precedes);
  hits.resize(n);
  return hits;
}

std::vector<SimilarityHit> VectorStore::query_similar(const std::string &query_text, size_t k,
                                                      const QueryFilter &filter,
                                                      const EmbeddingProvider &provider) const {
  if (size() == 0) return {};
  auto vectors = provider.embed({query_text});
  return query_similar(vectors.at(0), k, filter);
}

std::vector<EmbeddingRecord> VectorStore::records(const QueryFilter &filter) const {
  std::shared_lock lock(mu_);
  std::vector<EmbeddingRecord> out;
  for (const auto &[key, rec] : records_)
    if (filter.accepts(rec)) out.push_back(rec);
  std::sort(out.begin(), out.end(),
            [](const EmbeddingRecord &a, const EmbeddingRecord &b) { return a.record_id < b.record_id; });
  return out;
}

void to_json(nlohmann::json &j, const EmbeddingRecord &r) {
  j = nlohmann::json{{"record_id", r.record_id},
                     {"target_kind", std::string(to_string(r.target_kind))},
                     {"target_id", r.target_id},
                     {"arc_id", r.arc_id},
                     {"series", r.series},
                     {"episode", r.episode ? nlohmann::json(r.episode->str()) : nlohmann::json()},
                     {"text", r.text}};
}

namespace {

uint32_t to_little_endian(uint32_t v) {
  if constexpr (std::endian::native == std::endian::big) return __builtin_bswap32(v);
  return v;
}

void write_atomically(const std::filesystem::path &path, const std::string &bytes) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("IO_ERROR", "cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("IO_ERROR", "short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace

void VectorStore::save(const std::filesystem::path &metadata_path,
                       const std::filesystem::path &vectors_path) const {
  auto all = records();
  std::string meta, packed;
  packed.reserve(all.size() * dimension() * 4);
  for (const auto &rec : all) {
    nlohmann::json j = rec;
    meta += j.dump() + "\n";
    for (float f : rec.vector) {
      uint32_t bits = to_little_endian(std::bit_cast<uint32_t>(f));
      packed.append(reinterpret_cast<const char *>(&bits), 4);
    }
  }
  write_atomically(vectors_path, packed);
  write_atomically(metadata_path, meta);
}

void VectorStore::load(const std::filesystem::path &metadata_path,
                       const std::filesystem::path &vectors_path) {
  std::ifstream meta(metadata_path);
  std::ifstream vecs(vectors_path, std::ios::binary);
  if (!meta || !vecs) throw Error("IO_ERROR", "cannot open vector store at " + metadata_path.string());
  std::string packed((std::istreambuf_iterator<char>(vecs)), std::istreambuf_iterator<char>());

  std::vector<nlohmann::json> lines;
  for (std::string line; std::getline(meta, line);)
    if (!line.empty()) lines.push_back(nlohmann::json::parse(line));
  if (lines.empty()) {
    std::unique_lock lock(mu_);
    records_.clear();
    return;
  }
  if (packed.size() % (lines.size() * 4) != 0)
    throw Error("CORRUPT_STORE", "vector sidecar size does not match metadata");
  size_t dim = packed.size() / (lines.size() * 4);

  std::map<Key, EmbeddingRecord> loaded;
  for (size_t i = 0; i < lines.size(); ++i) {
    const auto &j = lines[i];
    EmbeddingRecord r;
    r.record_id = j.at("record_id").get<std::string>();
    r.target_kind = parse_target_kind(j.at("target_kind").get<std::string>());
    r.target_id = j.at("target_id").get<std::string>();
    r.arc_id = j.value("arc_id", std::string());
    r.series = j.at("series").get<SeriesId>();
    if (!j.at("episode").is_null()) r.episode = EpisodeKey::parse(j.at("episode").get<std::string>());
    r.text = j.value("text", std::string());
    r.vector.resize(dim);
    for (size_t d = 0; d < dim; ++d) {
      uint32_t bits;
      std::memcpy(&bits, packed.data() + (i * dim + d) * 4, 4);
      r.vector[d] = std::bit_cast<float>(to_little_endian(bits));
    }
    loaded[{r.target_kind, r.target_id}] = std::move(r);
  }
  std::unique_lock lock(mu_);
  if (dimension_ != 0 && dimension_ != dim)
    throw Error("DIMENSION_MISMATCH", "persisted dimension " + std::to_string(dim));
  dimension_ = dim;
  records_ = std::move(loaded);
}

}  // namespace narrmem
