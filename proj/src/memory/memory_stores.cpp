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

#include "narrmem/memory/memory_stores.hpp"

namespace narrmem {

namespace {
std::filesystem::path with_suffix(const std::filesystem::path &base, const char *suffix) {
  std::filesystem::path p = base;
  p += suffix;
  return p;
}
}  // namespace

MemoryStores::MemoryStores(size_t dimension)
    : relational_(std::make_unique<RelationalStore>(":memory:")),
      vectors_(std::make_unique<VectorStore>(dimension)) {}

MemoryStores::MemoryStores(const std::filesystem::path &db_path,
                           const std::filesystem::path &vectors_base, size_t dimension)
    : relational_(std::make_unique<RelationalStore>(db_path.string())),
      vectors_(std::make_unique<VectorStore>(dimension)),
      vectors_base_(vectors_base) {
  auto meta = with_suffix(vectors_base, ".jsonl");
  auto vecs = with_suffix(vectors_base, ".f32");
  if (std::filesystem::exists(meta) && std::filesystem::exists(vecs)) vectors_->load(meta, vecs);
}

void MemoryStores::delete_arc(const std::string &arc_id) {
  relational_->delete_arc(arc_id);
  vectors_->remove_arc(arc_id);
}

void MemoryStores::flush() const {
  if (!vectors_base_) return;
  vectors_->save(with_suffix(*vectors_base_, ".jsonl"), with_suffix(*vectors_base_, ".f32"));
}

size_t MemoryStores::count_orphan_embeddings() const {
  size_t orphans = 0;
  for (const auto &rec : vectors_->records())
    if (!relational_->find_arc(rec.arc_id)) ++orphans;
  return orphans;
}

}  // namespace narrmem
