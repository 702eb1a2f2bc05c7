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

#ifndef NARRMEM_MEMORY_MEMORY_STORES_HPP_
#define NARRMEM_MEMORY_MEMORY_STORES_HPP_

#include <filesystem>
#include <memory>
#include <optional>

#include "narrmem/memory/relational_store.hpp"
#include "narrmem/memory/vector_store.hpp"

namespace narrmem {

// Long-term memory: the relational store plus the episodic vector store,
// with the cross-store cascades that keep them consistent.
class MemoryStores {
 public:
  // Purely in-memory stores.
  explicit MemoryStores(size_t dimension);
  // SQLite file at `db_path`; vectors at `vectors_base` + ".jsonl"/".f32",
  // loaded if present.
  MemoryStores(const std::filesystem::path &db_path, const std::filesystem::path &vectors_base,
               size_t dimension);

  RelationalStore &relational() { return *relational_; }
  const RelationalStore &relational() const { return *relational_; }
  VectorStore &vectors() { return *vectors_; }
  const VectorStore &vectors() const { return *vectors_; }

  // Removes the arc, its progressions and every embedding it owns.
  void delete_arc(const std::string &arc_id);

  // Persists the vector store when backed by files; no-op otherwise.
  void flush() const;

  // Number of embeddings whose owning arc no longer exists.
  size_t count_orphan_embeddings() const;

 private:
  std::unique_ptr<RelationalStore> relational_;
  std::unique_ptr<VectorStore> vectors_;
  std::optional<std::filesystem::path> vectors_base_;
};

}  // namespace narrmem

#endif  // NARRMEM_MEMORY_MEMORY_STORES_HPP_
