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

#ifndef NARRMEM_LLM_EMBEDDING_HPP_
#define NARRMEM_LLM_EMBEDDING_HPP_

#include <memory>
#include <string>
#include <vector>

#include "narrmem/core/embedding_provider.hpp"

namespace narrmem {

// Offline fallback: byte 3-grams of the lowercased, whitespace-collapsed text
// (padded with one space each side) hashed with 32-bit FNV-1a into
// `dimension` buckets, then L2-normalized.
class HashedNgramEmbedder : public EmbeddingProvider {
 public:
  explicit HashedNgramEmbedder(size_t dimension = 256, size_t n = 3);

  std::string name() const override { return "hashed-3gram"; }
  size_t dimension() const override { return dimension_; }
  std::vector<std::vector<float>> embed(const std::vector<std::string> &texts) const override;

 private:
  size_t dimension_;
  size_t n_;
};

// OpenAI-compatible /v1/embeddings client.
//   NARRMEM_EMBED_BASE_URL, NARRMEM_EMBED_MODEL, NARRMEM_EMBED_DIM,
//   NARRMEM_EMBED_API_KEY (falls back to NARRMEM_LLM_API_KEY)
class HttpEmbeddingProvider : public EmbeddingProvider {
 public:
  HttpEmbeddingProvider(std::string base_url, std::string api_key, std::string model,
                        size_t dimension);
  static std::unique_ptr<HttpEmbeddingProvider> from_env();  // UNAVAILABLE

  std::string name() const override { return "http:" + model_; }
  size_t dimension() const override { return dimension_; }
  std::vector<std::vector<float>> embed(const std::vector<std::string> &texts) const override;

 private:
  std::string base_url_, api_key_, model_;
  size_t dimension_;
};

// Checked front door: EMPTY_INPUT for an empty list, EMPTY_TEXT for a blank
// entry, PROVIDER_ERROR when the provider returns the wrong shape.
std::vector<std::vector<float>> embed_texts(const EmbeddingProvider &provider,
                                            const std::vector<std::string> &texts);

}  // namespace narrmem

#endif  // NARRMEM_LLM_EMBEDDING_HPP_
