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

#include "narrmem/llm/embedding.hpp"

#include <cmath>
#include <cstdint>
#include <cstdlib>

#include "httplib.h"
#include "json.hpp"
#include "narrmem/core/error.hpp"
#include "narrmem/core/text.hpp"

namespace narrmem {

namespace {

uint32_t fnv1a(std::string_view s) {
  uint32_t h = 2166136261u;
  for (unsigned char c : s) {
    h ^= c;
    h *= 16777619u;
  }
  return h;
}

std::string env_or(const char *name, const std::string &fallback = "") {
  const char *v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

}  // namespace

HashedNgramEmbedder::HashedNgramEmbedder(size_t dimension, size_t n) : dimension_(dimension), n_(n) {
  if (dimension_ < 2) throw Error("INVALID_DIMENSION", "embedding dimension must be >= 2");
  if (n_ == 0) throw Error("INVALID_DIMENSION", "n-gram length must be >= 1");
}

std::vector<std::vector<float>> HashedNgramEmbedder::embed(
    const std::vector<std::string> &texts) const {
  std::vector<std::vector<float>> out;
  out.reserve(texts.size());
  for (const auto &t : texts) {
    std::string s = " " + text::to_lower(text::collapse_whitespace(t)) + " ";
    std::vector<double> acc(dimension_, 0.0);
    if (s.size() < n_) s.resize(n_, ' ');
    for (size_t i = 0; i + n_ <= s.size(); ++i)
      acc[fnv1a(std::string_view(s).substr(i, n_)) % dimension_] += 1.0;
    double norm = 0;
    for (double x : acc) norm += x * x;
    norm = std::sqrt(norm);
    std::vector<float> v(dimension_);
    for (size_t i = 0; i < dimension_; ++i) v[i] = static_cast<float>(acc[i] / norm);
    out.push_back(std::move(v));
  }
  return out;
}

HttpEmbeddingProvider::HttpEmbeddingProvider(std::string base_url, std::string api_key,
                                             std::string model, size_t dimension)
    : base_url_(std::move(base_url)),
      api_key_(std::move(api_key)),
      model_(std::move(model)),
      dimension_(dimension) {
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
}

std::unique_ptr<HttpEmbeddingProvider> HttpEmbeddingProvider::from_env() {
  std::string base = env_or("NARRMEM_EMBED_BASE_URL");
  std::string model = env_or("NARRMEM_EMBED_MODEL");
  std::string dim = env_or("NARRMEM_EMBED_DIM");
  if (base.empty() || model.empty() || dim.empty())
    throw Error("UNAVAILABLE",
                "NARRMEM_EMBED_BASE_URL, NARRMEM_EMBED_MODEL and NARRMEM_EMBED_DIM must be set");
  return std::make_unique<HttpEmbeddingProvider>(
      base, env_or("NARRMEM_EMBED_API_KEY", env_or("NARRMEM_LLM_API_KEY")), model,
      static_cast<size_t>(std::stoul(dim)));
}

std::vector<std::vector<float>> HttpEmbeddingProvider::embed(
    const std::vector<std::string> &texts) const {
  nlohmann::json body = {{"model", model_}, {"input", texts}};
  httplib::Client client(base_url_);
  client.set_connection_timeout(10);
  client.set_read_timeout(120);
  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
  auto res = client.Post("/v1/embeddings", headers, body.dump(), "application/json");
  if (!res) throw Error("TRANSPORT_ERROR", "embedding request failed: " + httplib::to_string(res.error()));
  if (res->status != 200)
    throw Error("TRANSPORT_ERROR", "embedding endpoint returned HTTP " + std::to_string(res->status));
  std::vector<std::vector<float>> out;
  try {
    auto j = nlohmann::json::parse(res->body);
    for (const auto &item : j.at("data")) out.push_back(item.at("embedding").get<std::vector<float>>());
  } catch (const nlohmann::json::exception &e) {
    throw Error("TRANSPORT_ERROR", std::string("unexpected embedding response: ") + e.what());
  }
  return out;
}

std::vector<std::vector<float>> embed_texts(const EmbeddingProvider &provider,
                                            const std::vector<std::string> &texts) {
  if (texts.empty()) throw Error("EMPTY_INPUT", "embed_texts needs at least one text");
  for (size_t i = 0; i < texts.size(); ++i)
    if (text::trim(texts[i]).empty())
      throw Error("EMPTY_TEXT", "text " + std::to_string(i) + " is empty");
  auto vectors = provider.embed(texts);
  if (vectors.size() != texts.size())
    throw Error("PROVIDER_ERROR", provider.name() + " returned " + std::to_string(vectors.size()) +
                                      " vectors for " + std::to_string(texts.size()) + " texts");
  for (const auto &v : vectors)
    if (v.size() != provider.dimension())
      throw Error("PROVIDER_ERROR", provider.name() + " returned a vector of dimension " +
                                        std::to_string(v.size()));
  return vectors;
}

}  // namespace narrmem
