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

#ifndef NARRMEM_CORE_EMBEDDING_PROVIDER_HPP_
#define NARRMEM_CORE_EMBEDDING_PROVIDER_HPP_

#include <string>
#include <vector>

namespace narrmem {

// Maps texts to fixed-dimension vectors. Implementations may return
// unnormalized vectors; the vector store normalizes on write.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  virtual std::string name() const = 0;
  virtual size_t dimension() const = 0;
  // One vector per input text, in order.
  virtual std::vector<std::vector<float>> embed(const std::vector<std::string> &texts) const = 0;
};

}  // namespace narrmem

#endif  // NARRMEM_CORE_EMBEDDING_PROVIDER_HPP_
