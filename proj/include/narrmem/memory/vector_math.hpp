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

#ifndef NARRMEM_MEMORY_VECTOR_MATH_HPP_
#define NARRMEM_MEMORY_VECTOR_MATH_HPP_

#include <set>
#include <span>
#include <string>
#include <vector>

namespace narrmem {

using Vector = std::vector<float>;

// dot(a,b) / (|a||b|), clamped to [-1, 1]. Accumulates in double.
// Throws Error("DIMENSION_MISMATCH") or Error("ZERO_VECTOR").
double cosine_similarity(std::span<const float> a, std::span<const float> b);

double l2_norm(std::span<const float> v);

// Returns v / |v|. Throws Error("ZERO_VECTOR").
Vector l2_normalized(std::span<const float> v);

// |a ∩ b| / |a ∪ b|; 1.0 when both sets are empty.
double jaccard_similarity(const std::set<std::string> &a, const std::set<std::string> &b);

}  // namespace narrmem

#endif  // NARRMEM_MEMORY_VECTOR_MATH_HPP_
