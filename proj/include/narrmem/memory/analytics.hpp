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

#ifndef NARRMEM_MEMORY_ANALYTICS_HPP_
#define NARRMEM_MEMORY_ANALYTICS_HPP_

#include <string>
#include <vector>

#include "json.hpp"
#include "narrmem/memory/vector_store.hpp"

namespace narrmem {

struct ProjectedPoint {
  std::string record_id;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

// Mean-centers the vectors and projects them onto the top three principal
// components. Each component's largest-magnitude loading is made positive.
// Components with (numerically) zero singular value yield 0 coordinates.
std::vector<ProjectedPoint> pca_project_3d(const std::vector<EmbeddingRecord> &records);

struct ClusterAssignment {
  int cluster_id = 0;
  std::vector<std::string> member_ids;
};

// Average-linkage agglomerative clustering under cosine distance
// (1 - similarity). Merging stops once the closest pair of clusters is
// farther apart than `distance_threshold`. Equal distances merge the
// lexicographically smallest pair, clusters being named by their smallest
// record id. Clusters are numbered in order of their smallest member.
std::vector<ClusterAssignment> cluster_embeddings(const std::vector<EmbeddingRecord> &records,
                                                  double distance_threshold);

void to_json(nlohmann::json &j, const ProjectedPoint &p);
void to_json(nlohmann::json &j, const ClusterAssignment &c);

}  // namespace narrmem

#endif  // NARRMEM_MEMORY_ANALYTICS_HPP_
