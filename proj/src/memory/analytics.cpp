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

#include "narrmem/memory/analytics.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "narrmem/core/error.hpp"

namespace narrmem {

std::vector<ProjectedPoint> pca_project_3d(const std::vector<EmbeddingRecord> &records) {
  std::vector<ProjectedPoint> out;
  out.reserve(records.size());
  for (const auto &r : records) out.push_back({r.record_id, 0.0, 0.0, 0.0});
  if (records.size() < 2) return out;

  const Eigen::Index n = static_cast<Eigen::Index>(records.size());
  const Eigen::Index d = static_cast<Eigen::Index>(records.front().vector.size());
  Eigen::MatrixXd x(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto &v = records[static_cast<size_t>(i)].vector;
    if (static_cast<Eigen::Index>(v.size()) != d)
      throw Error("DIMENSION_MISMATCH", "records passed to PCA differ in dimension");
    for (Eigen::Index c = 0; c < d; ++c) x(i, c) = v[static_cast<size_t>(c)];
  }
  x.rowwise() -= x.colwise().mean();

  Eigen::BDCSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinV);
  const Eigen::VectorXd &sv = svd.singularValues();
  Eigen::MatrixXd v = svd.matrixV();
  const double tol = std::max<double>(static_cast<double>(std::max(n, d)) *
                                          std::numeric_limits<double>::epsilon() *
                                          (sv.size() ? sv(0) : 0.0),
                                      1e-12);

  const Eigen::Index components = std::min<Eigen::Index>(3, sv.size());
  for (Eigen::Index c = 0; c < components; ++c) {
    if (sv(c) <= tol) break;
    Eigen::VectorXd axis = v.col(c);
    Eigen::Index pivot = 0;
    axis.cwiseAbs().maxCoeff(&pivot);
    if (axis(pivot) < 0) axis = -axis;
    Eigen::VectorXd coords = x * axis;
    for (Eigen::Index i = 0; i < n; ++i) {
      double value = coords(i);
      auto &p = out[static_cast<size_t>(i)];
      (c == 0 ? p.x : c == 1 ? p.y : p.z) = value;
    }
  }
  return out;
}

std::vector<ClusterAssignment> cluster_embeddings(const std::vector<EmbeddingRecord> &records,
                                                  double distance_threshold) {
  std::vector<size_t> order(records.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return records[a].record_id < records[b].record_id;
  });

  const size_t n = order.size();
  std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j) {
      double dij = 1.0 - cosine_similarity(records[order[i]].vector, records[order[j]].vector);
      dist[i][j] = dist[j][i] = dij;
    }

  // Cluster i keeps slot i; a merge of (i, j) with i < j lives on in slot i,
  // so slot order always equals smallest-member order.
  std::vector<std::vector<size_t>> members(n);
  std::vector<bool> active(n, true);
  for (size_t i = 0; i < n; ++i) members[i] = {i};

  for (size_t remaining = n; remaining > 1; --remaining) {
    double best = std::numeric_limits<double>::infinity();
    size_t bi = 0, bj = 0;
    for (size_t i = 0; i < n; ++i) {
      if (!active[i]) continue;
      for (size_t j = i + 1; j < n; ++j) {
        if (active[j] && dist[i][j] < best) {
          best = dist[i][j];
          bi = i;
          bj = j;
        }
      }
    }
    if (!(best <= distance_threshold)) break;

    const double ni = static_cast<double>(members[bi].size());
    const double nj = static_cast<double>(members[bj].size());
    for (size_t k = 0; k < n; ++k) {
      if (!active[k] || k == bi || k == bj) continue;
      double merged = (ni * dist[bi][k] + nj * dist[bj][k]) / (ni + nj);
      dist[bi][k] = dist[k][bi] = merged;
    }
    members[bi].insert(members[bi].end(), members[bj].begin(), members[bj].end());
    std::sort(members[bi].begin(), members[bi].end());
    members[bj].clear();
    active[bj] = false;
  }

  std::vector<ClusterAssignment> out;
  for (size_t i = 0; i < n; ++i) {
    if (!active[i]) continue;
    ClusterAssignment c;
    c.cluster_id = static_cast<int>(out.size());
    for (size_t m : members[i]) c.member_ids.push_back(records[order[m]].record_id);
    out.push_back(std::move(c));
  }
  return out;
}

void to_json(nlohmann::json &j, const ProjectedPoint &p) {
  j = nlohmann::json{{"record_id", p.record_id}, {"x", p.x}, {"y", p.y}, {"z", p.z}};
}

void to_json(nlohmann::json &j, const ClusterAssignment &c) {
  j = nlohmann::json{{"cluster_id", c.cluster_id}, {"member_ids", c.member_ids}};
}

}  // namespace narrmem
