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

// Test-only reference implementations. Deliberately naive and independent of
// the library code paths they check.

#ifndef NARRMEM_TESTS_SUPPORT_ORACLES_HPP_
#define NARRMEM_TESTS_SUPPORT_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace narrmem::oracle {

inline double dot(const std::vector<float> &a, const std::vector<float> &b) {
  double s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += static_cast<double>(a[i]) * b[i];
  return s;
}

inline double cosine(const std::vector<float> &a, const std::vector<float> &b) {
  return dot(a, b) / (std::sqrt(dot(a, a)) * std::sqrt(dot(b, b)));
}

// Exhaustive scan: score every candidate, full sort by (score desc, id asc).
inline std::vector<std::string> exhaustive_top_k(
    const std::vector<std::pair<std::string, std::vector<float>>> &items,
    const std::vector<float> &query, size_t k) {
  std::vector<std::pair<double, std::string>> scored;
  for (const auto &[id, v] : items) scored.emplace_back(cosine(query, v), id);
  std::sort(scored.begin(), scored.end(), [](const auto &a, const auto &b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  std::vector<std::string> out;
  for (size_t i = 0; i < std::min(k, scored.size()); ++i) out.push_back(scored[i].second);
  return out;
}

// Cyclic Jacobi eigenvalue iteration for a symmetric matrix. Returns the
// eigenvalues in descending order.
inline std::vector<double> jacobi_eigenvalues(std::vector<std::vector<double>> a) {
  const size_t n = a.size();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0;
    for (size_t p = 0; p < n; ++p)
      for (size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    if (off < 1e-22) break;
    for (size_t p = 0; p < n; ++p) {
      for (size_t q = p + 1; q < n; ++q) {
        if (std::abs(a[p][q]) < 1e-300) continue;
        double theta = (a[q][q] - a[p][p]) / (2 * a[p][q]);
        double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1));
        double c = 1 / std::sqrt(t * t + 1), s = t * c;
        for (size_t k = 0; k < n; ++k) {
          double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (size_t k = 0; k < n; ++k) {
          double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(n);
  for (size_t i = 0; i < n; ++i) ev[i] = a[i][i];
  std::sort(ev.rbegin(), ev.rend());
  return ev;
}

// Eigenvalues of the Gram matrix of the mean-centered rows; these equal the
// squared singular values, i.e. the scatter along each principal axis.
inline std::vector<double> centered_scatter_spectrum(const std::vector<std::vector<float>> &rows) {
  const size_t n = rows.size(), d = rows.front().size();
  std::vector<double> mean(d, 0.0);
  for (const auto &r : rows)
    for (size_t c = 0; c < d; ++c) mean[c] += r[c];
  for (auto &m : mean) m /= static_cast<double>(n);
  std::vector<std::vector<double>> gram(n, std::vector<double>(n, 0.0));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i; j < n; ++j) {
      double s = 0;
      for (size_t c = 0; c < d; ++c) s += (rows[i][c] - mean[c]) * (rows[j][c] - mean[c]);
      gram[i][j] = gram[j][i] = s;
    }
  return jacobi_eigenvalues(std::move(gram));
}

// Average-linkage agglomeration recomputed from scratch every step: the
// linkage of two clusters is the mean of all member-pair distances.
inline std::vector<std::vector<std::string>> brute_force_average_linkage(
    std::vector<std::pair<std::string, std::vector<float>>> items, double threshold) {
  std::sort(items.begin(), items.end());
  std::vector<std::vector<size_t>> clusters;
  for (size_t i = 0; i < items.size(); ++i) clusters.push_back({i});
  auto linkage = [&](const std::vector<size_t> &a, const std::vector<size_t> &b) {
    double sum = 0;
    for (size_t x : a)
      for (size_t y : b) sum += 1.0 - cosine(items[x].second, items[y].second);
    return sum / static_cast<double>(a.size() * b.size());
  };
  while (clusters.size() > 1) {
    double best = std::numeric_limits<double>::infinity();
    size_t bi = 0, bj = 0;
    for (size_t i = 0; i < clusters.size(); ++i)
      for (size_t j = i + 1; j < clusters.size(); ++j) {
        double l = linkage(clusters[i], clusters[j]);
        if (l < best - 1e-12) {
          best = l;
          bi = i;
          bj = j;
        }
      }
    if (best > threshold) break;
    clusters[bi].insert(clusters[bi].end(), clusters[bj].begin(), clusters[bj].end());
    std::sort(clusters[bi].begin(), clusters[bi].end());
    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(bj));
  }
  std::vector<std::vector<std::string>> out;
  for (const auto &c : clusters) {
    std::vector<std::string> ids;
    for (size_t m : c) ids.push_back(items[m].first);
    out.push_back(ids);
  }
  return out;
}

inline std::vector<float> random_vector(std::mt19937_64 &rng, size_t d) {
  std::normal_distribution<float> g(0.0f, 1.0f);
  std::vector<float> v(d);
  for (auto &x : v) x = g(rng);
  return v;
}

inline std::vector<float> random_unit_vector(std::mt19937_64 &rng, size_t d) {
  auto v = random_vector(rng, d);
  double n = std::sqrt(dot(v, v));
  for (auto &x : v) x = static_cast<float>(x / n);
  return v;
}

// Greedy one-to-one matching: all pairs sorted by score descending (ties by
// extracted index, then gold index), accepted when both sides are free.
inline std::vector<std::pair<size_t, size_t>> greedy_matching(
    const std::vector<std::vector<double>> &score, double threshold) {
  std::vector<std::tuple<double, size_t, size_t>> pairs;
  for (size_t i = 0; i < score.size(); ++i)
    for (size_t j = 0; j < score[i].size(); ++j) pairs.emplace_back(score[i][j], i, j);
  std::sort(pairs.begin(), pairs.end(), [](const auto &a, const auto &b) {
    if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) > std::get<0>(b);
    return std::make_pair(std::get<1>(a), std::get<2>(a)) <
           std::make_pair(std::get<1>(b), std::get<2>(b));
  });
  std::set<size_t> used_i, used_j;
  std::vector<std::pair<size_t, size_t>> out;
  for (const auto &[s, i, j] : pairs) {
    if (s < threshold || used_i.count(i) || used_j.count(j)) continue;
    used_i.insert(i);
    used_j.insert(j);
    out.emplace_back(i, j);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace narrmem::oracle

#endif  // NARRMEM_TESTS_SUPPORT_ORACLES_HPP_
