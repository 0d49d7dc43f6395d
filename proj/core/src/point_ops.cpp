// Copyright 2026 The CurveCloud Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "curvecloud/point_ops.hpp"

#include <omp.h>

#include <algorithm>
#include <limits>
#include <string>
#include <tuple>
#include <utility>

#include "curvecloud/instrumentation.hpp"
#include "parallel.hpp"

namespace curvecloud {
namespace {

struct Candidate {
  double value;
  Index index;
};

// Larger value wins; equal values go to the lower index. This is a total
// order, so the parallel reduction is independent of the partitioning.
bool beats(const Candidate& a, const Candidate& b) {
  return a.value > b.value || (a.value == b.value && a.index < b.index);
}

bool nearer(const std::pair<double, Index>& a,
            const std::pair<double, Index>& b) {
  return a.first < b.first || (a.first == b.first && a.second < b.second);
}

}  // namespace

std::vector<Index> fps_euclidean(std::span<const Vec3> points,
                                 std::size_t count, Index seed) {
  count_op(Op::kFpsEuclidean);
  const std::size_t n = points.size();
  if (n == 0) throw InvalidInput("fps_euclidean needs at least one point");
  if (count == 0) throw InvalidInput("fps_euclidean sample count must be >= 1");
  if (count > n) {
    throw InvalidInput("cannot sample " + std::to_string(count) + " of " +
                       std::to_string(n) + " points");
  }
  if (seed >= n) throw InvalidInput("fps seed out of range");

  std::vector<double> min_d(n, std::numeric_limits<double>::infinity());
  std::vector<Index> out;
  out.reserve(count);
  Index current = seed;
  const int threads = thread_count();
  const bool parallel = threads > 1 && n >= 8192;
  const auto sn = static_cast<std::int64_t>(n);

  for (std::size_t step = 0; step < count; ++step) {
    out.push_back(current);
    min_d[current] = -1.0;  // never picked again
    if (step + 1 == count) break;
    const Vec3 c = points[current];
    Candidate best{-std::numeric_limits<double>::infinity(),
                   static_cast<Index>(n)};
    if (!parallel) {
      for (std::size_t i = 0; i < n; ++i) {
        const double d = std::min(min_d[i], squared_distance(points[i], c));
        min_d[i] = d;
        if (d > best.value) best = {d, static_cast<Index>(i)};
      }
    } else {
#pragma omp parallel num_threads(threads)
      {
        Candidate local{-std::numeric_limits<double>::infinity(),
                        static_cast<Index>(n)};
#pragma omp for schedule(static) nowait
        for (std::int64_t i = 0; i < sn; ++i) {
          const double d = std::min(min_d[i], squared_distance(points[i], c));
          min_d[i] = d;
          if (d > local.value) local = {d, static_cast<Index>(i)};
        }
#pragma omp critical
        if (beats(local, best)) best = local;
      }
    }
    current = best.index;
  }
  return out;
}

Index canonical_seed(std::span<const Vec3> points) {
  if (points.empty()) throw InvalidInput("canonical_seed of an empty set");
  Index best = 0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    const Vec3& a = points[i];
    const Vec3& b = points[best];
    if (std::tie(a.x, a.y, a.z) < std::tie(b.x, b.y, b.z)) {
      best = static_cast<Index>(i);
    }
  }
  return best;
}

Neighborhoods group_ball3d(std::span<const Vec3> points,
                           std::span<const Vec3> centroids, double radius,
                           std::optional<std::size_t> max_neighbors) {
  count_op(Op::kGroupBall3d);
  if (!(radius > 0.0)) throw InvalidInput("radius must be positive");
  if (max_neighbors && *max_neighbors == 0) {
    throw InvalidInput("max_neighbors must be at least 1");
  }
  const double r2 = radius * radius;
  std::vector<std::vector<Index>> lists(centroids.size());
  internal::parallel_for(centroids.size(), [&](std::size_t q) {
    const Vec3 c = centroids[q];
    std::vector<std::pair<double, Index>> hits;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const double d = squared_distance(points[i], c);
      if (d < r2) hits.emplace_back(d, static_cast<Index>(i));
    }
    if (max_neighbors && hits.size() > *max_neighbors) {
      const auto keep = static_cast<std::ptrdiff_t>(*max_neighbors);
      std::nth_element(hits.begin(), hits.begin() + keep - 1, hits.end(),
                       nearer);
      hits.resize(static_cast<std::size_t>(keep));
    }
    auto& list = lists[q];
    list.reserve(hits.size());
    for (const auto& h : hits) list.push_back(h.second);
    std::sort(list.begin(), list.end());
  }, 16);

  Neighborhoods nb;
  nb.offsets.resize(centroids.size() + 1);
  for (std::size_t q = 0; q < centroids.size(); ++q) {
    nb.offsets[q + 1] = nb.offsets[q] + static_cast<Index>(lists[q].size());
  }
  nb.members.reserve(nb.offsets.back());
  for (const auto& list : lists) {
    nb.members.insert(nb.members.end(), list.begin(), list.end());
  }
  return nb;
}

KnnResult knn(std::span<const Vec3> points, std::span<const Vec3> queries,
              std::size_t k, bool exclude_self) {
  count_op(Op::kKnn);
  const std::size_t available = points.size() - (exclude_self ? 1 : 0);
  if (k == 0) throw InvalidInput("knn needs k >= 1");
  if (points.empty() || k > available) {
    throw InvalidInput("knn asks for " + std::to_string(k) + " neighbors among " +
                       std::to_string(points.size()) + " points");
  }
  if (exclude_self && queries.size() != points.size()) {
    throw InvalidInput("knn with exclude_self needs queries == points");
  }
  KnnResult res;
  res.k = k;
  res.indices.resize(queries.size() * k);
  res.sq_distances.resize(queries.size() * k);
  internal::parallel_for(queries.size(), [&](std::size_t q) {
    std::vector<std::pair<double, Index>> best;
    best.reserve(k + 1);
    const Vec3 c = queries[q];
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (exclude_self && i == q) continue;
      const std::pair<double, Index> cand{squared_distance(points[i], c),
                                          static_cast<Index>(i)};
      if (best.size() == k && !nearer(cand, best.back())) continue;
      best.insert(std::upper_bound(best.begin(), best.end(), cand, nearer),
                  cand);
      if (best.size() > k) best.pop_back();
    }
    for (std::size_t s = 0; s < k; ++s) {
      res.sq_distances[q * k + s] = best[s].first;
      res.indices[q * k + s] = best[s].second;
    }
  }, 16);
  return res;
}

}  // namespace curvecloud
