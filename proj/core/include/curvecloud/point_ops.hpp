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

#ifndef CURVECLOUD_POINT_OPS_HPP_
#define CURVECLOUD_POINT_OPS_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "curvecloud/common.hpp"
#include "curvecloud/curve_ops.hpp"

namespace curvecloud {

// Greedy farthest point sampling starting at `seed`. Returns `count` indices in
// visitation order. O(N * count).
std::vector<Index> fps_euclidean(std::span<const Vec3> points,
                                 std::size_t count, Index seed = 0);

// Index of the lexicographically smallest point (lowest index on ties). Used
// as an FPS seed that does not depend on point order.
Index canonical_seed(std::span<const Vec3> points);

// Brute-force Euclidean ball query, |p - c|^2 < radius^2. With a cap the
// closest members are kept, ties broken toward the lower index.
Neighborhoods group_ball3d(std::span<const Vec3> points,
                           std::span<const Vec3> centroids, double radius,
                           std::optional<std::size_t> max_neighbors = {});

// k nearest neighbors of each query among `points`, ordered by
// (squared distance, index).
struct KnnResult {
  std::size_t k = 0;
  std::vector<Index> indices;      // queries x k
  std::vector<double> sq_distances;  // queries x k

  std::span<const Index> of(std::size_t q) const {
    return std::span<const Index>(indices).subspan(q * k, k);
  }
  std::span<const double> distances_of(std::size_t q) const {
    return std::span<const double>(sq_distances).subspan(q * k, k);
  }
};

// When `exclude_self` is set, queries must be the points themselves and query
// i never returns i.
KnnResult knn(std::span<const Vec3> points, std::span<const Vec3> queries,
              std::size_t k, bool exclude_self);

}  // namespace curvecloud

#endif  // CURVECLOUD_POINT_OPS_HPP_
