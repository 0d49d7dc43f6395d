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

#ifndef CURVECLOUD_SYNTHETIC_HPP_
#define CURVECLOUD_SYNTHETIC_HPP_

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "curvecloud/curve_cloud.hpp"
#include "curvecloud/point_cloud.hpp"

// Deterministic workloads for benchmarks and tests.
namespace curvecloud::synthetic {

// `n` points on gently wavy polylines of `points_per_curve` points each (the
// last curve may be shorter), consecutive points about `spacing` apart.
CurveCloud wavy_curves(std::size_t n, std::size_t points_per_curve = 10000,
                       double spacing = 0.01);

// The same geometry as a raw scan: one beam per curve (cycling through
// `beams` ids) with ascending timestamps.
PointCloud wavy_scan(std::size_t n, std::uint32_t beams = 64,
                     std::size_t points_per_curve = 10000,
                     double spacing = 0.01);

// Parallel-pattern scan of benchmark_scene() with `n` points.
PointCloud benchmark_scan(std::size_t n, std::uint32_t beams = 32,
                          std::uint64_t seed = 0);

// Median wall time in seconds of `repeat` calls to fn.
template <typename Fn>
double median_seconds(Fn&& fn, std::size_t repeat) {
  std::vector<double> samples;
  samples.reserve(repeat);
  for (std::size_t r = 0; r < repeat; ++r) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    const std::chrono::duration<double> elapsed =
        std::chrono::steady_clock::now() - start;
    samples.push_back(elapsed.count());
  }
  std::sort(samples.begin(), samples.end());
  const std::size_t m = samples.size() / 2;
  return samples.size() % 2 ? samples[m] : 0.5 * (samples[m - 1] + samples[m]);
}

}  // namespace curvecloud::synthetic

#endif  // CURVECLOUD_SYNTHETIC_HPP_
