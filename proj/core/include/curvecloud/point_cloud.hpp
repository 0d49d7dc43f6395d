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

#ifndef CURVECLOUD_POINT_CLOUD_HPP_
#define CURVECLOUD_POINT_CLOUD_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "curvecloud/common.hpp"

namespace curvecloud {

// Raw output of a laser scanner. Point i was captured by beam beam_ids[i]
// (1-based, at most beam_count) at time timestamps[i] in microseconds.
struct PointCloud {
  std::vector<Vec3> positions;
  std::vector<double> timestamps;
  std::vector<std::uint32_t> beam_ids;
  std::uint32_t beam_count = 0;

  std::size_t size() const { return positions.size(); }
  bool empty() const { return positions.empty(); }

  void push_back(const Vec3& p, double t, std::uint32_t beam) {
    positions.push_back(p);
    timestamps.push_back(t);
    beam_ids.push_back(beam);
  }

  friend bool operator==(const PointCloud&, const PointCloud&) = default;
};

// Throws InvalidInput unless the three arrays have the same length, every
// coordinate and timestamp is finite and every beam id lies in [1, beam_count].
void check_point_cloud(const PointCloud& pc);

}  // namespace curvecloud

#endif  // CURVECLOUD_POINT_CLOUD_HPP_
