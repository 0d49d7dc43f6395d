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

#ifndef CURVECLOUD_CURVE_CLOUD_HPP_
#define CURVECLOUD_CURVE_CLOUD_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "curvecloud/common.hpp"
#include "curvecloud/point_cloud.hpp"

namespace curvecloud {

// A set of polylines stored as one flat point array plus an offset table.
// Curve j owns positions[offsets[j], offsets[j + 1]) in traversal order and
// was captured by beam source_beam[j].
//
// The struct does not enforce its invariants so that damaged clouds can be
// represented and diagnosed with validate(). Operations taking a CurveCloud
// call check_structure() on entry.
struct CurveCloud {
  std::vector<Vec3> positions;
  std::vector<Index> offsets{0};
  std::vector<std::uint32_t> source_beam;

  std::size_t num_points() const { return positions.size(); }
  std::size_t num_curves() const {
    return offsets.empty() ? 0 : offsets.size() - 1;
  }
  Index curve_begin(std::size_t j) const { return offsets[j]; }
  Index curve_end(std::size_t j) const { return offsets[j + 1]; }
  std::size_t curve_size(std::size_t j) const {
    return offsets[j + 1] - offsets[j];
  }
  std::span<const Vec3> curve(std::size_t j) const {
    return std::span<const Vec3>(positions).subspan(curve_begin(j),
                                                    curve_size(j));
  }

  friend bool operator==(const CurveCloud&, const CurveCloud&) = default;
};

// Throws InvalidInput if offsets are not a strictly increasing table from 0 to
// num_points() or source_beam has the wrong length.
void check_structure(const CurveCloud& cc);

// Curve id of every point.
std::vector<Index> curve_ids(const CurveCloud& cc);

// Keeps only the points listed in `indices` (ascending, unique) and drops
// curves left without points. Curve order and beam provenance are preserved.
CurveCloud restrict_to(const CurveCloud& cc, std::span<const Index> indices);

// Split thresholds for point-to-curve conversion.
struct ConversionConfig {
  // A single entry applies to every beam; otherwise delta[b - 1] is the
  // threshold of beam b.
  std::vector<double> delta{0.08};
  // Scale the threshold by sqrt(range / reference_range), where range is the
  // distance from sensor_origin to the earlier point of each edge.
  bool range_scaling = false;
  Vec3 sensor_origin{};
  double reference_range = 1.0;

  double base_delta(std::uint32_t beam) const;
  double effective_delta(std::uint32_t beam, const Vec3& earlier) const;
};

// Throws InvalidInput if a threshold is non-positive or missing for a beam in
// [1, beam_count].
void check_conversion_config(const ConversionConfig& cfg,
                             std::uint32_t beam_count);

namespace presets {
// Road-scale spinning LiDAR (nuScenes, KITTI), range scaled.
ConversionConfig driving();
// Object-scale synthetic scans.
ConversionConfig object();
// Five-sensor rig. The physical order of the sensors is not known; entry i is
// simply applied to beam i + 1.
ConversionConfig multi_sensor_rig();
}  // namespace presets

// Groups points by beam, orders each beam by timestamp (ties keep input
// order) and splits wherever an edge is longer than the effective threshold.
// Curves are emitted in ascending (beam, first timestamp) order.
CurveCloud build_curve_cloud(const PointCloud& pc, const ConversionConfig& cfg);

// Arc length from the first point of each curve.
struct GeodesicTable {
  std::vector<double> cumlen;
};

GeodesicTable geodesic_lengths(const CurveCloud& cc);

struct Violation {
  enum class Kind {
    kOffsetTable,     // offsets missing, not starting at 0 or not ending at N
    kNonMonotonic,    // offsets[index] <= offsets[index - 1]
    kBeamTable,       // source_beam length or value out of range
    kNonFinite,       // non-finite coordinate at point `index`
    kEdgeTooLong,     // edge (index, index + 1) of `curve` exceeds delta_eff
  };
  Kind kind;
  std::size_t curve = 0;
  std::size_t index = 0;
  std::string message;
};

// Lists every violated invariant; empty iff the cloud is valid for `cfg`.
std::vector<Violation> validate(const CurveCloud& cc,
                                const ConversionConfig& cfg);

}  // namespace curvecloud

#endif  // CURVECLOUD_CURVE_CLOUD_HPP_
