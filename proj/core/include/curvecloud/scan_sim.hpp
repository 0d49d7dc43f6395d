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

#ifndef CURVECLOUD_SCAN_SIM_HPP_
#define CURVECLOUD_SCAN_SIM_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "curvecloud/common.hpp"
#include "curvecloud/curve_cloud.hpp"
#include "curvecloud/point_cloud.hpp"

namespace curvecloud {

struct Sphere {
  Vec3 center;
  double radius = 1.0;
};

// Axis-aligned.
struct Box {
  Vec3 min;
  Vec3 max;
};

// All x with dot(normal, x) == offset. Both sides are visible.
struct Plane {
  Vec3 normal{0.0, 0.0, 1.0};
  double offset = 0.0;
};

using Primitive = std::variant<Sphere, Box, Plane>;

// Unit quaternion (w, x, y, z) rotating sensor-frame vectors into the world.
struct Quaternion {
  double w = 1.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

Vec3 rotate(const Quaternion& q, const Vec3& v);

// The sensor looks along its local +z axis; image columns run along local +x
// and rows along local +y.
struct SensorPose {
  Vec3 origin;
  Quaternion orientation;
  double fov_deg = 60.0;  // horizontal and vertical
};

struct Scene {
  std::vector<Primitive> primitives;
  SensorPose sensor;
};

// Throws InvalidInput for an empty scene, degenerate primitives, a
// non-normalized orientation or a field of view outside (0, 180).
void check_scene(const Scene& scene);

// JSON form:
//   {"sensor": {"origin": [x, y, z], "orientation": [w, x, y, z],
//               "fov_deg": 60},
//    "primitives": [{"type": "sphere", "center": [..], "radius": r},
//                   {"type": "box", "min": [..], "max": [..]},
//                   {"type": "plane", "normal": [..], "offset": d}]}
// Plane normals are normalized on load. Throws FormatError or InvalidInput.
Scene parse_scene(std::string_view json_text);
std::string scene_to_json(const Scene& scene);

// Plane z = 5 filling the view of a sensor at the origin.
Scene default_plane_scene();
// Room-sized scene: floor, back wall, a few boxes and spheres. Every ray
// hits something.
Scene benchmark_scene();

struct Hit {
  double t = 0.0;  // distance along the unit ray direction
  std::size_t primitive = 0;
};

// Nearest hit with t > 0 over all primitives, ties to the lower index.
std::optional<Hit> cast_ray(const Scene& scene, const Vec3& origin,
                            const Vec3& direction);

// Unsigned distance from p to the surface of the primitive.
double surface_distance(const Primitive& primitive, const Vec3& p);

enum class Pattern { kParallel, kGrid, kRandom, kLissajous };

Pattern parse_pattern(std::string_view name);
const char* pattern_name(Pattern p);

struct ScanConfig {
  Pattern pattern = Pattern::kParallel;
  std::uint32_t beams = 1;
  std::size_t budget = 2048;
  std::size_t resolution = 2048;  // virtual image is resolution x resolution
  std::size_t stride = 4;         // pixels between samples along a traversal
  std::uint64_t seed = 0;
  double lissajous_a = 3.0;
  double lissajous_b = 2.0;
  // Traversals tried before giving up on reaching the budget.
  std::size_t max_traversals = 8192;
};

void check_scan_config(const ScanConfig& cfg);

// Raised when no traversal hits anything.
class EmptyScan : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

struct SimulationResult {
  PointCloud cloud;
  std::vector<std::uint32_t> traversal;  // per point
  std::vector<std::uint32_t> primitive;  // per point
  std::size_t traversals = 0;            // traversals consumed
};

// Traversal k uses beam (k mod beams) + 1. Point s of traversal k gets
// timestamp k * T + s microseconds, where T bounds the samples per traversal,
// so time ranges of different traversals are disjoint and ascending. Stops
// once `budget` points are collected (the last traversal is truncated) or
// after max_traversals; throws EmptyScan if nothing was hit.
SimulationResult simulate_detailed(const Scene& scene, const ScanConfig& cfg);
PointCloud simulate(const Scene& scene, const ScanConfig& cfg);

struct PatternStats {
  std::size_t points = 0;
  std::size_t curves = 0;
  double mean_curve_points = 0.0;
  double mean_curve_length = 0.0;  // arc length
  std::vector<std::size_t> per_beam_counts;  // entry b - 1 counts beam b
};

PatternStats pattern_stats(const PointCloud& pc, const ConversionConfig& cfg);

}  // namespace curvecloud

#endif  // CURVECLOUD_SCAN_SIM_HPP_
