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

#include "curvecloud/synthetic.hpp"

#include <cmath>

#include "curvecloud/scan_sim.hpp"

namespace curvecloud::synthetic {
namespace {

Vec3 wavy_point(std::size_t curve, std::size_t i, double spacing) {
  const double s = static_cast<double>(i) * spacing;
  const double phase = 0.7 * static_cast<double>(curve);
  return Vec3{s, 0.5 * static_cast<double>(curve) + 0.05 * std::sin(3.0 * s + phase),
              0.05 * std::cos(2.0 * s + phase)};
}

}  // namespace

CurveCloud wavy_curves(std::size_t n, std::size_t points_per_curve,
                       double spacing) {
  if (points_per_curve == 0) throw InvalidInput("points_per_curve must be positive");
  CurveCloud cc;
  cc.positions.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t curve = i / points_per_curve;
    cc.positions.push_back(wavy_point(curve, i % points_per_curve, spacing));
    if ((i + 1) % points_per_curve == 0 || i + 1 == n) {
      cc.offsets.push_back(static_cast<Index>(i + 1));
      cc.source_beam.push_back(static_cast<std::uint32_t>(curve + 1));
    }
  }
  return cc;
}

PointCloud wavy_scan(std::size_t n, std::uint32_t beams,
                     std::size_t points_per_curve, double spacing) {
  if (points_per_curve == 0) throw InvalidInput("points_per_curve must be positive");
  if (beams == 0) throw InvalidInput("beams must be positive");
  PointCloud pc;
  pc.beam_count = beams;
  pc.positions.reserve(n);
  pc.timestamps.reserve(n);
  pc.beam_ids.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t curve = i / points_per_curve;
    pc.push_back(wavy_point(curve, i % points_per_curve, spacing),
                 static_cast<double>(i),
                 static_cast<std::uint32_t>(curve % beams) + 1);
  }
  return pc;
}

PointCloud benchmark_scan(std::size_t n, std::uint32_t beams,
                          std::uint64_t seed) {
  ScanConfig cfg;
  cfg.pattern = Pattern::kParallel;
  cfg.beams = beams;
  cfg.budget = n;
  cfg.seed = seed;
  cfg.max_traversals = n / 64 + 64;
  return simulate(benchmark_scene(), cfg);
}

}  // namespace curvecloud::synthetic
