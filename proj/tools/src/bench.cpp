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

#include "bench.hpp"

#include <algorithm>
#include <chrono>
#include <functional>

#include "curvecloud/backbone.hpp"
#include "curvecloud/curve_cloud.hpp"
#include "curvecloud/curve_ops.hpp"
#include "curvecloud/point_ops.hpp"
#include "curvecloud/synthetic.hpp"

namespace curvecloud::cli {
namespace {

// Sampling spacing on the synthetic curves; about 0.1% of the points.
constexpr double kSparseEpsilon = 10.0;
constexpr double kGroupRadius = 0.08;
constexpr std::size_t kGroupCap = 16;

BenchPoint time_it(std::size_t size, std::size_t repeat,
                   const std::function<std::size_t()>& fn) {
  BenchPoint p;
  p.size = size;
  for (std::size_t r = 0; r < repeat; ++r) {
    const auto start = std::chrono::steady_clock::now();
    p.output_size = fn();
    const std::chrono::duration<double> dt =
        std::chrono::steady_clock::now() - start;
    p.samples.push_back(dt.count());
  }
  std::vector<double> sorted = p.samples;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t m = sorted.size() / 2;
  p.median_seconds =
      sorted.size() % 2 ? sorted[m] : 0.5 * (sorted[m - 1] + sorted[m]);
  return p;
}

}  // namespace

std::vector<BenchPoint> run_bench(const std::string& op,
                                  const std::vector<std::size_t>& sizes,
                                  std::size_t repeat) {
  std::vector<BenchPoint> out;
  for (std::size_t n : sizes) {
    if (op == "convert") {
      const PointCloud pc = synthetic::benchmark_scan(n);
      const ConversionConfig cfg = presets::driving();
      out.push_back(time_it(n, repeat, [&] {
        return build_curve_cloud(pc, cfg).num_curves();
      }));
      continue;
    }
    if (op == "forward") {
      const CurveCloud cc =
          build_curve_cloud(synthetic::benchmark_scan(n), presets::driving());
      const GeodesicTable g = geodesic_lengths(cc);
      const FeatureMap feats = default_input_features(cc);
      const BackboneConfig cfg = toy_profile();
      const BackboneParams params = init_backbone_params(cfg, 0);
      out.push_back(time_it(n, repeat, [&] {
        return forward(cc, g, feats, cfg, params).labels.size();
      }));
      continue;
    }

    const CurveCloud cc = synthetic::wavy_curves(n);
    const GeodesicTable g = geodesic_lengths(cc);
    const Selection sparse = fps_1d(cc, g, SamplingConfig{kSparseEpsilon});
    if (op == "fps1d") {
      out.push_back(time_it(n, repeat, [&] {
        return fps_1d(cc, g, SamplingConfig{kSparseEpsilon}).indices.size();
      }));
    } else if (op == "fpseuclid") {
      const std::size_t count = sparse.indices.size();
      out.push_back(time_it(n, repeat, [&] {
        return fps_euclidean(cc.positions, count).size();
      }));
    } else if (op == "groupcurve") {
      const GroupingConfig cfg{kGroupRadius, kGroupCap};
      out.push_back(time_it(n, repeat, [&] {
        return group_curve(cc, g, sparse.indices, cfg).members.size();
      }));
    } else if (op == "ball3d") {
      std::vector<Vec3> centers;
      for (Index i : sparse.indices) centers.push_back(cc.positions[i]);
      out.push_back(time_it(n, repeat, [&] {
        return group_ball3d(cc.positions, centers, kGroupRadius, kGroupCap)
            .members.size();
      }));
    } else {
      throw ConfigError("unknown bench op '" + op + "'");
    }
  }
  return out;
}

}  // namespace curvecloud::cli
