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


#include <benchmark/benchmark.h>

#include <vector>

#include "curvecloud/backbone.hpp"
#include "curvecloud/curve_cloud.hpp"
#include "curvecloud/curve_ops.hpp"
#include "curvecloud/point_ops.hpp"
#include "curvecloud/synthetic.hpp"

namespace curvecloud {
namespace {

constexpr double kSparseEpsilon = 10.0;
constexpr double kGroupRadius = 0.08;
constexpr std::size_t kGroupCap = 16;

struct Curves {
  CurveCloud cc;
  GeodesicTable g;
  Selection sparse;
};

Curves make_curves(std::size_t n) {
  Curves c;
  c.cc = synthetic::wavy_curves(n);
  c.g = geodesic_lengths(c.cc);
  c.sparse = fps_1d(c.cc, c.g, SamplingConfig{kSparseEpsilon});
  return c;
}

void BM_Fps1d(benchmark::State& state) {
  const Curves c = make_curves(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(fps_1d(c.cc, c.g, SamplingConfig{kSparseEpsilon}));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Fps1d)->RangeMultiplier(10)->Range(10000, 1000000)
    ->Unit(benchmark::kMillisecond)->Complexity(benchmark::oN);

void BM_FpsEuclidean(benchmark::State& state) {
  const Curves c = make_curves(state.range(0));
  const std::size_t count = c.sparse.indices.size();
  for (auto _ : state) {
    benchmark::DoNotOptimize(fps_euclidean(c.cc.positions, count));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_FpsEuclidean)->RangeMultiplier(10)->Range(10000, 100000)
    ->Unit(benchmark::kMillisecond);

void BM_Geodesics(benchmark::State& state) {
  const CurveCloud cc = synthetic::wavy_curves(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(geodesic_lengths(cc));
}
BENCHMARK(BM_Geodesics)->Arg(1000000)->Unit(benchmark::kMillisecond);

void BM_Convert(benchmark::State& state) {
  const PointCloud pc = synthetic::benchmark_scan(state.range(0));
  const ConversionConfig cfg = presets::driving();
  for (auto _ : state) benchmark::DoNotOptimize(build_curve_cloud(pc, cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Convert)->RangeMultiplier(10)->Range(10000, 1000000)
    ->Unit(benchmark::kMillisecond);

void BM_GroupCurve(benchmark::State& state) {
  const Curves c = make_curves(state.range(0));
  const GroupingConfig cfg{kGroupRadius, kGroupCap};
  for (auto _ : state) {
    benchmark::DoNotOptimize(group_curve(c.cc, c.g, c.sparse.indices, cfg));
  }
}
BENCHMARK(BM_GroupCurve)->RangeMultiplier(10)->Range(10000, 1000000)
    ->Unit(benchmark::kMillisecond);

void BM_Ball3d(benchmark::State& state) {
  const Curves c = make_curves(state.range(0));
  std::vector<Vec3> centers;
  for (Index i : c.sparse.indices) centers.push_back(c.cc.positions[i]);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        group_ball3d(c.cc.positions, centers, kGroupRadius, kGroupCap));
  }
}
BENCHMARK(BM_Ball3d)->RangeMultiplier(10)->Range(10000, 1000000)
    ->Unit(benchmark::kMillisecond);

void BM_Forward(benchmark::State& state) {
  const CurveCloud cc = build_curve_cloud(
      synthetic::benchmark_scan(state.range(0)), presets::driving());
  const GeodesicTable g = geodesic_lengths(cc);
  const FeatureMap feats = default_input_features(cc);
  const BackboneConfig cfg = toy_profile();
  const BackboneParams params = init_backbone_params(cfg, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(forward(cc, g, feats, cfg, params));
  }
}
BENCHMARK(BM_Forward)->Arg(2048)->Arg(16384)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace curvecloud

BENCHMARK_MAIN();
