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

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "curvecloud/layers.hpp"
#include "curvecloud/threading.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

namespace curvecloud {
namespace {

using testing::Rng;

constexpr double kTol = 1e-5;

DenseLayer identity_layer(std::size_t d) {
  DenseLayer l;
  l.weight = FeatureMap(d, d);
  for (std::size_t i = 0; i < d; ++i) l.weight(i, i) = 1.0;
  l.bias.assign(d, 0.0);
  l.activation = Activation::kIdentity;
  return l;
}

MlpParams identity_mlp(std::size_t d) { return MlpParams{{identity_layer(d)}}; }

// Projects (3 + d) inputs onto the trailing d.
MlpParams drop_positions(std::size_t d) {
  DenseLayer l;
  l.weight = FeatureMap(d, 3 + d);
  for (std::size_t i = 0; i < d; ++i) l.weight(i, 3 + i) = 1.0;
  l.bias.assign(d, 0.0);
  l.activation = Activation::kIdentity;
  return MlpParams{{l}};
}

AttentivePoolParams zero_scores(std::size_t d) {
  AttentivePoolParams p{identity_layer(d)};
  for (double& w : p.score.weight.values()) w = 0.0;
  return p;
}

std::vector<double> row(const FeatureMap& f, std::size_t r) {
  return std::vector<double>(f.row(r).begin(), f.row(r).end());
}

template <typename T>
T init(LayerShape shape, std::uint64_t seed) {
  return std::get<T>(init_params(shape, seed));
}

CurveCloud singletons(Rng& rng, std::size_t n) {
  CurveCloud cc;
  for (const Vec3& p : testing::random_points(rng, n)) {
    cc.positions.push_back(p);
    cc.offsets.push_back(static_cast<Index>(cc.positions.size()));
    cc.source_beam.push_back(1);
  }
  return cc;
}

TEST(AttentivePool, SingleNeighborPassesThrough) {
  Rng rng(1);
  const FeatureMap one = testing::random_features(rng, 1, 5);
  ParamRng prng(3);
  EXPECT_EQ(attentive_pool(one, init_attentive_pool(5, prng)), row(one, 0));
}

TEST(AttentivePool, ZeroScoresGiveTheMean) {
  Rng rng(2);
  const FeatureMap f = testing::random_features(rng, 7, 4);
  const auto pooled = attentive_pool(f, zero_scores(4));
  for (std::size_t c = 0; c < 4; ++c) {
    double mean = 0.0;
    for (std::size_t r = 0; r < 7; ++r) mean += f(r, c);
    EXPECT_NEAR(pooled[c], mean / 7.0, 1e-15);
  }
}

TEST(AttentivePool, MatchesDirectFormula) {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t d = testing::uniform_index(rng, 1, 16);
    const FeatureMap f = testing::random_features(rng, testing::uniform_index(rng, 1, 20), d, 3.0);
    ParamRng prng(trial);
    const auto pool = init_attentive_pool(d, prng);
    std::vector<std::vector<double>> rows;
    for (std::size_t r = 0; r < f.rows(); ++r) rows.push_back(row(f, r));
    EXPECT_LT(testing::relative_error(attentive_pool(f, pool),
                                      reference::attentive_pool(rows, pool)),
              kTol);
  }
}

TEST(AttentivePool, EmptyNeighborhoodThrows) {
  EXPECT_THROW(attentive_pool(FeatureMap(0, 3), zero_scores(3)), InvalidInput);
}

TEST(ApplyMlp, MatchesReferenceWithNorms) {
  Rng rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t in = testing::uniform_index(rng, 1, 12);
    const std::vector<std::size_t> widths{testing::uniform_index(rng, 1, 16),
                                          testing::uniform_index(rng, 1, 16)};
    ParamRng prng(trial);
    MlpParams mlp = init_mlp(in, widths, prng);
    testing::randomize_norms(rng, mlp);
    const FeatureMap x = testing::random_features(rng, 10, in);
    const FeatureMap y = apply_mlp(mlp, x);
    for (std::size_t r = 0; r < x.rows(); ++r) {
      ASSERT_LT(testing::relative_error(row(y, r), reference::mlp(mlp, row(x, r))), kTol);
    }
  }
}

TEST(ApplyMlp, RejectsChannelMismatch) {
  EXPECT_THROW(apply_mlp(identity_mlp(3), FeatureMap(2, 4)), InvalidInput);
  MlpParams broken = identity_mlp(3);
  broken.layers.push_back(identity_layer(4));
  EXPECT_THROW(apply_mlp(broken, FeatureMap(2, 3)), ConfigError);
}

TEST(CurveSa, SinglePointCurvesPoolThemselves) {
  Rng rng(5);
  const CurveCloud cc = singletons(rng, 6);
  const FeatureMap f = testing::random_features(rng, 6, 3);
  CurveSaParams p = init<CurveSaParams>(
      LayerShape{.kind = LayerKind::kCurveSa, .in_channels = 3, .widths = {8},
                 .epsilon = 0.1, .radius = 0.2},
      9);
  const CurveSaResult res = curve_sa(cc, geodesic_lengths(cc), f, p);
  EXPECT_EQ(res.selection.indices, (std::vector<Index>{0, 1, 2, 3, 4, 5}));
  EXPECT_EQ(res.cloud, cc);
  for (std::size_t i = 0; i < 6; ++i) {
    std::vector<double> in{0.0, 0.0, 0.0};
    for (double v : f.row(i)) in.push_back(v);
    EXPECT_LT(testing::relative_error(row(res.features, i), reference::mlp(p.mlp, in)),
              1e-12);
  }
}

TEST(CurveSa, IdentityMlpAndUniformScoresAverage) {
  const CurveCloud cc = testing::straight_curve(11, 0.1);
  Rng rng(6);
  const FeatureMap f = testing::random_features(rng, 11, 2);
  CurveSaParams p;
  p.epsilon = 0.25;
  p.radius = 0.25;
  p.mlp = drop_positions(2);
  p.pool = zero_scores(2);
  const CurveSaResult res = curve_sa(cc, geodesic_lengths(cc), f, p);
  ASSERT_EQ(res.selection.indices, (std::vector<Index>{0, 3, 5, 8, 10}));
  // Centroid 5 pools points 3..7.
  for (std::size_t c = 0; c < 2; ++c) {
    double mean = 0.0;
    for (std::size_t r = 3; r <= 7; ++r) mean += f(r, c);
    EXPECT_NEAR(res.features(2, c), mean / 5.0, 1e-14);
  }
}

TEST(CurveSa, MatchesReference) {
  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const CurveCloud cc = testing::random_curves(rng, 6, 40, 0.01, 0.1);
    const std::size_t d = testing::uniform_index(rng, 1, 6);
    const FeatureMap f = testing::random_features(rng, cc.num_points(), d);
    LayerShape shape{.kind = LayerKind::kCurveSa, .in_channels = d, .widths = {8, 12},
                     .epsilon = testing::uniform(rng, 0.05, 0.4),
                     .radius = testing::uniform(rng, 0.05, 0.6)};
    if (trial % 2 == 0) shape.max_neighbors = testing::uniform_index(rng, 1, 10);
    CurveSaParams p = init<CurveSaParams>(shape, trial);
    testing::randomize_norms(rng, p.mlp);
    const CurveSaResult got = curve_sa(cc, geodesic_lengths(cc), f, p);
    const reference::SaOutput want = reference::curve_sa(cc, f, p);
    ASSERT_EQ(got.selection.indices, want.centers);
    EXPECT_LT(testing::relative_error(got.features, want.features), kTol);
    EXPECT_EQ(got.cloud, restrict_to(cc, want.centers));
  }
}

TEST(CurveSa, WholeCurveCentroidIsReversalInvariant) {
  // A closed loop reversed about its first point keeps its centroid in place.
  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    CurveCloud cc;
    const std::size_t n = testing::uniform_index(rng, 3, 30);
    const double rad = testing::uniform(rng, 0.1, 0.5);
    for (std::size_t i = 0; i < n; ++i) {
      const double a = 2.0 * M_PI * static_cast<double>(i) / static_cast<double>(n);
      cc.positions.push_back(Vec3{rad * std::cos(a), rad * std::sin(a), 0.0});
    }
    cc.positions.push_back(cc.positions.front());
    cc.offsets = {0, static_cast<Index>(n + 1)};
    cc.source_beam = {1};
    const FeatureMap f = testing::random_features(rng, n + 1, 2);
    FeatureMap f_closed = f;
    for (std::size_t c = 0; c < 2; ++c) f_closed(n, c) = f(0, c);
    CurveSaParams p = init<CurveSaParams>(
        LayerShape{.kind = LayerKind::kCurveSa, .in_channels = 2, .widths = {6},
                   .epsilon = 100.0, .radius = 100.0},
        trial);
    const auto rows = testing::reversed_rows(cc);
    const CurveCloud rev = testing::reverse_curves(cc);
    const auto a = curve_sa(cc, geodesic_lengths(cc), f_closed, p);
    const auto b = curve_sa(rev, geodesic_lengths(rev), testing::take_rows(f_closed, rows), p);
    ASSERT_EQ(a.features.rows(), 1u);
    EXPECT_LT(testing::relative_error(a.features, b.features), 1e-12);
  }
}

TEST(CurveFp, CopiesWhenEverythingIsSelected) {
  Rng rng(9);
  const CurveCloud cc = testing::random_curves(rng, 4, 20, 0.01, 0.1);
  const GeodesicTable g = geodesic_lengths(cc);
  const Selection all = fps_1d(cc, g, SamplingConfig{1e-9});
  ASSERT_EQ(all.size(), cc.num_points());
  const FeatureMap lo = testing::random_features(rng, cc.num_points(), 3);
  const FeatureMap skip(cc.num_points(), 2, 0.0);
  DenseLayer l = identity_layer(3);
  l.weight = FeatureMap(3, 5);
  for (std::size_t i = 0; i < 3; ++i) l.weight(i, i) = 1.0;
  const FeatureMap out = curve_fp(cc, g, all, lo, skip, CurveFpParams{MlpParams{{l}}});
  EXPECT_EQ(out, lo);
}

TEST(CurveFp, MatchesReferenceAndChecksSkip) {
  Rng rng(10);
  for (int trial = 0; trial < 100; ++trial) {
    const CurveCloud cc = testing::random_curves(rng, 6, 40, 0.01, 0.1);
    const GeodesicTable g = geodesic_lengths(cc);
    const Selection sel = fps_1d(cc, g, SamplingConfig{testing::uniform(rng, 0.05, 0.5)});
    const FeatureMap lo = testing::random_features(rng, sel.size(), 4);
    const FeatureMap skip = testing::random_features(rng, cc.num_points(), 3);
    CurveFpParams p = init<CurveFpParams>(
        LayerShape{.kind = LayerKind::kCurveFp, .in_channels = 4, .skip_channels = 3,
                   .widths = {8, 5}},
        trial);
    testing::randomize_norms(rng, p.mlp);
    EXPECT_LT(testing::relative_error(curve_fp(cc, g, sel, lo, skip, p),
                                      reference::curve_fp(cc, sel, lo, skip, p.mlp)),
              kTol);
    if (trial == 0) {
      EXPECT_THROW(curve_fp(cc, g, sel, lo, FeatureMap(cc.num_points() + 1, 3), p),
                   InvalidInput);
    }
  }
}

TEST(CurveConvBlock, MatchesReferenceAndIsReversalEquivariant) {
  Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const CurveCloud cc = testing::random_curves(rng, 5, 30, 0.01, 0.1);
    const std::size_t d = testing::uniform_index(rng, 1, 5);
    const FeatureMap f = testing::random_features(rng, cc.num_points(), d);
    CurveConvBlockParams p = init<CurveConvBlockParams>(
        LayerShape{.kind = LayerKind::kCurveConvBlock, .in_channels = d,
                   .widths = {testing::uniform_index(rng, 1, 8)},
                   .kernel_size = 2 * testing::uniform_index(rng, 0, 3) + 1},
        trial);
    testing::randomize_norms(rng, p);
    const FeatureMap got = curve_conv_block(cc, f, p);
    EXPECT_LT(testing::relative_error(got, reference::conv_block(cc, f, p)), kTol);
    const auto rows = testing::reversed_rows(cc);
    EXPECT_EQ(testing::take_rows(got, rows),
              curve_conv_block(testing::reverse_curves(cc), testing::take_rows(f, rows), p));
  }
}

TEST(CurveConvBlock, RejectsChannelMismatch) {
  CurveConvBlockParams p = init<CurveConvBlockParams>(
      LayerShape{.kind = LayerKind::kCurveConvBlock, .in_channels = 3, .widths = {4}}, 1);
  const CurveCloud cc = testing::straight_curve(5, 0.1);
  EXPECT_THROW(curve_conv_block(cc, FeatureMap(5, 2), p), Error);
}

TEST(PointSa, NormalizedOffsetsAndSelfNeighborhoods) {
  Rng rng(12);
  const auto pts = testing::random_points(rng, 20);
  const FeatureMap f = testing::random_features(rng, 20, 3);
  PointSaParams p = init<PointSaParams>(
      LayerShape{.kind = LayerKind::kPointSa, .in_channels = 3, .widths = {8},
                 .radius = 1e-6},
      4);
  p.count = 20;
  const PointSaResult res = point_sa(pts, f, p);
  ASSERT_EQ(res.indices.size(), 20u);
  for (std::size_t q = 0; q < 20; ++q) {
    std::vector<double> in{0.0, 0.0, 0.0};
    for (double v : f.row(res.indices[q])) in.push_back(v);
    EXPECT_LT(testing::relative_error(row(res.features, q), reference::mlp(p.mlp, in)),
              1e-12);
    EXPECT_EQ(res.points[q], pts[res.indices[q]]);
  }
  p.count = 21;
  EXPECT_THROW(point_sa(pts, f, p), InvalidInput);
}

TEST(PointSa, MatchesReference) {
  Rng rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const auto pts = testing::random_points(rng, testing::uniform_index(rng, 1, 200));
    const std::size_t d = testing::uniform_index(rng, 1, 6);
    const FeatureMap f = testing::random_features(rng, pts.size(), d);
    LayerShape shape{.kind = LayerKind::kPointSa, .in_channels = d, .widths = {8, 8},
                     .radius = testing::uniform(rng, 0.1, 1.0),
                     .sample_ratio = testing::uniform(rng, 0.05, 1.0)};
    if (trial % 2 == 0) shape.max_neighbors = testing::uniform_index(rng, 1, 16);
    PointSaParams p = init<PointSaParams>(shape, trial);
    testing::randomize_norms(rng, p.mlp);
    const PointSaResult got = point_sa(pts, f, p);
    const reference::SaOutput want = reference::point_sa(pts, f, p);
    ASSERT_EQ(got.indices, want.centers);
    EXPECT_LT(testing::relative_error(got.features, want.features), kTol);
  }
}

TEST(GraphConv, SingleEdgeAndConstantFeatures) {
  Rng rng(14);
  const auto pts = testing::random_points(rng, 12);
  GraphConvParams p = init<GraphConvParams>(
      LayerShape{.kind = LayerKind::kGraphConv, .in_channels = 3, .widths = {5}, .k = 1}, 2);
  const FeatureMap f = testing::random_features(rng, 12, 3);
  const FeatureMap out = graph_conv(pts, f, p);
  for (std::size_t i = 0; i < 12; ++i) {
    const auto nn = reference::knn(pts, pts[i], 1, static_cast<Index>(i));
    std::vector<double> edge = row(f, i);
    for (std::size_t c = 0; c < 3; ++c) edge.push_back(f(nn[0], c) - f(i, c));
    EXPECT_LT(testing::relative_error(row(out, i), reference::mlp(p.mlp, edge)), 1e-12);
  }

  p.k = 4;
  p.pool = zero_scores(5);
  const FeatureMap same = graph_conv(pts, FeatureMap(12, 3, 0.7), p);
  for (std::size_t i = 1; i < 12; ++i) {
    for (std::size_t c = 0; c < 5; ++c) EXPECT_NEAR(same(i, c), same(0, c), 1e-15);
  }
  p.k = 12;
  EXPECT_THROW(graph_conv(pts, f, p), InvalidInput);
}

TEST(GraphConv, MatchesReference) {
  Rng rng(15);
  for (int trial = 0; trial < 100; ++trial) {
    const auto pts = testing::random_points(rng, testing::uniform_index(rng, 2, 120));
    const std::size_t d = testing::uniform_index(rng, 1, 6);
    const FeatureMap f = testing::random_features(rng, pts.size(), d);
    GraphConvParams p = init<GraphConvParams>(
        LayerShape{.kind = LayerKind::kGraphConv, .in_channels = d, .widths = {8, 6},
                   .k = testing::uniform_index(rng, 1, std::min<std::size_t>(pts.size() - 1, 16))},
        trial);
    testing::randomize_norms(rng, p.mlp);
    EXPECT_LT(testing::relative_error(graph_conv(pts, f, p), reference::graph_conv(pts, f, p)),
              kTol);
  }
}

TEST(PointFp, CoincidentPointsCopyAndKOneIsNearest) {
  Rng rng(16);
  const auto lo = testing::random_points(rng, 10);
  const FeatureMap f = testing::random_features(rng, 10, 3);
  const FeatureMap up = interpolate_knn(lo, lo, f, 3);
  EXPECT_EQ(up, f);
  const auto hi = testing::random_points(rng, 30);
  const FeatureMap nn = interpolate_knn(hi, lo, f, 1);
  for (std::size_t h = 0; h < 30; ++h) {
    EXPECT_EQ(row(nn, h), row(f, reference::knn(lo, hi[h], 1)[0]));
  }
  EXPECT_THROW(interpolate_knn(hi, std::span<const Vec3>{}, FeatureMap(0, 3), 3),
               InvalidInput);
}

TEST(PointFp, MatchesReference) {
  Rng rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const auto hi = testing::random_points(rng, testing::uniform_index(rng, 1, 200));
    const auto lo = testing::random_points(rng, testing::uniform_index(rng, 1, 50));
    const FeatureMap f = testing::random_features(rng, lo.size(), 4);
    const FeatureMap skip = testing::random_features(rng, hi.size(), 2);
    const std::size_t k = testing::uniform_index(rng, 1, 5);
    PointFpParams p = init<PointFpParams>(
        LayerShape{.kind = LayerKind::kPointFp, .in_channels = 4, .skip_channels = 2,
                   .widths = {8}, .k = k},
        trial);
    testing::randomize_norms(rng, p.mlp);
    EXPECT_LT(testing::relative_error(point_fp(hi, lo, f, skip, p),
                                      reference::point_fp(hi, lo, f, skip, p.mlp, k)),
              kTol);
  }
}

TEST(InitParams, DeterministicSeededAndBounded) {
  const LayerShape shape{.kind = LayerKind::kCurveSa, .in_channels = 5, .widths = {16, 32}};
  const auto a = init<CurveSaParams>(shape, 42);
  const auto b = init<CurveSaParams>(shape, 42);
  const auto c = init<CurveSaParams>(shape, 43);
  EXPECT_EQ(a.mlp.layers[0].weight, b.mlp.layers[0].weight);
  EXPECT_EQ(a.pool.score.weight, b.pool.score.weight);
  EXPECT_NE(a.mlp.layers[0].weight, c.mlp.layers[0].weight);
  for (const auto& l : a.mlp.layers) {
    const double bound = std::sqrt(1.0 / static_cast<double>(l.in_channels()));
    for (double w : l.weight.values()) EXPECT_LE(std::abs(w), bound);
    for (double w : l.bias) EXPECT_LE(std::abs(w), bound);
  }
  EXPECT_EQ(a.mlp.layers[0].in_channels(), 8u);
  EXPECT_THROW(init_params(LayerShape{.widths = {}}, 1), ConfigError);
  EXPECT_THROW(init_params(LayerShape{.kind = LayerKind::kCurveConvBlock, .widths = {4},
                                      .kernel_size = 4},
                           1),
               ConfigError);
}

TEST(Layers, OutputsAreFiniteAndThreadInvariant) {
  Rng rng(18);
  const CurveCloud cc = testing::random_curves(rng, 40, 60, 0.01, 0.05);
  const FeatureMap f = testing::random_features(rng, cc.num_points(), 3, 10.0);
  const GeodesicTable g = geodesic_lengths(cc);
  const auto sa = init<CurveSaParams>(
      LayerShape{.kind = LayerKind::kCurveSa, .in_channels = 3, .widths = {16},
                 .epsilon = 0.05, .radius = 0.1, .max_neighbors = 8},
      1);
  const auto conv = init<CurveConvBlockParams>(
      LayerShape{.kind = LayerKind::kCurveConvBlock, .in_channels = 16, .widths = {16}}, 2);
  const auto graph = init<GraphConvParams>(
      LayerShape{.kind = LayerKind::kGraphConv, .in_channels = 3, .widths = {8}, .k = 6}, 3);
  auto run = [&] {
    const auto s = curve_sa(cc, g, f, sa);
    return std::make_tuple(s.features, curve_conv_block(s.cloud, s.features, conv),
                           graph_conv(cc.positions, f, graph));
  };
  set_thread_count(1);
  const auto a = run();
  set_thread_count(4);
  const auto b = run();
  set_thread_count(0);
  EXPECT_TRUE(a == b);
  EXPECT_TRUE(all_finite(std::get<0>(a)) && all_finite(std::get<1>(a)) &&
              all_finite(std::get<2>(a)));
}

}  // namespace
}  // namespace curvecloud
