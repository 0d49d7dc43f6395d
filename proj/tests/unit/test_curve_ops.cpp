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

#include <algorithm>
#include <cmath>
#include <numeric>

#include "curvecloud/curve_cloud.hpp"
#include "curvecloud/curve_ops.hpp"
#include "curvecloud/instrumentation.hpp"
#include "curvecloud/point_ops.hpp"
#include "curvecloud/threading.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

namespace curvecloud {
namespace {

using testing::Rng;

std::vector<Index> flat(const Neighborhoods& n, std::size_t i) {
  const auto s = n.of(i);
  return std::vector<Index>(s.begin(), s.end());
}

Selection select_all_of(const CurveCloud& cc, std::vector<Index> picks) {
  Selection sel;
  sel.indices = std::move(picks);
  sel.offsets.assign(cc.num_curves() + 1, 0);
  const auto ids = curve_ids(cc);
  for (Index p : sel.indices) ++sel.offsets[ids[p] + 1];
  std::partial_sum(sel.offsets.begin(), sel.offsets.end(), sel.offsets.begin());
  return sel;
}

CurveCloud three_points(double x0, double x1, double x2) {
  CurveCloud cc;
  cc.positions = {Vec3{x0, 0, 0}, Vec3{x1, 0, 0}, Vec3{x2, 0, 0}};
  cc.offsets = {0, 3};
  cc.source_beam = {1};
  return cc;
}

TEST(Fps1d, ElevenPointsWithQuarterSpacing) {
  const CurveCloud cc = testing::straight_curve(11, 0.1);
  const Selection sel = fps_1d(cc, geodesic_lengths(cc), SamplingConfig{0.25});
  EXPECT_EQ(sel.indices, (std::vector<Index>{0, 3, 5, 8, 10}));
  EXPECT_EQ(sel.offsets, (std::vector<Index>{0, 5}));
}

TEST(Fps1d, EveryCurveKeepsItsFirstPoint) {
  Rng rng(5);
  const CurveCloud cc = testing::random_curves(rng, 20, 50, 0.01, 0.1);
  const Selection sel = fps_1d(cc, geodesic_lengths(cc), SamplingConfig{1e6});
  ASSERT_EQ(sel.size(), cc.num_curves());
  for (std::size_t j = 0; j < cc.num_curves(); ++j) {
    EXPECT_EQ(sel.indices[j], cc.curve_begin(j));
  }
}

TEST(Fps1d, TinyEpsilonKeepsEverything) {
  const CurveCloud cc = testing::straight_curve(9, 0.1);
  const Selection sel = fps_1d(cc, geodesic_lengths(cc), SamplingConfig{1e-6});
  EXPECT_EQ(sel.size(), 9u);
}

TEST(Fps1d, MatchesReferenceAndSpacing) {
  Rng rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    const CurveCloud cc = testing::random_curves(rng, 8, 60, 0.005, 0.2);
    const double eps = testing::uniform(rng, 0.02, 0.8);
    const GeodesicTable g = geodesic_lengths(cc);
    const Selection sel = fps_1d(cc, g, SamplingConfig{eps});
    ASSERT_EQ(sel.indices, reference::fps_1d(cc, eps)) << "trial " << trial;
    for (std::size_t j = 0; j < cc.num_curves(); ++j) {
      const auto picks = sel.curve(j);
      ASSERT_FALSE(picks.empty());
      const double len = g.cumlen[cc.curve_end(j) - 1];
      EXPECT_LE(picks.size(), static_cast<std::size_t>(std::floor(len / eps)) + 1);
      for (std::size_t k = 1; k < picks.size(); ++k) {
        // Consecutive picks sit in distinct eps-intervals.
        EXPECT_GT(std::floor(g.cumlen[picks[k]] / eps),
                  std::floor(g.cumlen[picks[k - 1]] / eps));
      }
    }
  }
}

TEST(Fps1d, RejectsBadEpsilon) {
  const CurveCloud cc = testing::straight_curve(3, 0.1);
  EXPECT_THROW(fps_1d(cc, geodesic_lengths(cc), SamplingConfig{0.0}), InvalidInput);
  EXPECT_THROW(fps_1d(cc, geodesic_lengths(cc), SamplingConfig{std::nan("")}),
               InvalidInput);
}

TEST(GroupCurve, CentroidFiveRadiusQuarter) {
  const CurveCloud cc = testing::straight_curve(11, 0.1);
  const std::vector<Index> centroid{5};
  const Neighborhoods n =
      group_curve(cc, geodesic_lengths(cc), centroid, GroupingConfig{0.25, {}});
  EXPECT_EQ(flat(n, 0), (std::vector<Index>{3, 4, 5, 6, 7}));
}

TEST(GroupCurve, StaysOnTheCurveWhereBall3dCrossesOver) {
  // A U shape: two parallel legs 0.05 apart joined far away.
  CurveCloud cc;
  for (int i = 0; i < 20; ++i) cc.positions.push_back(Vec3{0.1 * i, 0, 0});
  for (int i = 19; i >= 0; --i) cc.positions.push_back(Vec3{0.1 * i, 0.05, 0});
  cc.offsets = {0, 40};
  cc.source_beam = {1};
  const std::vector<Index> centroid{2};
  const Neighborhoods geo =
      group_curve(cc, geodesic_lengths(cc), centroid, GroupingConfig{0.15, {}});
  EXPECT_EQ(flat(geo, 0), (std::vector<Index>{1, 2, 3}));
  const std::vector<Vec3> c{cc.positions[2]};
  const Neighborhoods euc = group_ball3d(cc.positions, c, 0.15);
  EXPECT_EQ(flat(euc, 0), (std::vector<Index>{1, 2, 3, 36, 37, 38}));
}

TEST(GroupCurve, CapKeepsClosestWithLowerIndexOnTies) {
  // Quarter steps keep the arc lengths exact so the tie is a real tie.
  const CurveCloud cc = testing::straight_curve(11, 0.25);
  const std::vector<Index> centroid{5};
  const Neighborhoods n =
      group_curve(cc, geodesic_lengths(cc), centroid, GroupingConfig{0.8, 4});
  EXPECT_EQ(flat(n, 0), (std::vector<Index>{3, 4, 5, 6}));
}

TEST(GroupCurve, MatchesBruteForceAndIsContiguous) {
  Rng rng(23);
  for (int trial = 0; trial < 300; ++trial) {
    const CurveCloud cc = testing::random_curves(rng, 6, 50, 0.01, 0.2);
    const GeodesicTable g = geodesic_lengths(cc);
    const double r = testing::uniform(rng, 0.01, 1.0);
    std::optional<std::size_t> cap;
    if (trial % 2 == 1) cap = testing::uniform_index(rng, 1, 12);
    std::vector<Index> centroids;
    for (std::size_t k = 0; k < 10; ++k) {
      centroids.push_back(
          static_cast<Index>(testing::uniform_index(rng, 0, cc.num_points() - 1)));
    }
    const Neighborhoods n = group_curve(cc, g, centroids, GroupingConfig{r, cap});
    ASSERT_EQ(n.size(), centroids.size());
    for (std::size_t q = 0; q < centroids.size(); ++q) {
      const auto got = flat(n, q);
      ASSERT_EQ(got, reference::geodesic_ball(cc, centroids[q], r, cap))
          << "trial " << trial;
      EXPECT_EQ(static_cast<std::size_t>(got.back() - got.front()) + 1, got.size());
      EXPECT_TRUE(std::find(got.begin(), got.end(), centroids[q]) != got.end());
    }
  }
}

TEST(InterpolateCurve, MidpointAndQuarterPoint) {
  CurveCloud mid = three_points(0, 1, 2);
  const Selection ends = select_all_of(mid, {0, 2});
  FeatureMap lo(2, 1);
  lo(0, 0) = 0.0;
  lo(1, 0) = 2.0;
  const FeatureMap up = interpolate_curve(mid, geodesic_lengths(mid), ends, lo);
  EXPECT_DOUBLE_EQ(up(1, 0), 1.0);
  EXPECT_EQ(up(0, 0), 0.0);
  EXPECT_EQ(up(2, 0), 2.0);

  CurveCloud quarter = three_points(0, 1, 4);
  FeatureMap unit(2, 2);
  unit(0, 0) = 1.0;
  unit(1, 1) = 1.0;
  const FeatureMap w = interpolate_curve(quarter, geodesic_lengths(quarter),
                                         select_all_of(quarter, {0, 2}), unit);
  EXPECT_DOUBLE_EQ(w(1, 0), 0.75);
  EXPECT_DOUBLE_EQ(w(1, 1), 0.25);
}

TEST(InterpolateCurve, ExtrapolatesFromNearestSelectedPoint) {
  const CurveCloud cc = testing::straight_curve(6, 0.1);
  FeatureMap lo(2, 1);
  lo(0, 0) = 3.0;
  lo(1, 0) = 7.0;
  const FeatureMap up = interpolate_curve(cc, geodesic_lengths(cc),
                                          select_all_of(cc, {2, 3}), lo);
  EXPECT_EQ(up(0, 0), 3.0);
  EXPECT_EQ(up(1, 0), 3.0);
  EXPECT_EQ(up(4, 0), 7.0);
  EXPECT_EQ(up(5, 0), 7.0);
}

TEST(InterpolateCurve, PartitionOfUnityAndReference) {
  Rng rng(29);
  for (int trial = 0; trial < 200; ++trial) {
    const CurveCloud cc = testing::random_curves(rng, 6, 40, 0.01, 0.2);
    const GeodesicTable g = geodesic_lengths(cc);
    const Selection sel = fps_1d(cc, g, SamplingConfig{testing::uniform(rng, 0.05, 0.5)});
    FeatureMap ones(sel.size(), 2, 1.0);
    const FeatureMap up = interpolate_curve(cc, g, sel, ones);
    for (double v : up.values()) ASSERT_EQ(v, 1.0);
    const FeatureMap lo = testing::random_features(rng, sel.size(), 3);
    const FeatureMap got = interpolate_curve(cc, g, sel, lo);
    EXPECT_LT(testing::relative_error(got, reference::interpolate_curve(cc, sel, lo)),
              1e-12);
  }
}

TEST(Gradient, ThreeValues) {
  const CurveCloud cc = testing::straight_curve(3, 1.0);
  FeatureMap f(3, 1);
  f(0, 0) = 1.0;
  f(1, 0) = 2.0;
  f(2, 0) = 4.0;
  const FeatureMap g = gradient_features(cc, f);
  EXPECT_EQ(g(0, 0), 1.0);
  EXPECT_EQ(g(1, 0), 1.5);
  EXPECT_EQ(g(2, 0), 2.0);
}

TEST(Gradient, SinglePointCurveIsZero) {
  CurveCloud cc;
  cc.positions = {Vec3{0, 0, 0}};
  cc.offsets = {0, 1};
  cc.source_beam = {1};
  FeatureMap f(1, 2, 5.0);
  EXPECT_EQ(gradient_features(cc, f), FeatureMap(1, 2, 0.0));
}

TEST(ConvSymmetric, OneTwoOneKernelOnRamp) {
  const CurveCloud cc = testing::straight_curve(3, 1.0);
  FeatureMap f(3, 1);
  f(0, 0) = 1.0;
  f(1, 0) = 2.0;
  f(2, 0) = 3.0;
  // Input channels are [feature, gradient]; only the feature is weighted.
  SymmetricKernel k(3, 2, 1);
  k.weight(0, 0, 0) = 1.0;
  k.weight(1, 0, 0) = 2.0;
  const FeatureMap y = conv_symmetric(cc, f, k);
  EXPECT_EQ(y(0, 0), 5.0);
  EXPECT_EQ(y(1, 0), 8.0);
  EXPECT_EQ(y(2, 0), 11.0);
}

TEST(ConvSymmetric, KernelIsMirrored) {
  SymmetricKernel k(5, 1, 1);
  k.weight(1, 0, 0) = 3.0;
  EXPECT_EQ(k.weight(3, 0, 0), 3.0);
  EXPECT_EQ(k.stored_taps(), 3u);
  EXPECT_THROW(SymmetricKernel(4, 1, 1), InvalidInput);
}

TEST(ConvSymmetric, ReversalCommutesBitwise) {
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const CurveCloud cc = testing::random_curves(rng, 5, 30, 0.01, 0.2);
    const std::size_t d = testing::uniform_index(rng, 1, 4);
    const std::size_t size = 2 * testing::uniform_index(rng, 0, 3) + 1;
    const std::size_t out = testing::uniform_index(rng, 1, 4);
    SymmetricKernel k(size, 2 * d, out);
    for (double& w : k.stored_weights()) w = testing::uniform(rng, -1, 1);
    for (double& b : k.bias()) b = testing::uniform(rng, -1, 1);
    const FeatureMap f = testing::random_features(rng, cc.num_points(), d);
    const auto rev = testing::reversed_rows(cc);
    const FeatureMap a = testing::take_rows(conv_symmetric(cc, f, k), rev);
    const FeatureMap b =
        conv_symmetric(testing::reverse_curves(cc), testing::take_rows(f, rev), k);
    ASSERT_EQ(a, b) << "trial " << trial;
    EXPECT_LT(testing::relative_error(conv_symmetric(cc, f, k), reference::conv(cc, f, k)),
              1e-12);
  }
}

TEST(CurveOps, ThreadCountDoesNotChangeOutput) {
  Rng rng(37);
  const CurveCloud cc = testing::random_curves(rng, 200, 80, 0.01, 0.1);
  const GeodesicTable g = geodesic_lengths(cc);
  const FeatureMap f = testing::random_features(rng, cc.num_points(), 4);
  SymmetricKernel k(3, 8, 4);
  for (double& w : k.stored_weights()) w = testing::uniform(rng, -1, 1);
  auto run = [&] {
    const Selection sel = fps_1d(cc, g, SamplingConfig{0.2});
    const Neighborhoods n = group_curve(cc, g, sel.indices, GroupingConfig{0.3, 8});
    const FeatureMap lo = gather_rows(f, sel.indices);
    return std::make_tuple(sel.indices, n.members, interpolate_curve(cc, g, sel, lo),
                           conv_symmetric(cc, f, k));
  };
  set_thread_count(1);
  const auto a = run();
  set_thread_count(3);
  const auto b = run();
  set_thread_count(0);
  EXPECT_TRUE(a == b);
}

TEST(CurveOps, OpsAreCounted) {
  const CurveCloud cc = testing::straight_curve(4, 0.1);
  reset_op_counts();
  const GeodesicTable g = geodesic_lengths(cc);
  fps_1d(cc, g, SamplingConfig{0.2});
  const OpCounts c = op_counts();
  EXPECT_EQ(c[static_cast<std::size_t>(Op::kGeodesicLengths)], 1u);
  EXPECT_EQ(c[static_cast<std::size_t>(Op::kFps1d)], 1u);
  EXPECT_EQ(c[static_cast<std::size_t>(Op::kGroupCurve)], 0u);
}

}  // namespace
}  // namespace curvecloud
