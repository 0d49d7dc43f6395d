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

#ifndef CURVECLOUD_TESTS_SUPPORT_ORACLES_HPP_
#define CURVECLOUD_TESTS_SUPPORT_ORACLES_HPP_

// Straightforward reference implementations. They favour the most literal
// reading of each definition over speed and share no code with the library
// beyond the data types (and, for layer compositions, the already-tested
// sampling and grouping ops).

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "curvecloud/backbone.hpp"
#include "curvecloud/curve_cloud.hpp"
#include "curvecloud/curve_ops.hpp"
#include "curvecloud/feature_map.hpp"
#include "curvecloud/layers.hpp"
#include "curvecloud/point_cloud.hpp"

namespace curvecloud::reference {

// Sequential conversion: per beam, sort by (timestamp, input index), then
// walk the sequence once and cut wherever an edge exceeds the threshold.
CurveCloud convert(const PointCloud& pc, const ConversionConfig& cfg);

std::vector<double> cumulative_lengths(const CurveCloud& cc);

// First point of each occupied floor(cumlen / eps) interval, per curve.
std::vector<Index> fps_1d(const CurveCloud& cc, double epsilon);

// {k on the centroid's curve : |cumlen[k] - cumlen[c]| < r}, closest first
// (ties to the lower index) when capped, reported ascending.
std::vector<Index> geodesic_ball(const CurveCloud& cc, Index centroid, double radius,
                                 std::optional<std::size_t> cap = {});

// {k : |p_k - c| < r} by squared distance, closest first when capped.
std::vector<Index> euclidean_ball(std::span<const Vec3> points, const Vec3& c,
                                  double radius, std::optional<std::size_t> cap = {});

// Greedy farthest point sampling, recomputing every distance from scratch.
std::vector<Index> fps_euclidean(std::span<const Vec3> points, std::size_t count,
                                 Index seed);

// k nearest by (squared distance, index).
std::vector<Index> knn(std::span<const Vec3> points, const Vec3& q, std::size_t k,
                       std::optional<Index> exclude = {});

// Inverse arc-length weights w = 1/d over the bracketing picks.
FeatureMap interpolate_curve(const CurveCloud& cc, const Selection& sel,
                             const FeatureMap& feats_lo);

FeatureMap gradient(const CurveCloud& cc, const FeatureMap& f);

// Direct cross-correlation with the fully materialized kernel and clamped
// (replicate) indices.
FeatureMap conv(const CurveCloud& cc, const FeatureMap& f, const SymmetricKernel& k);

std::vector<double> dense(const DenseLayer& l, const std::vector<double>& x);
std::vector<double> mlp(const MlpParams& m, const std::vector<double>& x);
std::vector<double> attentive_pool(const std::vector<std::vector<double>>& rows,
                                   const AttentivePoolParams& p);

struct SaOutput {
  std::vector<Index> centers;
  FeatureMap features;
};

SaOutput curve_sa(const CurveCloud& cc, const FeatureMap& feats,
                  const CurveSaParams& p);
FeatureMap curve_fp(const CurveCloud& cc_hi, const Selection& sel,
                    const FeatureMap& feats_lo, const FeatureMap& skip,
                    const MlpParams& m);
FeatureMap conv_block(const CurveCloud& cc, const FeatureMap& f,
                      const CurveConvBlockParams& p);
SaOutput point_sa(std::span<const Vec3> points, const FeatureMap& feats,
                  const PointSaParams& p);
FeatureMap graph_conv(std::span<const Vec3> points, const FeatureMap& feats,
                      const GraphConvParams& p);
FeatureMap interpolate_knn(std::span<const Vec3> hi, std::span<const Vec3> lo,
                           const FeatureMap& feats_lo, std::size_t k);
FeatureMap point_fp(std::span<const Vec3> hi, std::span<const Vec3> lo,
                    const FeatureMap& feats_lo, const FeatureMap& skip,
                    const MlpParams& m, std::size_t k);

// Backbone forward pass for the default (all curve ops) configuration, built
// from the reference layers above.
FeatureMap forward(const CurveCloud& cc, const FeatureMap& feats,
                   const BackboneConfig& cfg, const BackboneParams& params);

}  // namespace curvecloud::reference

#endif  // CURVECLOUD_TESTS_SUPPORT_ORACLES_HPP_
