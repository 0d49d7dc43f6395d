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

#ifndef CURVECLOUD_TESTS_SUPPORT_FIXTURES_HPP_
#define CURVECLOUD_TESTS_SUPPORT_FIXTURES_HPP_

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "curvecloud/backbone.hpp"
#include "curvecloud/curve_cloud.hpp"
#include "curvecloud/feature_map.hpp"
#include "curvecloud/layers.hpp"
#include "curvecloud/point_cloud.hpp"

namespace curvecloud::testing {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi);
std::size_t uniform_index(Rng& rng, std::size_t lo, std::size_t hi);  // [lo, hi]

// Random multi-beam stream: random walks per beam with occasional jumps,
// shuffled timestamps interleaved across beams, some timestamp ties.
PointCloud random_beam_stream(Rng& rng, std::size_t max_points = 200,
                              std::uint32_t max_beams = 4);

// Random polylines with edge lengths in [min_edge, max_edge].
CurveCloud random_curves(Rng& rng, std::size_t max_curves, std::size_t max_points,
                         double min_edge, double max_edge);

// Straight curve of n points along x starting at x0, spaced `step`.
CurveCloud straight_curve(std::size_t n, double step, double x0 = 0.0);

FeatureMap random_features(Rng& rng, std::size_t rows, std::size_t cols,
                           double scale = 1.0);

std::vector<Vec3> random_points(Rng& rng, std::size_t n, double extent = 1.0);

// Parameters with non-trivial normalization statistics, so that tests cover
// every term of the layer formulas.
void randomize_norms(Rng& rng, MlpParams& mlp);
void randomize_norms(Rng& rng, CurveConvBlockParams& conv);

// Cloud with its curves reordered: curve j of the result is curve perm[j].
CurveCloud permute_curves(const CurveCloud& cc, const std::vector<std::size_t>& perm);
// Row mapping of permute_curves: result row r comes from input row map[r].
std::vector<Index> permuted_rows(const CurveCloud& cc,
                                 const std::vector<std::size_t>& perm);

// Every curve reversed in place.
CurveCloud reverse_curves(const CurveCloud& cc);
std::vector<Index> reversed_rows(const CurveCloud& cc);

FeatureMap take_rows(const FeatureMap& f, const std::vector<Index>& rows);

// max |a - b| / max |b|, or max |a - b| when b is all zero. Shapes must match.
double relative_error(const FeatureMap& a, const FeatureMap& b);
double relative_error(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace curvecloud::testing

#endif  // CURVECLOUD_TESTS_SUPPORT_FIXTURES_HPP_
