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

#ifndef CURVECLOUD_CURVE_OPS_HPP_
#define CURVECLOUD_CURVE_OPS_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "curvecloud/common.hpp"
#include "curvecloud/curve_cloud.hpp"
#include "curvecloud/feature_map.hpp"

namespace curvecloud {

struct SamplingConfig {
  double epsilon = 0.1;  // target arc-length spacing, meters
};

struct GroupingConfig {
  double radius = 0.1;  // arc-length radius, meters
  // Keep only the closest members. Ties between the two ends of the window
  // keep the lower index.
  std::optional<std::size_t> max_neighbors;
};

// Points chosen from a CurveCloud. indices[offsets[j], offsets[j + 1]) are
// the ascending picks of curve j; every curve has at least one pick.
struct Selection {
  std::vector<Index> indices;
  std::vector<Index> offsets{0};

  std::size_t size() const { return indices.size(); }
  std::span<const Index> curve(std::size_t j) const {
    return std::span<const Index>(indices).subspan(offsets[j],
                                                   offsets[j + 1] - offsets[j]);
  }
};

// Compressed neighbor lists: members[offsets[i], offsets[i + 1]) belong to
// query i, ascending by point index.
struct Neighborhoods {
  std::vector<Index> offsets{0};
  std::vector<Index> members;

  std::size_t size() const { return offsets.size() - 1; }
  std::span<const Index> of(std::size_t i) const {
    return std::span<const Index>(members).subspan(offsets[i],
                                                   offsets[i + 1] - offsets[i]);
  }
};

// 1D convolution kernel with mirrored taps. Only the outer half of the taps
// (ceil(size / 2) of them) is stored, so tap s and tap size - 1 - s share
// storage and the symmetry holds exactly.
class SymmetricKernel {
 public:
  SymmetricKernel() = default;
  SymmetricKernel(std::size_t size, std::size_t in_channels,
                  std::size_t out_channels);

  std::size_t size() const { return size_; }
  std::size_t in_channels() const { return in_; }
  std::size_t out_channels() const { return out_; }
  std::size_t stored_taps() const { return (size_ + 1) / 2; }

  // Weight of tap s in [0, size), input channel c, output channel o.
  double& weight(std::size_t s, std::size_t c, std::size_t o) {
    return half_[(stored_tap(s) * in_ + c) * out_ + o];
  }
  double weight(std::size_t s, std::size_t c, std::size_t o) const {
    return half_[(stored_tap(s) * in_ + c) * out_ + o];
  }

  // Stored taps, laid out [stored tap][in][out]; stored tap 0 is the
  // outermost pair and stored tap size/2 the centre.
  std::span<double> stored_weights() { return half_; }
  std::span<const double> stored_weights() const { return half_; }
  std::span<double> bias() { return bias_; }
  std::span<const double> bias() const { return bias_; }

  // Full [size][in][out] tensor.
  std::vector<double> materialize() const;

 private:
  std::size_t stored_tap(std::size_t s) const {
    return s < size_ - 1 - s ? s : size_ - 1 - s;
  }

  std::size_t size_ = 1;
  std::size_t in_ = 0;
  std::size_t out_ = 0;
  std::vector<double> half_;
  std::vector<double> bias_;
};

// Per curve, selects the first point of every occupied interval
// floor(cumlen / epsilon). The first point of each curve is always selected.
Selection fps_1d(const CurveCloud& cc, const GeodesicTable& g,
                 const SamplingConfig& cfg);

// Geodesic ball query: for each centroid, the contiguous run of points on its
// curve with |cumlen[k] - cumlen[centroid]| < radius.
Neighborhoods group_curve(const CurveCloud& cc, const GeodesicTable& g,
                          std::span<const Index> centroids,
                          const GroupingConfig& cfg);

// Upsamples features of selected points to every point of cc_hi. Points
// between two picks on a curve blend them with inverse arc-length weights;
// points outside the first/last pick copy the nearest one.
FeatureMap interpolate_curve(const CurveCloud& cc_hi, const GeodesicTable& g_hi,
                             const Selection& selection,
                             const FeatureMap& feats_lo);

// |d f / d i| along each curve: central differences inside, one-sided at the
// ends, zero on single-point curves.
FeatureMap gradient_features(const CurveCloud& cc, const FeatureMap& feats);

// Convolves [feats | gradient_features(feats)] along every curve with
// replicate padding, preserving length. Exactly equivariant under reversal of
// any curve.
FeatureMap conv_symmetric(const CurveCloud& cc, const FeatureMap& feats,
                          const SymmetricKernel& kernel);

}  // namespace curvecloud

#endif  // CURVECLOUD_CURVE_OPS_HPP_
