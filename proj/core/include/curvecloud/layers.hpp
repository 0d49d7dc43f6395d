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

#ifndef CURVECLOUD_LAYERS_HPP_
#define CURVECLOUD_LAYERS_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <variant>
#include <vector>

#include "curvecloud/common.hpp"
#include "curvecloud/curve_cloud.hpp"
#include "curvecloud/curve_ops.hpp"
#include "curvecloud/feature_map.hpp"

namespace curvecloud {

enum class Activation { kIdentity, kLeakyRelu };

inline constexpr double kLeakySlope = 0.01;

// Inference-mode batch normalization:
//   y = (x - mean) / sqrt(variance) * scale + shift.
struct BatchNorm {
  std::vector<double> mean;
  std::vector<double> variance;
  std::vector<double> scale;
  std::vector<double> shift;

  static BatchNorm identity(std::size_t channels);
  std::size_t channels() const { return mean.size(); }
};

// y = act(norm(W x + b)), W stored out x in.
struct DenseLayer {
  FeatureMap weight;
  std::vector<double> bias;
  Activation activation = Activation::kLeakyRelu;
  std::optional<BatchNorm> norm;

  std::size_t in_channels() const { return weight.cols(); }
  std::size_t out_channels() const { return weight.rows(); }
};

struct MlpParams {
  std::vector<DenseLayer> layers;

  std::size_t in_channels() const;
  std::size_t out_channels() const;
};

// Throws ConfigError if layer dimensions do not chain or a variance is not
// positive.
void check_mlp(const MlpParams& mlp);

// Applies the MLP to every row of `input`.
FeatureMap apply_mlp(const MlpParams& mlp, const FeatureMap& input);

// Per-neighbor, per-channel scores from a square linear map; the pooled value
// of channel c is the softmax(scores[:, c])-weighted sum of the neighbors.
struct AttentivePoolParams {
  DenseLayer score;  // D -> D, identity activation

  std::size_t channels() const { return score.out_channels(); }
};

std::vector<double> attentive_pool(const FeatureMap& neighbor_feats,
                                   const AttentivePoolParams& params);

// Shared set-abstraction core: each group is recentred on its centroid, the
// offsets are divided by `radius`, concatenated with the member features, sent
// through `mlp` and attentively pooled into one row per centroid.
FeatureMap abstract_neighborhoods(std::span<const Vec3> points,
                                  const FeatureMap& feats,
                                  std::span<const Vec3> centroids,
                                  const Neighborhoods& groups, double radius,
                                  const MlpParams& mlp,
                                  const AttentivePoolParams& pool);

struct CurveSaParams {
  double epsilon = 0.1;
  double radius = 0.2;
  std::optional<std::size_t> max_neighbors;
  MlpParams mlp;             // (3 + D) -> width
  AttentivePoolParams pool;  // width -> width
};

struct CurveSaResult {
  CurveCloud cloud;     // the cloud restricted to the selected points
  Selection selection;  // indices into the input cloud
  FeatureMap features;  // one row per selected point
};

CurveSaResult curve_sa(const CurveCloud& cc, const GeodesicTable& g,
                       const FeatureMap& feats, const CurveSaParams& params);

struct CurveFpParams {
  MlpParams mlp;  // (D_lo + D_skip) -> width
};

FeatureMap curve_fp(const CurveCloud& cc_hi, const GeodesicTable& g_hi,
                    const Selection& selection_lo, const FeatureMap& feats_lo,
                    const FeatureMap& skip_feats_hi, const CurveFpParams& params);

// Three symmetric convolutions, each followed by batch norm and leaky ReLU.
struct CurveConvBlockParams {
  std::array<SymmetricKernel, 3> kernels;
  std::array<BatchNorm, 3> norms;
};

FeatureMap curve_conv_block(const CurveCloud& cc, const FeatureMap& feats,
                            const CurveConvBlockParams& params);

struct PointSaParams {
  // Number of centroids; when 0, ceil(sample_ratio * N) clamped to [1, N].
  std::size_t count = 0;
  double sample_ratio = 0.25;
  double radius = 0.5;
  std::optional<std::size_t> max_neighbors;
  MlpParams mlp;
  AttentivePoolParams pool;
};

struct PointSaResult {
  std::vector<Vec3> points;    // centroids, in FPS visitation order
  std::vector<Index> indices;  // into the input points
  FeatureMap features;
};

PointSaResult point_sa(std::span<const Vec3> points, const FeatureMap& feats,
                       const PointSaParams& params);

struct GraphConvParams {
  std::size_t k = 8;
  MlpParams mlp;             // 2D -> width
  AttentivePoolParams pool;  // width -> width
};

// Edge convolution over the 3D kNN graph (self excluded): edge (i, j) carries
// [f_i | f_j - f_i].
FeatureMap graph_conv(std::span<const Vec3> points, const FeatureMap& feats,
                      const GraphConvParams& params);

struct PointFpParams {
  std::size_t k = 3;
  MlpParams mlp;  // (D_lo + D_skip) -> width
};

// Distances below this copy the coincident low-resolution feature.
inline constexpr double kCoincidentDistance = 1e-12;

// Inverse-distance kNN interpolation in 3D, concatenated with the skip
// features (which may have zero columns) and sent through the MLP.
FeatureMap point_fp(std::span<const Vec3> points_hi,
                    std::span<const Vec3> points_lo, const FeatureMap& feats_lo,
                    const FeatureMap& skip_feats_hi, const PointFpParams& params);

// Only the interpolation half of point_fp.
FeatureMap interpolate_knn(std::span<const Vec3> points_hi,
                           std::span<const Vec3> points_lo,
                           const FeatureMap& feats_lo, std::size_t k);

using LayerParams = std::variant<CurveSaParams, CurveFpParams,
                                 CurveConvBlockParams, PointSaParams,
                                 GraphConvParams, PointFpParams>;

enum class LayerKind {
  kCurveSa,
  kCurveFp,
  kCurveConvBlock,
  kPointSa,
  kGraphConv,
  kPointFp,
};

// Shape and hyperparameters of one layer, enough to initialize its weights.
struct LayerShape {
  LayerKind kind = LayerKind::kCurveSa;
  std::size_t in_channels = 3;
  std::size_t skip_channels = 0;     // FP layers only
  std::vector<std::size_t> widths;   // MLP widths, last one is the output
  std::size_t kernel_size = 3;       // conv block only
  double epsilon = 0.1;
  double radius = 0.2;
  std::optional<std::size_t> max_neighbors;
  double sample_ratio = 0.25;
  std::size_t k = 8;
};

// Parameter initialization stream. mt19937_64 output is fixed by the
// standard, and draws are mapped to doubles by hand, so a seed yields the same
// parameters on every platform. Draws are rounded to float so parameters
// survive f32 storage unchanged.
class ParamRng {
 public:
  explicit ParamRng(std::uint64_t seed) : engine_(seed) {}
  // Uniform in [-bound, bound], representable as float.
  double uniform(double bound);

 private:
  std::mt19937_64 engine_;
};

// Weights and biases uniform in +-sqrt(1 / fan_in); normalization statistics
// start at the identity.
DenseLayer init_dense(std::size_t in, std::size_t out, Activation act,
                      bool with_norm, ParamRng& rng);
MlpParams init_mlp(std::size_t in, std::span<const std::size_t> widths,
                   ParamRng& rng);
AttentivePoolParams init_attentive_pool(std::size_t channels, ParamRng& rng);
SymmetricKernel init_symmetric_kernel(std::size_t size, std::size_t in,
                                      std::size_t out, ParamRng& rng);

LayerParams init_params(const LayerShape& shape, std::uint64_t seed);

}  // namespace curvecloud

#endif  // CURVECLOUD_LAYERS_HPP_
