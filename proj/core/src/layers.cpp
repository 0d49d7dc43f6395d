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

#include "curvecloud/layers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "curvecloud/point_ops.hpp"
#include "parallel.hpp"

namespace curvecloud {
namespace {

// Rows handled together by the grouped layers. Fixed so that results do not
// depend on the thread count.
constexpr std::size_t kChunk = 128;

// Weights transposed to [in][out] so the inner loop runs over contiguous
// output channels. Per output the sum still runs over inputs in order.
struct PreparedLayer {
  DenseLayer layer;
  std::vector<double> wt;
  std::vector<double> stddev;
};

class PreparedMlp {
 public:
  explicit PreparedMlp(const MlpParams& mlp) {
    check_mlp(mlp);
    for (const auto& l : mlp.layers) {
      PreparedLayer p{l, {}, {}};
      const std::size_t in = l.in_channels();
      const std::size_t out = l.out_channels();
      p.wt.resize(in * out);
      for (std::size_t o = 0; o < out; ++o) {
        for (std::size_t i = 0; i < in; ++i) p.wt[i * out + o] = l.weight(o, i);
      }
      if (l.norm) {
        p.stddev.resize(out);
        for (std::size_t o = 0; o < out; ++o) {
          p.stddev[o] = std::sqrt(l.norm->variance[o]);
        }
      }
      width_ = std::max({width_, in, out});
      layers_.push_back(std::move(p));
    }
  }

  std::size_t in_channels() const {
    return layers_.front().layer.in_channels();
  }
  std::size_t out_channels() const {
    return layers_.back().layer.out_channels();
  }

  // `x` and `y` may alias; `scratch` holds 2 * width doubles.
  void run(const double* x, double* y, std::vector<double>& scratch) const {
    scratch.resize(2 * width_);
    double* a = scratch.data();
    double* b = scratch.data() + width_;
    std::copy(x, x + in_channels(), a);
    for (const auto& p : layers_) {
      const DenseLayer& l = p.layer;
      const std::size_t in = l.in_channels();
      const std::size_t out = l.out_channels();
      std::fill(b, b + out, 0.0);
      for (std::size_t i = 0; i < in; ++i) {
        const double v = a[i];
        const double* w = p.wt.data() + i * out;
        for (std::size_t o = 0; o < out; ++o) b[o] += v * w[o];
      }
      for (std::size_t o = 0; o < out; ++o) {
        double v = b[o] + l.bias[o];
        if (l.norm) {
          v = (v - l.norm->mean[o]) / p.stddev[o] * l.norm->scale[o] +
              l.norm->shift[o];
        }
        if (l.activation == Activation::kLeakyRelu && v < 0.0) {
          v *= kLeakySlope;
        }
        b[o] = v;
      }
      std::swap(a, b);
    }
    std::copy(a, a + out_channels(), y);
  }

 private:
  std::vector<PreparedLayer> layers_;
  std::size_t width_ = 0;
};

void check_pool(const AttentivePoolParams& pool, std::size_t channels) {
  const DenseLayer& s = pool.score;
  if (s.in_channels() != s.out_channels() || s.out_channels() != channels) {
    throw ConfigError("attentive pooling expects a square " +
                      std::to_string(channels) + "-channel score map");
  }
  if (s.bias.size() != s.out_channels()) {
    throw ConfigError("attentive pooling bias has the wrong length");
  }
}

// Pools rows [0, n) of `values` using scores computed from the same rows.
void pool_rows(const PreparedMlp& score, const double* values, std::size_t n,
               std::size_t d, double* out, std::vector<double>& scores,
               std::vector<double>& scratch) {
  scores.resize(n * d);
  for (std::size_t k = 0; k < n; ++k) {
    score.run(values + k * d, scores.data() + k * d, scratch);
  }
  for (std::size_t c = 0; c < d; ++c) {
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) peak = std::max(peak, scores[k * d + c]);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double e = std::exp(scores[k * d + c] - peak);
      num += e * values[k * d + c];
      den += e;
    }
    out[c] = num / den;
  }
}

MlpParams score_mlp(const AttentivePoolParams& pool) {
  MlpParams m;
  m.layers.push_back(pool.score);
  m.layers.back().activation = Activation::kIdentity;
  m.layers.back().norm.reset();
  return m;
}

// Runs `mlp` on the rows produced by `fill_row` for every member of every
// group and pools each group to one output row.
template <typename FillRow>
FeatureMap grouped_mlp_pool(const Neighborhoods& groups, std::size_t in_width,
                            const MlpParams& mlp,
                            const AttentivePoolParams& pool,
                            FillRow&& fill_row) {
  const PreparedMlp net(mlp);
  if (net.in_channels() != in_width) {
    throw ConfigError("MLP expects " + std::to_string(net.in_channels()) +
                      " inputs, layer provides " + std::to_string(in_width));
  }
  const std::size_t d = net.out_channels();
  check_pool(pool, d);
  const PreparedMlp score(score_mlp(pool));
  const std::size_t groups_n = groups.size();
  for (std::size_t q = 0; q < groups_n; ++q) {
    if (groups.offsets[q + 1] == groups.offsets[q]) {
      throw InvalidInput("attentive pooling over an empty neighborhood");
    }
  }

  FeatureMap out(groups_n, d);
  const std::size_t chunks = (groups_n + kChunk - 1) / kChunk;
  internal::parallel_for(chunks, [&](std::size_t chunk) {
    std::vector<double> row(in_width);
    std::vector<double> hidden;
    std::vector<double> scores;
    std::vector<double> scratch;
    const std::size_t q_end = std::min(groups_n, (chunk + 1) * kChunk);
    for (std::size_t q = chunk * kChunk; q < q_end; ++q) {
      const auto members = groups.of(q);
      hidden.resize(members.size() * d);
      for (std::size_t k = 0; k < members.size(); ++k) {
        fill_row(q, members[k], row.data());
        net.run(row.data(), hidden.data() + k * d, scratch);
      }
      pool_rows(score, hidden.data(), members.size(), d, out.row(q).data(),
                scores, scratch);
    }
  }, 2);
  return out;
}

}  // namespace

BatchNorm BatchNorm::identity(std::size_t channels) {
  return BatchNorm{std::vector<double>(channels, 0.0),
                   std::vector<double>(channels, 1.0),
                   std::vector<double>(channels, 1.0),
                   std::vector<double>(channels, 0.0)};
}

std::size_t MlpParams::in_channels() const {
  return layers.empty() ? 0 : layers.front().in_channels();
}

std::size_t MlpParams::out_channels() const {
  return layers.empty() ? 0 : layers.back().out_channels();
}

void check_mlp(const MlpParams& mlp) {
  if (mlp.layers.empty()) throw ConfigError("MLP has no layers");
  for (std::size_t i = 0; i < mlp.layers.size(); ++i) {
    const DenseLayer& l = mlp.layers[i];
    const std::string where = "MLP layer " + std::to_string(i);
    if (l.in_channels() == 0 || l.out_channels() == 0) {
      throw ConfigError(where + " has an empty weight matrix");
    }
    if (i > 0 && l.in_channels() != mlp.layers[i - 1].out_channels()) {
      throw ConfigError(where + " expects " + std::to_string(l.in_channels()) +
                        " inputs but the previous layer yields " +
                        std::to_string(mlp.layers[i - 1].out_channels()));
    }
    if (l.bias.size() != l.out_channels()) {
      throw ConfigError(where + " bias has the wrong length");
    }
    if (l.norm) {
      const BatchNorm& n = *l.norm;
      const std::size_t c = l.out_channels();
      if (n.mean.size() != c || n.variance.size() != c || n.scale.size() != c ||
          n.shift.size() != c) {
        throw ConfigError(where + " normalization has the wrong width");
      }
      for (double v : n.variance) {
        if (!(v > 0.0)) throw ConfigError(where + " has a non-positive variance");
      }
    }
  }
}

FeatureMap apply_mlp(const MlpParams& mlp, const FeatureMap& input) {
  const PreparedMlp net(mlp);
  if (input.cols() != net.in_channels()) {
    throw InvalidInput("MLP expects " + std::to_string(net.in_channels()) +
                       " channels, got " + std::to_string(input.cols()));
  }
  FeatureMap out(input.rows(), net.out_channels());
  const std::size_t chunks = (input.rows() + kChunk - 1) / kChunk;
  internal::parallel_for(chunks, [&](std::size_t chunk) {
    std::vector<double> scratch;
    const std::size_t end = std::min(input.rows(), (chunk + 1) * kChunk);
    for (std::size_t r = chunk * kChunk; r < end; ++r) {
      net.run(input.row(r).data(), out.row(r).data(), scratch);
    }
  }, 2);
  return out;
}

std::vector<double> attentive_pool(const FeatureMap& neighbor_feats,
                                   const AttentivePoolParams& params) {
  if (neighbor_feats.rows() == 0) {
    throw InvalidInput("attentive pooling over an empty neighborhood");
  }
  check_pool(params, neighbor_feats.cols());
  const PreparedMlp score(score_mlp(params));
  std::vector<double> out(neighbor_feats.cols());
  std::vector<double> scores;
  std::vector<double> scratch;
  pool_rows(score, neighbor_feats.values().data(), neighbor_feats.rows(),
            neighbor_feats.cols(), out.data(), scores, scratch);
  return out;
}

FeatureMap abstract_neighborhoods(std::span<const Vec3> points,
                                  const FeatureMap& feats,
                                  std::span<const Vec3> centroids,
                                  const Neighborhoods& groups, double radius,
                                  const MlpParams& mlp,
                                  const AttentivePoolParams& pool) {
  if (feats.rows() != points.size()) {
    throw InvalidInput("features do not match the point set");
  }
  if (groups.size() != centroids.size()) {
    throw InvalidInput("one neighborhood per centroid expected");
  }
  if (!(radius > 0.0)) throw InvalidInput("radius must be positive");
  const std::size_t d = feats.cols();
  return grouped_mlp_pool(
      groups, 3 + d, mlp, pool,
      [&](std::size_t q, Index member, double* row) {
        const Vec3& c = centroids[q];
        const Vec3& p = points[member];
        row[0] = (p.x - c.x) / radius;
        row[1] = (p.y - c.y) / radius;
        row[2] = (p.z - c.z) / radius;
        const auto f = feats.row(member);
        std::copy(f.begin(), f.end(), row + 3);
      });
}

CurveSaResult curve_sa(const CurveCloud& cc, const GeodesicTable& g,
                       const FeatureMap& feats, const CurveSaParams& params) {
  check_structure(cc);
  if (feats.rows() != cc.num_points()) {
    throw InvalidInput("curve_sa features do not match the curve cloud");
  }
  CurveSaResult res;
  res.selection = fps_1d(cc, g, SamplingConfig{params.epsilon});
  const Neighborhoods groups =
      group_curve(cc, g, res.selection.indices,
                  GroupingConfig{params.radius, params.max_neighbors});

  res.cloud.positions.reserve(res.selection.size());
  for (Index i : res.selection.indices) {
    res.cloud.positions.push_back(cc.positions[i]);
  }
  res.cloud.offsets = res.selection.offsets;
  res.cloud.source_beam = cc.source_beam;
  res.features = abstract_neighborhoods(cc.positions, feats,
                                        res.cloud.positions, groups,
                                        params.radius, params.mlp, params.pool);
  return res;
}

FeatureMap curve_fp(const CurveCloud& cc_hi, const GeodesicTable& g_hi,
                    const Selection& selection_lo, const FeatureMap& feats_lo,
                    const FeatureMap& skip_feats_hi,
                    const CurveFpParams& params) {
  if (skip_feats_hi.rows() != cc_hi.num_points()) {
    throw InvalidInput("skip features have " +
                       std::to_string(skip_feats_hi.rows()) + " rows for " +
                       std::to_string(cc_hi.num_points()) + " points");
  }
  const FeatureMap up = interpolate_curve(cc_hi, g_hi, selection_lo, feats_lo);
  return apply_mlp(params.mlp, skip_feats_hi.cols() == 0
                                   ? up
                                   : concat_columns(up, skip_feats_hi));
}

FeatureMap curve_conv_block(const CurveCloud& cc, const FeatureMap& feats,
                            const CurveConvBlockParams& params) {
  FeatureMap x = feats;
  for (std::size_t s = 0; s < params.kernels.size(); ++s) {
    const SymmetricKernel& kernel = params.kernels[s];
    const BatchNorm& bn = params.norms[s];
    if (bn.channels() != kernel.out_channels()) {
      throw ConfigError("conv block normalization width mismatch at stage " +
                        std::to_string(s));
    }
    FeatureMap y = conv_symmetric(cc, x, kernel);
    const std::size_t c_out = y.cols();
    std::vector<double> stddev(c_out);
    for (std::size_t o = 0; o < c_out; ++o) {
      if (!(bn.variance[o] > 0.0)) {
        throw ConfigError("conv block has a non-positive variance");
      }
      stddev[o] = std::sqrt(bn.variance[o]);
    }
    for (std::size_t r = 0; r < y.rows(); ++r) {
      auto row = y.row(r);
      for (std::size_t o = 0; o < c_out; ++o) {
        double v = (row[o] - bn.mean[o]) / stddev[o] * bn.scale[o] + bn.shift[o];
        if (v < 0.0) v *= kLeakySlope;
        row[o] = v;
      }
    }
    x = std::move(y);
  }
  return x;
}

PointSaResult point_sa(std::span<const Vec3> points, const FeatureMap& feats,
                       const PointSaParams& params) {
  const std::size_t n = points.size();
  if (n == 0) throw InvalidInput("point_sa on an empty point set");
  if (feats.rows() != n) {
    throw InvalidInput("point_sa features do not match the point set");
  }
  std::size_t count = params.count;
  if (count == 0) {
    const double want = std::ceil(params.sample_ratio * static_cast<double>(n));
    count = std::clamp<std::size_t>(static_cast<std::size_t>(want), 1, n);
  }
  if (count > n) {
    throw InvalidInput("point_sa asks for " + std::to_string(count) +
                       " centroids from " + std::to_string(n) + " points");
  }
  PointSaResult res;
  res.indices = fps_euclidean(points, count, canonical_seed(points));
  res.points.reserve(count);
  for (Index i : res.indices) res.points.push_back(points[i]);
  const Neighborhoods groups =
      group_ball3d(points, res.points, params.radius, params.max_neighbors);
  res.features = abstract_neighborhoods(points, feats, res.points, groups,
                                        params.radius, params.mlp, params.pool);
  return res;
}

FeatureMap graph_conv(std::span<const Vec3> points, const FeatureMap& feats,
                      const GraphConvParams& params) {
  const std::size_t n = points.size();
  if (feats.rows() != n) {
    throw InvalidInput("graph_conv features do not match the point set");
  }
  if (params.k == 0 || params.k >= n) {
    throw InvalidInput("graph_conv needs 1 <= k < N (k = " +
                       std::to_string(params.k) + ", N = " + std::to_string(n) +
                       ")");
  }
  const KnnResult nn = knn(points, points, params.k, true);
  Neighborhoods edges;
  edges.offsets.resize(n + 1);
  edges.members = nn.indices;
  for (std::size_t i = 0; i < n; ++i) {
    edges.offsets[i + 1] = static_cast<Index>((i + 1) * params.k);
    std::sort(edges.members.begin() + static_cast<std::ptrdiff_t>(i * params.k),
              edges.members.begin() +
                  static_cast<std::ptrdiff_t>((i + 1) * params.k));
  }
  const std::size_t d = feats.cols();
  return grouped_mlp_pool(edges, 2 * d, params.mlp, params.pool,
                          [&](std::size_t i, Index j, double* row) {
                            const auto fi = feats.row(i);
                            const auto fj = feats.row(j);
                            for (std::size_t c = 0; c < d; ++c) {
                              row[c] = fi[c];
                              row[d + c] = fj[c] - fi[c];
                            }
                          });
}

FeatureMap interpolate_knn(std::span<const Vec3> points_hi,
                           std::span<const Vec3> points_lo,
                           const FeatureMap& feats_lo, std::size_t k) {
  if (points_lo.empty()) {
    throw InvalidInput("cannot interpolate from an empty low-resolution set");
  }
  if (feats_lo.rows() != points_lo.size()) {
    throw InvalidInput("low-resolution features do not match their points");
  }
  if (k == 0) throw InvalidInput("interpolation needs k >= 1");
  k = std::min(k, points_lo.size());
  const KnnResult nn = knn(points_lo, points_hi, k, false);
  const std::size_t d = feats_lo.cols();
  FeatureMap out(points_hi.size(), d);
  internal::parallel_for(points_hi.size(), [&](std::size_t h) {
    const auto idx = nn.of(h);
    const auto sq = nn.distances_of(h);
    auto dst = out.row(h);
    if (std::sqrt(sq[0]) < kCoincidentDistance) {
      const auto src = feats_lo.row(idx[0]);
      std::copy(src.begin(), src.end(), dst.begin());
      return;
    }
    // Weights are normalized before mixing so k = 1 copies exactly.
    double total = 0.0;
    for (std::size_t s = 0; s < k; ++s) total += 1.0 / std::sqrt(sq[s]);
    for (std::size_t s = 0; s < k; ++s) {
      const double w = (1.0 / std::sqrt(sq[s])) / total;
      const auto src = feats_lo.row(idx[s]);
      for (std::size_t c = 0; c < d; ++c) dst[c] += w * src[c];
    }
  }, 256);
  return out;
}

FeatureMap point_fp(std::span<const Vec3> points_hi,
                    std::span<const Vec3> points_lo, const FeatureMap& feats_lo,
                    const FeatureMap& skip_feats_hi,
                    const PointFpParams& params) {
  if (skip_feats_hi.rows() != points_hi.size()) {
    throw InvalidInput("skip features do not match the high-resolution points");
  }
  const FeatureMap up = interpolate_knn(points_hi, points_lo, feats_lo, params.k);
  return apply_mlp(params.mlp, skip_feats_hi.cols() == 0
                                   ? up
                                   : concat_columns(up, skip_feats_hi));
}

double ParamRng::uniform(double bound) {
  // 53 random bits -> [0, 1).
  const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  float v = static_cast<float>((2.0 * u - 1.0) * bound);
  if (std::abs(static_cast<double>(v)) > bound) v = std::nextafter(v, 0.0f);
  return v;
}

DenseLayer init_dense(std::size_t in, std::size_t out, Activation act,
                      bool with_norm, ParamRng& rng) {
  DenseLayer l;
  l.weight = FeatureMap(out, in);
  const double bound = std::sqrt(1.0 / static_cast<double>(in));
  for (double& w : l.weight.values()) w = rng.uniform(bound);
  l.bias.resize(out);
  for (double& b : l.bias) b = rng.uniform(bound);
  l.activation = act;
  if (with_norm) l.norm = BatchNorm::identity(out);
  return l;
}

MlpParams init_mlp(std::size_t in, std::span<const std::size_t> widths,
                   ParamRng& rng) {
  MlpParams mlp;
  for (std::size_t w : widths) {
    mlp.layers.push_back(init_dense(in, w, Activation::kLeakyRelu, true, rng));
    in = w;
  }
  return mlp;
}

AttentivePoolParams init_attentive_pool(std::size_t channels, ParamRng& rng) {
  return AttentivePoolParams{
      init_dense(channels, channels, Activation::kIdentity, false, rng)};
}

SymmetricKernel init_symmetric_kernel(std::size_t size, std::size_t in,
                                      std::size_t out, ParamRng& rng) {
  SymmetricKernel kernel(size, in, out);
  const double bound = std::sqrt(1.0 / static_cast<double>(in * size));
  for (double& w : kernel.stored_weights()) w = rng.uniform(bound);
  for (double& b : kernel.bias()) b = rng.uniform(bound);
  return kernel;
}

LayerParams init_params(const LayerShape& shape, std::uint64_t seed) {
  if (shape.in_channels == 0) throw ConfigError("layer needs input channels");
  if (shape.widths.empty() ||
      std::find(shape.widths.begin(), shape.widths.end(), 0u) !=
          shape.widths.end()) {
    throw ConfigError("layer widths must be non-empty and positive");
  }
  if (!(shape.epsilon > 0.0) || !(shape.radius > 0.0) ||
      !(shape.sample_ratio > 0.0 && shape.sample_ratio <= 1.0) ||
      shape.k == 0 || (shape.max_neighbors && *shape.max_neighbors == 0)) {
    throw ConfigError("layer hyperparameters must be positive");
  }
  ParamRng rng(seed);
  const std::size_t width = shape.widths.back();
  switch (shape.kind) {
    case LayerKind::kCurveSa: {
      CurveSaParams p;
      p.epsilon = shape.epsilon;
      p.radius = shape.radius;
      p.max_neighbors = shape.max_neighbors;
      p.mlp = init_mlp(3 + shape.in_channels, shape.widths, rng);
      p.pool = init_attentive_pool(width, rng);
      return p;
    }
    case LayerKind::kCurveFp: {
      CurveFpParams p;
      p.mlp = init_mlp(shape.in_channels + shape.skip_channels, shape.widths,
                       rng);
      return p;
    }
    case LayerKind::kCurveConvBlock: {
      if (shape.widths.size() != 1 && shape.widths.size() != 3) {
        throw ConfigError("conv block takes one width or three");
      }
      if (shape.kernel_size % 2 == 0) {
        throw ConfigError("conv kernel size must be odd");
      }
      CurveConvBlockParams p;
      std::size_t in = shape.in_channels;
      for (std::size_t s = 0; s < 3; ++s) {
        const std::size_t out =
            shape.widths.size() == 3 ? shape.widths[s] : shape.widths[0];
        p.kernels[s] = init_symmetric_kernel(shape.kernel_size, 2 * in, out, rng);
        p.norms[s] = BatchNorm::identity(out);
        in = out;
      }
      return p;
    }
    case LayerKind::kPointSa: {
      PointSaParams p;
      p.sample_ratio = shape.sample_ratio;
      p.radius = shape.radius;
      p.max_neighbors = shape.max_neighbors;
      p.mlp = init_mlp(3 + shape.in_channels, shape.widths, rng);
      p.pool = init_attentive_pool(width, rng);
      return p;
    }
    case LayerKind::kGraphConv: {
      GraphConvParams p;
      p.k = shape.k;
      p.mlp = init_mlp(2 * shape.in_channels, shape.widths, rng);
      p.pool = init_attentive_pool(width, rng);
      return p;
    }
    case LayerKind::kPointFp: {
      PointFpParams p;
      p.k = shape.k;
      p.mlp = init_mlp(shape.in_channels + shape.skip_channels, shape.widths,
                       rng);
      return p;
    }
  }
  throw ConfigError("unknown layer kind");
}

}  // namespace curvecloud
