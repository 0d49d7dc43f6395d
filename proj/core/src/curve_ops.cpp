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

#include "curvecloud/curve_ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "curvecloud/instrumentation.hpp"
#include "parallel.hpp"

namespace curvecloud {
namespace {

void check_geodesics(const CurveCloud& cc, const GeodesicTable& g) {
  if (g.cumlen.size() != cc.num_points()) {
    throw InvalidInput("geodesic table does not match the curve cloud");
  }
}

void check_features(const CurveCloud& cc, const FeatureMap& f) {
  if (f.rows() != cc.num_points()) {
    throw InvalidInput("feature map has " + std::to_string(f.rows()) +
                       " rows for " + std::to_string(cc.num_points()) +
                       " points");
  }
}

// First index in [lo, hi) where pred is false; pred must hold on a prefix.
template <typename Pred>
Index first_false(Index lo, Index hi, Pred pred) {
  while (lo < hi) {
    const Index mid = lo + (hi - lo) / 2;
    if (pred(mid)) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  return lo;
}

Index curve_of(const CurveCloud& cc, Index point) {
  const auto it =
      std::upper_bound(cc.offsets.begin(), cc.offsets.end(), point);
  return static_cast<Index>(it - cc.offsets.begin() - 1);
}

}  // namespace

SymmetricKernel::SymmetricKernel(std::size_t size, std::size_t in_channels,
                                 std::size_t out_channels)
    : size_(size), in_(in_channels), out_(out_channels) {
  if (size == 0 || size % 2 == 0) {
    throw InvalidInput("symmetric kernel size must be odd, got " +
                       std::to_string(size));
  }
  half_.assign(stored_taps() * in_ * out_, 0.0);
  bias_.assign(out_, 0.0);
}

std::vector<double> SymmetricKernel::materialize() const {
  std::vector<double> full(size_ * in_ * out_);
  for (std::size_t s = 0; s < size_; ++s) {
    for (std::size_t c = 0; c < in_; ++c) {
      for (std::size_t o = 0; o < out_; ++o) {
        full[(s * in_ + c) * out_ + o] = weight(s, c, o);
      }
    }
  }
  return full;
}

Selection fps_1d(const CurveCloud& cc, const GeodesicTable& g,
                 const SamplingConfig& cfg) {
  count_op(Op::kFps1d);
  check_structure(cc);
  check_geodesics(cc, g);
  if (!(cfg.epsilon > 0.0)) throw InvalidInput("epsilon must be positive");

  const std::size_t m = cc.num_curves();
  const double eps = cfg.epsilon;
  const double* cum = g.cumlen.data();

  std::vector<Index> counts(m + 1, 0);
  internal::parallel_for(m, [&](std::size_t j) {
    const Index lo = cc.offsets[j];
    const Index hi = cc.offsets[j + 1];
    Index picked = 1;
    double prev = std::floor(cum[lo] / eps);
    for (Index i = lo + 1; i < hi; ++i) {
      const double interval = std::floor(cum[i] / eps);
      picked += interval != prev;
      prev = interval;
    }
    counts[j + 1] = picked;
  }, 256);

  Selection sel;
  sel.offsets.resize(m + 1);
  std::partial_sum(counts.begin(), counts.end(), sel.offsets.begin());
  sel.indices.resize(sel.offsets[m]);
  internal::parallel_for(m, [&](std::size_t j) {
    const Index lo = cc.offsets[j];
    const Index hi = cc.offsets[j + 1];
    Index* out = sel.indices.data() + sel.offsets[j];
    *out++ = lo;
    double prev = std::floor(cum[lo] / eps);
    for (Index i = lo + 1; i < hi; ++i) {
      const double interval = std::floor(cum[i] / eps);
      if (interval != prev) *out++ = i;
      prev = interval;
    }
  }, 256);
  return sel;
}

Neighborhoods group_curve(const CurveCloud& cc, const GeodesicTable& g,
                          std::span<const Index> centroids,
                          const GroupingConfig& cfg) {
  count_op(Op::kGroupCurve);
  check_structure(cc);
  check_geodesics(cc, g);
  if (!(cfg.radius > 0.0)) throw InvalidInput("radius must be positive");
  if (cfg.max_neighbors && *cfg.max_neighbors == 0) {
    throw InvalidInput("max_neighbors must be at least 1");
  }
  for (Index c : centroids) {
    if (c >= cc.num_points()) throw InvalidInput("centroid out of range");
  }

  const double r = cfg.radius;
  const auto& cum = g.cumlen;
  const std::size_t cap =
      cfg.max_neighbors.value_or(std::numeric_limits<std::size_t>::max());

  // Each neighborhood is a window [first, last) of point indices.
  std::vector<Index> first(centroids.size());
  std::vector<Index> last(centroids.size());
  internal::parallel_for(centroids.size(), [&](std::size_t q) {
    const Index c = centroids[q];
    const Index j = curve_of(cc, c);
    Index lo = cc.offsets[j];
    Index hi = cc.offsets[j + 1];
    if (cap != std::numeric_limits<std::size_t>::max()) {
      if (c - lo >= cap) lo = static_cast<Index>(c - cap + 1);
      if (hi - c > cap) hi = static_cast<Index>(c + cap);
    }
    const double center = cum[c];
    // cumlen is nondecreasing, so both predicates hold on a prefix.
    Index left =
        first_false(lo, c, [&](Index k) { return center - cum[k] >= r; });
    Index right =
        first_false(c + 1, hi, [&](Index k) { return cum[k] - center < r; });
    while (right - left > cap) {
      if (center - cum[left] > cum[right - 1] - center) {
        ++left;
      } else {
        --right;
      }
    }
    first[q] = left;
    last[q] = right;
  });

  Neighborhoods nb;
  nb.offsets.resize(centroids.size() + 1);
  nb.offsets[0] = 0;
  for (std::size_t q = 0; q < centroids.size(); ++q) {
    nb.offsets[q + 1] = nb.offsets[q] + (last[q] - first[q]);
  }
  nb.members.resize(nb.offsets.back());
  internal::parallel_for(centroids.size(), [&](std::size_t q) {
    std::iota(nb.members.begin() + nb.offsets[q],
              nb.members.begin() + nb.offsets[q + 1], first[q]);
  });
  return nb;
}

FeatureMap interpolate_curve(const CurveCloud& cc_hi, const GeodesicTable& g_hi,
                             const Selection& selection,
                             const FeatureMap& feats_lo) {
  count_op(Op::kInterpolateCurve);
  check_structure(cc_hi);
  check_geodesics(cc_hi, g_hi);
  const std::size_t m = cc_hi.num_curves();
  if (selection.offsets.size() != m + 1 ||
      selection.offsets.back() != selection.indices.size()) {
    throw InvalidInput("selection does not match the curve cloud");
  }
  if (feats_lo.rows() != selection.size()) {
    throw InvalidInput("low-resolution features do not match the selection");
  }
  for (std::size_t j = 0; j < m; ++j) {
    const auto picks = selection.curve(j);
    if (picks.empty()) {
      throw InvalidInput("curve " + std::to_string(j) + " has no selected point");
    }
    for (std::size_t k = 0; k < picks.size(); ++k) {
      if (picks[k] < cc_hi.curve_begin(j) || picks[k] >= cc_hi.curve_end(j) ||
          (k > 0 && picks[k] <= picks[k - 1])) {
        throw InvalidInput("selection indices of curve " + std::to_string(j) +
                           " must be ascending and on that curve");
      }
    }
  }

  const std::size_t d = feats_lo.cols();
  const auto& cum = g_hi.cumlen;
  FeatureMap out(cc_hi.num_points(), d);
  internal::parallel_for(m, [&](std::size_t j) {
    const auto picks = selection.curve(j);
    const std::size_t base = selection.offsets[j];
    std::size_t a = 0;  // last pick at or before the current point
    for (Index h = cc_hi.curve_begin(j); h < cc_hi.curve_end(j); ++h) {
      while (a + 1 < picks.size() && picks[a + 1] <= h) ++a;
      auto dst = out.row(h);
      if (h <= picks[a] || a + 1 == picks.size()) {
        // Before the first pick, on a pick, or past the last pick.
        const auto src = feats_lo.row(base + a);
        std::copy(src.begin(), src.end(), dst.begin());
        continue;
      }
      const double d_prev = cum[h] - cum[picks[a]];
      const double d_next = cum[picks[a + 1]] - cum[h];
      const double total = d_prev + d_next;
      const double t = total > 0.0 ? d_prev / total : 0.0;
      const auto ga = feats_lo.row(base + a);
      const auto gb = feats_lo.row(base + a + 1);
      for (std::size_t c = 0; c < d; ++c) {
        dst[c] = ga[c] + t * (gb[c] - ga[c]);
      }
    }
  });
  return out;
}

FeatureMap gradient_features(const CurveCloud& cc, const FeatureMap& feats) {
  count_op(Op::kGradientFeatures);
  check_structure(cc);
  check_features(cc, feats);
  const std::size_t d = feats.cols();
  FeatureMap out(feats.rows(), d);
  internal::parallel_for(cc.num_curves(), [&](std::size_t j) {
    const Index lo = cc.curve_begin(j);
    const Index hi = cc.curve_end(j);
    if (hi - lo < 2) return;
    for (Index i = lo; i < hi; ++i) {
      const auto dst = out.row(i);
      if (i == lo || i + 1 == hi) {
        const auto a = feats.row(i == lo ? lo : i - 1);
        const auto b = feats.row(i == lo ? lo + 1 : i);
        for (std::size_t c = 0; c < d; ++c) dst[c] = std::abs(b[c] - a[c]);
      } else {
        const auto a = feats.row(i - 1);
        const auto b = feats.row(i + 1);
        for (std::size_t c = 0; c < d; ++c) {
          dst[c] = std::abs((b[c] - a[c]) / 2.0);
        }
      }
    }
  });
  return out;
}

FeatureMap conv_symmetric(const CurveCloud& cc, const FeatureMap& feats,
                          const SymmetricKernel& kernel) {
  count_op(Op::kConvSymmetric);
  check_structure(cc);
  check_features(cc, feats);
  if (kernel.in_channels() != 2 * feats.cols()) {
    throw InvalidInput("kernel expects " + std::to_string(kernel.in_channels()) +
                       " input channels, features plus gradients give " +
                       std::to_string(2 * feats.cols()));
  }
  const FeatureMap input = concat_columns(feats, gradient_features(cc, feats));
  const std::size_t in = kernel.in_channels();
  const std::size_t out_ch = kernel.out_channels();
  const std::size_t pad = kernel.size() / 2;
  const auto w = kernel.stored_weights();
  const auto bias = kernel.bias();

  FeatureMap out(feats.rows(), out_ch);
  internal::parallel_for(cc.num_curves(), [&](std::size_t j) {
    const std::int64_t lo = cc.curve_begin(j);
    const std::int64_t hi = cc.curve_end(j);
    std::vector<double> pair(in);
    std::vector<double> acc(out_ch);
    for (std::int64_t i = lo; i < hi; ++i) {
      std::fill(acc.begin(), acc.end(), 0.0);
      for (std::size_t t = 0; t <= pad; ++t) {
        const auto offset = static_cast<std::int64_t>(pad - t);
        const auto before = input.row(std::max(lo, i - offset));
        const auto after = input.row(std::min(hi - 1, i + offset));
        // Mirrored taps share a weight, so summing the two inputs first keeps
        // the result bitwise identical when the curve is reversed.
        if (offset == 0) {
          std::copy(before.begin(), before.end(), pair.begin());
        } else {
          for (std::size_t c = 0; c < in; ++c) pair[c] = before[c] + after[c];
        }
        const double* wt = w.data() + t * in * out_ch;
        for (std::size_t c = 0; c < in; ++c) {
          const double v = pair[c];
          const double* wc = wt + c * out_ch;
          for (std::size_t o = 0; o < out_ch; ++o) acc[o] += v * wc[o];
        }
      }
      auto dst = out.row(static_cast<std::size_t>(i));
      for (std::size_t o = 0; o < out_ch; ++o) dst[o] = acc[o] + bias[o];
    }
  });
  return out;
}

}  // namespace curvecloud
