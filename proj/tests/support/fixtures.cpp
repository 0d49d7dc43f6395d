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

#include "fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace curvecloud::testing {

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::size_t uniform_index(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

PointCloud random_beam_stream(Rng& rng, std::size_t max_points,
                              std::uint32_t max_beams) {
  PointCloud pc;
  pc.beam_count = static_cast<std::uint32_t>(uniform_index(rng, 1, max_beams));
  const std::size_t n = uniform_index(rng, 0, max_points);
  std::vector<Vec3> walk(pc.beam_count + 1);
  for (auto& w : walk) w = Vec3{uniform(rng, -5, 5), uniform(rng, -5, 5), uniform(rng, -1, 1)};
  std::vector<double> time(pc.beam_count + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto b = static_cast<std::uint32_t>(uniform_index(rng, 1, pc.beam_count));
    Vec3& w = walk[b];
    const double step = uniform(rng, 0.0, 1.0) < 0.1 ? 1.0 : 0.05;
    w += Vec3{uniform(rng, -step, step), uniform(rng, -step, step),
              uniform(rng, -step, step)};
    // Timestamps are mostly increasing but arrive out of order and sometimes
    // repeat.
    if (uniform(rng, 0.0, 1.0) > 0.1) time[b] += uniform(rng, 0.5, 2.0);
    const double jitter = uniform(rng, 0.0, 1.0) < 0.2 ? -uniform(rng, 0.0, 3.0) : 0.0;
    pc.push_back(w, std::max(0.0, time[b] + jitter), b);
  }
  return pc;
}

CurveCloud random_curves(Rng& rng, std::size_t max_curves, std::size_t max_points,
                         double min_edge, double max_edge) {
  CurveCloud cc;
  const std::size_t m = uniform_index(rng, 1, max_curves);
  for (std::size_t j = 0; j < m; ++j) {
    const std::size_t n = uniform_index(rng, 1, max_points);
    Vec3 p{uniform(rng, -3, 3), uniform(rng, -3, 3), uniform(rng, -3, 3)};
    Vec3 dir{1.0, 0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
      cc.positions.push_back(p);
      // Random heading drift, unit direction scaled to the edge length.
      dir += Vec3{uniform(rng, -0.5, 0.5), uniform(rng, -0.5, 0.5), uniform(rng, -0.5, 0.5)};
      dir = dir / norm(dir);
      p += uniform(rng, min_edge, max_edge) * dir;
    }
    cc.offsets.push_back(static_cast<Index>(cc.positions.size()));
    cc.source_beam.push_back(static_cast<std::uint32_t>(j % 4 + 1));
  }
  return cc;
}

CurveCloud straight_curve(std::size_t n, double step, double x0) {
  CurveCloud cc;
  for (std::size_t i = 0; i < n; ++i) {
    cc.positions.push_back(Vec3{x0 + static_cast<double>(i) * step, 0.0, 0.0});
  }
  cc.offsets.push_back(static_cast<Index>(n));
  cc.source_beam.push_back(1);
  return cc;
}

FeatureMap random_features(Rng& rng, std::size_t rows, std::size_t cols,
                           double scale) {
  FeatureMap f(rows, cols);
  for (double& v : f.values()) v = uniform(rng, -scale, scale);
  return f;
}

std::vector<Vec3> random_points(Rng& rng, std::size_t n, double extent) {
  std::vector<Vec3> pts(n);
  for (auto& p : pts) {
    p = Vec3{uniform(rng, -extent, extent), uniform(rng, -extent, extent),
             uniform(rng, -extent, extent)};
  }
  return pts;
}

namespace {
void randomize(Rng& rng, BatchNorm& bn) {
  for (auto& v : bn.mean) v = uniform(rng, -0.2, 0.2);
  for (auto& v : bn.variance) v = uniform(rng, 0.5, 2.0);
  for (auto& v : bn.scale) v = uniform(rng, 0.5, 1.5);
  for (auto& v : bn.shift) v = uniform(rng, -0.2, 0.2);
}
}  // namespace

void randomize_norms(Rng& rng, MlpParams& mlp) {
  for (auto& l : mlp.layers) {
    if (l.norm) randomize(rng, *l.norm);
  }
}

void randomize_norms(Rng& rng, CurveConvBlockParams& conv) {
  for (auto& bn : conv.norms) randomize(rng, bn);
}

std::vector<Index> permuted_rows(const CurveCloud& cc,
                                 const std::vector<std::size_t>& perm) {
  std::vector<Index> rows;
  for (std::size_t j : perm) {
    for (Index i = cc.curve_begin(j); i < cc.curve_end(j); ++i) rows.push_back(i);
  }
  return rows;
}

CurveCloud permute_curves(const CurveCloud& cc, const std::vector<std::size_t>& perm) {
  CurveCloud out;
  for (std::size_t j : perm) {
    for (Index i = cc.curve_begin(j); i < cc.curve_end(j); ++i) {
      out.positions.push_back(cc.positions[i]);
    }
    out.offsets.push_back(static_cast<Index>(out.positions.size()));
    out.source_beam.push_back(cc.source_beam[j]);
  }
  return out;
}

std::vector<Index> reversed_rows(const CurveCloud& cc) {
  std::vector<Index> rows;
  for (std::size_t j = 0; j < cc.num_curves(); ++j) {
    for (Index i = cc.curve_end(j); i > cc.curve_begin(j); --i) rows.push_back(i - 1);
  }
  return rows;
}

CurveCloud reverse_curves(const CurveCloud& cc) {
  CurveCloud out = cc;
  const auto rows = reversed_rows(cc);
  for (std::size_t r = 0; r < rows.size(); ++r) out.positions[r] = cc.positions[rows[r]];
  return out;
}

FeatureMap take_rows(const FeatureMap& f, const std::vector<Index>& rows) {
  FeatureMap out(rows.size(), f.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto src = f.row(rows[r]);
    std::copy(src.begin(), src.end(), out.row(r).begin());
  }
  return out;
}

double relative_error(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("shape mismatch");
  double diff = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!std::isfinite(a[i]) || !std::isfinite(b[i])) {
      return std::numeric_limits<double>::infinity();
    }
    diff = std::max(diff, std::abs(a[i] - b[i]));
    scale = std::max(scale, std::abs(b[i]));
  }
  return scale > 0.0 ? diff / scale : diff;
}

double relative_error(const FeatureMap& a, const FeatureMap& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    return std::numeric_limits<double>::infinity();
  }
  return relative_error(std::vector<double>(a.values().begin(), a.values().end()),
                        std::vector<double>(b.values().begin(), b.values().end()));
}

}  // namespace curvecloud::testing
