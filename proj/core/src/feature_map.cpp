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

#include "curvecloud/feature_map.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace curvecloud {

FeatureMap::FeatureMap(std::size_t rows, std::size_t cols,
                       std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows * cols) {
    throw InvalidInput("feature map needs " + std::to_string(rows * cols) +
                       " values, got " + std::to_string(values_.size()));
  }
}

bool all_finite(const FeatureMap& f) {
  return std::all_of(f.values().begin(), f.values().end(),
                     [](double v) { return std::isfinite(v); });
}

FeatureMap concat_columns(const FeatureMap& a, const FeatureMap& b) {
  if (a.rows() != b.rows()) {
    throw InvalidInput("cannot concatenate feature maps with " +
                       std::to_string(a.rows()) + " and " +
                       std::to_string(b.rows()) + " rows");
  }
  FeatureMap out(a.rows(), a.cols() + b.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    auto dst = out.row(r);
    std::copy(a.row(r).begin(), a.row(r).end(), dst.begin());
    std::copy(b.row(r).begin(), b.row(r).end(), dst.begin() + a.cols());
  }
  return out;
}

FeatureMap gather_rows(const FeatureMap& f, std::span<const Index> rows) {
  FeatureMap out(rows.size(), f.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] >= f.rows()) throw InvalidInput("gather_rows index out of range");
    std::copy(f.row(rows[r]).begin(), f.row(rows[r]).end(),
              out.row(r).begin());
  }
  return out;
}

FeatureMap positions_as_features(std::span<const Vec3> points) {
  FeatureMap out(points.size(), 3);
  for (std::size_t i = 0; i < points.size(); ++i) {
    out(i, 0) = points[i].x;
    out(i, 1) = points[i].y;
    out(i, 2) = points[i].z;
  }
  return out;
}

}  // namespace curvecloud
