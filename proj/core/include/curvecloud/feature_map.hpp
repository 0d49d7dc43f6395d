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

#ifndef CURVECLOUD_FEATURE_MAP_HPP_
#define CURVECLOUD_FEATURE_MAP_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "curvecloud/common.hpp"

namespace curvecloud {

// Row-major rows x cols matrix of per-point features. Row i belongs to point i
// of whatever cloud the map is paired with.
class FeatureMap {
 public:
  FeatureMap() = default;
  FeatureMap(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), values_(rows * cols, fill) {}
  FeatureMap(std::size_t rows, std::size_t cols, std::vector<double> values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0; }

  double& operator()(std::size_t r, std::size_t c) {
    return values_[r * cols_ + c];
  }
  double operator()(std::size_t r, std::size_t c) const {
    return values_[r * cols_ + c];
  }

  std::span<double> row(std::size_t r) {
    return std::span<double>(values_).subspan(r * cols_, cols_);
  }
  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(values_).subspan(r * cols_, cols_);
  }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  friend bool operator==(const FeatureMap&, const FeatureMap&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

bool all_finite(const FeatureMap& f);

// [a | b], row by row.
FeatureMap concat_columns(const FeatureMap& a, const FeatureMap& b);

FeatureMap gather_rows(const FeatureMap& f, std::span<const Index> rows);

// Positions as a three-column map.
FeatureMap positions_as_features(std::span<const Vec3> points);

}  // namespace curvecloud

#endif  // CURVECLOUD_FEATURE_MAP_HPP_
