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

#ifndef CURVECLOUD_INSTRUMENTATION_HPP_
#define CURVECLOUD_INSTRUMENTATION_HPP_

#include <array>
#include <cstdint>
#include <string_view>

namespace curvecloud {

// Per-operation invocation counters, used to check which code paths a
// backbone configuration actually exercises.
enum class Op : int {
  kGeodesicLengths,
  kFps1d,
  kGroupCurve,
  kInterpolateCurve,
  kGradientFeatures,
  kConvSymmetric,
  kFpsEuclidean,
  kGroupBall3d,
  kKnn,
  kCount,
};

inline constexpr std::size_t kNumOps = static_cast<std::size_t>(Op::kCount);

using OpCounts = std::array<std::uint64_t, kNumOps>;

std::string_view op_name(Op op);
void count_op(Op op);
OpCounts op_counts();
void reset_op_counts();

}  // namespace curvecloud

#endif  // CURVECLOUD_INSTRUMENTATION_HPP_
