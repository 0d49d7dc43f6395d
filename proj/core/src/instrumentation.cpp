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

#include "curvecloud/instrumentation.hpp"

#include <atomic>

namespace curvecloud {
namespace {

std::array<std::atomic<std::uint64_t>, kNumOps>& counters() {
  static std::array<std::atomic<std::uint64_t>, kNumOps> c{};
  return c;
}

}  // namespace

std::string_view op_name(Op op) {
  switch (op) {
    case Op::kGeodesicLengths: return "geodesic_lengths";
    case Op::kFps1d: return "fps_1d";
    case Op::kGroupCurve: return "group_curve";
    case Op::kInterpolateCurve: return "interpolate_curve";
    case Op::kGradientFeatures: return "gradient_features";
    case Op::kConvSymmetric: return "conv_symmetric";
    case Op::kFpsEuclidean: return "fps_euclidean";
    case Op::kGroupBall3d: return "group_ball3d";
    case Op::kKnn: return "knn";
    case Op::kCount: break;
  }
  return "unknown";
}

void count_op(Op op) {
  counters()[static_cast<std::size_t>(op)].fetch_add(
      1, std::memory_order_relaxed);
}

OpCounts op_counts() {
  OpCounts out{};
  for (std::size_t i = 0; i < kNumOps; ++i) {
    out[i] = counters()[i].load(std::memory_order_relaxed);
  }
  return out;
}

void reset_op_counts() {
  for (auto& c : counters()) c.store(0, std::memory_order_relaxed);
}

}  // namespace curvecloud
