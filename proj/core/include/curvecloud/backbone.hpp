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

#ifndef CURVECLOUD_BACKBONE_HPP_
#define CURVECLOUD_BACKBONE_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "curvecloud/curve_cloud.hpp"
#include "curvecloud/feature_map.hpp"
#include "curvecloud/layers.hpp"

namespace curvecloud {

enum class StageKind { kCurve, kPoint };

// One downsampling stage of the encoder.
//   curve: Curve SA (fps_1d + curve grouping) then an optional conv block.
//   point: Point SA (Euclidean FPS + ball query) then a graph convolution.
struct EncoderStage {
  StageKind kind = StageKind::kCurve;
  std::size_t width = 32;
  double radius = 0.1;
  std::size_t max_neighbors = 16;
  double epsilon = 0.05;      // curve stages
  std::size_t kernel_size = 3;  // curve stages
  bool conv = true;           // curve stages
  double sample_ratio = 0.25;  // point stages
  std::size_t k = 8;          // point stages, graph conv neighbors
};

// Upsampling stage d maps encoder level S - d to level S - d - 1 and merges
// the skip features of level `skip`, which must be S - d - 1.
struct DecoderStage {
  std::size_t width = 32;
  std::size_t skip = 0;
  bool conv = false;  // conv block after Curve FP (curve stages only)
};

enum class GroupingOp { kCurve, kBall3d };
enum class SamplingOp { kFps1d, kFpsEuclidean };
enum class ConvOp { kCurveConv, kNone };

// Swaps curve operations for their point-based counterparts.
struct Ablation {
  GroupingOp grouping = GroupingOp::kCurve;
  SamplingOp sampling = SamplingOp::kFps1d;
  ConvOp conv = ConvOp::kCurveConv;

  friend bool operator==(const Ablation&, const Ablation&) = default;
};

struct BackboneConfig {
  std::size_t in_channels = 3;
  std::size_t num_classes = 8;
  std::vector<EncoderStage> encoder;
  std::vector<DecoderStage> decoder;
  std::size_t head_width = 32;
  std::size_t point_fp_k = 3;
  Ablation ablation;
};

// Throws ConfigError unless stage counts match, widths are positive, skips
// point at the matching level and no curve stage follows a point stage.
void check_config(const BackboneConfig& cfg);

// Two curve stages and one point stage, widths 32/64/128, tuned for the
// default simulator scenes (object at a few meters, ~1 cm sample spacing).
BackboneConfig toy_profile(std::size_t num_classes = 8);
// Deeper profile with wider layers for road-scale scans.
BackboneConfig production_profile(std::size_t num_classes = 20);

BackboneConfig parse_backbone_config(std::string_view json_text);
std::string backbone_config_to_json(const BackboneConfig& cfg);

enum class AblationSwitch { kGrouping, kSampling, kConv };

// Accepts "grouping", "sampling" (alias "fps") and "conv"; throws ConfigError
// otherwise.
AblationSwitch parse_ablation_switch(std::string_view name);

BackboneConfig ablate(BackboneConfig cfg, AblationSwitch which);

struct CurveStageParams {
  CurveSaParams sa;
  CurveConvBlockParams conv;
};

struct PointStageParams {
  PointSaParams sa;
  GraphConvParams graph;
};

using EncoderStageParams = std::variant<CurveStageParams, PointStageParams>;

struct DecoderStageParams {
  MlpParams fp;
  std::optional<CurveConvBlockParams> conv;
};

struct BackboneParams {
  std::vector<EncoderStageParams> encoder;
  std::vector<DecoderStageParams> decoder;
  MlpParams head;  // last layer is linear without normalization
};

// Same seed, same config -> bitwise-identical parameters. Parameters do not
// depend on the ablation switches, so one set serves every ablated variant.
BackboneParams init_backbone_params(const BackboneConfig& cfg,
                                    std::uint64_t seed);

// Throws ConfigError if any tensor shape differs from what `cfg` expects.
void check_params(const BackboneConfig& cfg, const BackboneParams& params);

struct SegmentationOutput {
  FeatureMap logits;                 // N x num_classes
  std::vector<std::uint32_t> labels;  // argmax, ties to the lowest class
};

// Raw xyz, one row per point.
FeatureMap default_input_features(const CurveCloud& cc);

std::vector<std::uint32_t> argmax_labels(const FeatureMap& logits);

SegmentationOutput forward(const CurveCloud& cc, const GeodesicTable& g,
                           const FeatureMap& input_feats,
                           const BackboneConfig& cfg,
                           const BackboneParams& params);

}  // namespace curvecloud

#endif  // CURVECLOUD_BACKBONE_HPP_
