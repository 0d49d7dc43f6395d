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

#include "curvecloud/backbone.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <span>
#include <string>

#include "curvecloud/curve_ops.hpp"
#include "curvecloud/point_ops.hpp"

namespace curvecloud {
namespace {

using nlohmann::json;

constexpr std::uint64_t kSeedStride = 0x9E3779B97F4A7C15ull;

std::uint64_t layer_seed(std::uint64_t seed, std::uint64_t ordinal) {
  return seed + (ordinal + 1) * kSeedStride;
}

// One resolution of the U-Net.
struct Level {
  bool curve = true;
  CurveCloud cloud;         // curve levels
  std::vector<Vec3> points;  // point levels
  std::optional<GeodesicTable> geodesics;
  std::optional<Selection> selection;  // set when produced by fps_1d
  FeatureMap feats;

  std::span<const Vec3> positions() const {
    return curve ? std::span<const Vec3>(cloud.positions)
                 : std::span<const Vec3>(points);
  }
  const GeodesicTable& geodesic() {
    if (!geodesics) geodesics = geodesic_lengths(cloud);
    return *geodesics;
  }
};

// Centroid budget for Euclidean sampling that matches what fps_1d would pick
// on densely sampled curves.
std::size_t matched_sample_count(const CurveCloud& cc, double epsilon) {
  std::size_t total = 0;
  for (std::size_t j = 0; j < cc.num_curves(); ++j) {
    double length = 0.0;
    for (Index i = cc.curve_begin(j) + 1; i < cc.curve_end(j); ++i) {
      length += distance(cc.positions[i - 1], cc.positions[i]);
    }
    total += static_cast<std::size_t>(std::floor(length / epsilon)) + 1;
  }
  return std::clamp<std::size_t>(total, 1, cc.num_points());
}

struct ChannelPlan {
  std::vector<std::size_t> level;  // channels at each encoder level
  std::vector<std::size_t> decoder_in;
};

ChannelPlan plan_channels(const BackboneConfig& cfg) {
  ChannelPlan plan;
  plan.level.push_back(cfg.in_channels);
  for (const auto& s : cfg.encoder) plan.level.push_back(s.width);
  std::size_t cur = plan.level.back();
  for (const auto& d : cfg.decoder) {
    plan.decoder_in.push_back(cur);
    cur = d.width;
  }
  return plan;
}

const char* kind_name(StageKind k) {
  return k == StageKind::kCurve ? "curve" : "point";
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

void require_shape(const DenseLayer& l, std::size_t in, std::size_t out,
                   bool norm, const std::string& where) {
  if (l.in_channels() != in || l.out_channels() != out ||
      l.bias.size() != out || l.norm.has_value() != norm ||
      (norm && l.norm->channels() != out)) {
    throw ConfigError(where + ": expected " + std::to_string(out) + "x" +
                      std::to_string(in) + " layer, got " +
                      std::to_string(l.out_channels()) + "x" +
                      std::to_string(l.in_channels()));
  }
}

void require_mlp(const MlpParams& mlp, std::size_t in,
                 std::span<const std::size_t> widths, const std::string& where) {
  if (mlp.layers.size() != widths.size()) {
    throw ConfigError(where + ": expected " + std::to_string(widths.size()) +
                      " layers, got " + std::to_string(mlp.layers.size()));
  }
  for (std::size_t i = 0; i < widths.size(); ++i) {
    require_shape(mlp.layers[i], in, widths[i], true,
                  where + " layer " + std::to_string(i));
    in = widths[i];
  }
  check_mlp(mlp);
}

void require_pool(const AttentivePoolParams& pool, std::size_t width,
                  const std::string& where) {
  require_shape(pool.score, width, width, false, where + " pool");
}

void require_conv(const CurveConvBlockParams& conv, std::size_t in,
                  std::size_t width, std::size_t size,
                  const std::string& where) {
  for (std::size_t s = 0; s < 3; ++s) {
    const auto& k = conv.kernels[s];
    if (k.size() != size || k.in_channels() != 2 * in ||
        k.out_channels() != width || conv.norms[s].channels() != width) {
      throw ConfigError(where + " conv " + std::to_string(s) +
                        ": kernel shape mismatch");
    }
    in = width;
  }
}

}  // namespace

void check_config(const BackboneConfig& cfg) {
  if (cfg.in_channels == 0) throw ConfigError("in_channels must be positive");
  if (cfg.num_classes == 0) throw ConfigError("num_classes must be positive");
  if (cfg.head_width == 0) throw ConfigError("head_width must be positive");
  if (cfg.point_fp_k == 0) throw ConfigError("point_fp_k must be positive");
  if (cfg.encoder.empty()) throw ConfigError("encoder has no stages");
  if (cfg.decoder.size() != cfg.encoder.size()) {
    throw ConfigError("encoder has " + std::to_string(cfg.encoder.size()) +
                      " stages but decoder has " +
                      std::to_string(cfg.decoder.size()));
  }
  bool seen_point = false;
  for (std::size_t s = 0; s < cfg.encoder.size(); ++s) {
    const EncoderStage& st = cfg.encoder[s];
    const std::string where = "encoder stage " + std::to_string(s);
    if (st.width == 0) throw ConfigError(where + ": width must be positive");
    if (!(st.radius > 0.0)) throw ConfigError(where + ": radius must be positive");
    if (st.max_neighbors == 0) {
      throw ConfigError(where + ": max_neighbors must be positive");
    }
    if (st.kind == StageKind::kCurve) {
      if (seen_point) {
        throw ConfigError(where + ": curve stages must precede point stages");
      }
      if (!(st.epsilon > 0.0)) {
        throw ConfigError(where + ": epsilon must be positive");
      }
      if (st.kernel_size == 0 || st.kernel_size % 2 == 0) {
        throw ConfigError(where + ": kernel_size must be odd");
      }
    } else {
      seen_point = true;
      if (!(st.sample_ratio > 0.0 && st.sample_ratio <= 1.0)) {
        throw ConfigError(where + ": sample_ratio must lie in (0, 1]");
      }
      if (st.k == 0) throw ConfigError(where + ": k must be positive");
    }
  }
  const std::size_t depth = cfg.encoder.size();
  for (std::size_t d = 0; d < depth; ++d) {
    const DecoderStage& st = cfg.decoder[d];
    const std::string where = "decoder stage " + std::to_string(d);
    if (st.width == 0) throw ConfigError(where + ": width must be positive");
    if (st.skip != depth - 1 - d) {
      throw ConfigError(where + ": skip must reference level " +
                        std::to_string(depth - 1 - d));
    }
    if (st.conv && cfg.encoder[depth - 1 - d].kind != StageKind::kCurve) {
      throw ConfigError(where + ": conv blocks need a curve level");
    }
  }
}

BackboneConfig toy_profile(std::size_t num_classes) {
  BackboneConfig cfg;
  cfg.num_classes = num_classes;
  EncoderStage c1;
  c1.kind = StageKind::kCurve;
  c1.width = 32;
  c1.epsilon = 0.04;
  c1.radius = 0.08;
  EncoderStage c2 = c1;
  c2.width = 64;
  c2.epsilon = 0.16;
  c2.radius = 0.32;
  EncoderStage p3;
  p3.kind = StageKind::kPoint;
  p3.width = 128;
  p3.radius = 0.6;
  p3.sample_ratio = 0.25;
  p3.k = 8;
  cfg.encoder = {c1, c2, p3};
  cfg.decoder = {DecoderStage{64, 2, false}, DecoderStage{32, 1, true},
                 DecoderStage{32, 0, false}};
  cfg.head_width = 32;
  return cfg;
}

BackboneConfig production_profile(std::size_t num_classes) {
  BackboneConfig cfg;
  cfg.num_classes = num_classes;
  const double eps[] = {0.1, 0.3};
  const std::size_t widths[] = {64, 128};
  for (std::size_t s = 0; s < 2; ++s) {
    EncoderStage c;
    c.kind = StageKind::kCurve;
    c.width = widths[s];
    c.epsilon = eps[s];
    c.radius = 2.0 * eps[s];
    c.max_neighbors = 32;
    cfg.encoder.push_back(c);
  }
  const double radii[] = {1.5, 3.0};
  const std::size_t pwidths[] = {256, 512};
  for (std::size_t s = 0; s < 2; ++s) {
    EncoderStage p;
    p.kind = StageKind::kPoint;
    p.width = pwidths[s];
    p.radius = radii[s];
    p.sample_ratio = 0.25;
    p.k = 16;
    p.max_neighbors = 32;
    cfg.encoder.push_back(p);
  }
  cfg.decoder = {DecoderStage{256, 3, false}, DecoderStage{128, 2, false},
                 DecoderStage{128, 1, true}, DecoderStage{64, 0, true}};
  cfg.head_width = 64;
  return cfg;
}

BackboneConfig parse_backbone_config(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("backbone config is not valid JSON: ") +
                      e.what());
  }
  BackboneConfig cfg;
  try {
    cfg.in_channels = get_or<std::size_t>(j, "in_channels", cfg.in_channels);
    cfg.num_classes = get_or<std::size_t>(j, "num_classes", cfg.num_classes);
    cfg.head_width = get_or<std::size_t>(j, "head_width", cfg.head_width);
    cfg.point_fp_k = get_or<std::size_t>(j, "point_fp_k", cfg.point_fp_k);
    for (const auto& e : j.at("encoder")) {
      EncoderStage s;
      const auto kind = e.at("kind").get<std::string>();
      if (kind == "curve") {
        s.kind = StageKind::kCurve;
      } else if (kind == "point") {
        s.kind = StageKind::kPoint;
      } else {
        throw ConfigError("unknown encoder stage kind '" + kind + "'");
      }
      s.width = e.at("width").get<std::size_t>();
      s.radius = e.at("radius").get<double>();
      s.max_neighbors = get_or<std::size_t>(e, "max_neighbors", s.max_neighbors);
      if (s.kind == StageKind::kCurve) {
        s.epsilon = e.at("epsilon").get<double>();
        s.kernel_size = get_or<std::size_t>(e, "kernel_size", s.kernel_size);
        s.conv = get_or<bool>(e, "conv", s.conv);
      } else {
        s.sample_ratio = get_or<double>(e, "sample_ratio", s.sample_ratio);
        s.k = get_or<std::size_t>(e, "k", s.k);
      }
      cfg.encoder.push_back(s);
    }
    for (const auto& e : j.at("decoder")) {
      DecoderStage d;
      d.width = e.at("width").get<std::size_t>();
      d.skip = e.at("skip").get<std::size_t>();
      d.conv = get_or<bool>(e, "conv", false);
      cfg.decoder.push_back(d);
    }
    if (j.contains("ablation")) {
      const auto& a = j.at("ablation");
      const auto grouping = get_or<std::string>(a, "grouping", "curve");
      const auto sampling = get_or<std::string>(a, "sampling", "fps_1d");
      const auto conv = get_or<std::string>(a, "conv", "curve_conv");
      if (grouping == "curve") {
        cfg.ablation.grouping = GroupingOp::kCurve;
      } else if (grouping == "ball3d") {
        cfg.ablation.grouping = GroupingOp::kBall3d;
      } else {
        throw ConfigError("unknown grouping op '" + grouping + "'");
      }
      if (sampling == "fps_1d") {
        cfg.ablation.sampling = SamplingOp::kFps1d;
      } else if (sampling == "fps_euclidean") {
        cfg.ablation.sampling = SamplingOp::kFpsEuclidean;
      } else {
        throw ConfigError("unknown sampling op '" + sampling + "'");
      }
      if (conv == "curve_conv") {
        cfg.ablation.conv = ConvOp::kCurveConv;
      } else if (conv == "none") {
        cfg.ablation.conv = ConvOp::kNone;
      } else {
        throw ConfigError("unknown conv op '" + conv + "'");
      }
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed backbone config: ") + e.what());
  }
  check_config(cfg);
  return cfg;
}

std::string backbone_config_to_json(const BackboneConfig& cfg) {
  json j;
  j["version"] = 1;
  j["in_channels"] = cfg.in_channels;
  j["num_classes"] = cfg.num_classes;
  j["head_width"] = cfg.head_width;
  j["point_fp_k"] = cfg.point_fp_k;
  j["encoder"] = json::array();
  for (const auto& s : cfg.encoder) {
    json e{{"kind", kind_name(s.kind)},
           {"width", s.width},
           {"radius", s.radius},
           {"max_neighbors", s.max_neighbors}};
    if (s.kind == StageKind::kCurve) {
      e["epsilon"] = s.epsilon;
      e["kernel_size"] = s.kernel_size;
      e["conv"] = s.conv;
    } else {
      e["sample_ratio"] = s.sample_ratio;
      e["k"] = s.k;
    }
    j["encoder"].push_back(e);
  }
  j["decoder"] = json::array();
  for (const auto& d : cfg.decoder) {
    j["decoder"].push_back({{"width", d.width}, {"skip", d.skip}, {"conv", d.conv}});
  }
  j["ablation"] = {
      {"grouping",
       cfg.ablation.grouping == GroupingOp::kCurve ? "curve" : "ball3d"},
      {"sampling",
       cfg.ablation.sampling == SamplingOp::kFps1d ? "fps_1d" : "fps_euclidean"},
      {"conv", cfg.ablation.conv == ConvOp::kCurveConv ? "curve_conv" : "none"}};
  return j.dump(2);
}

AblationSwitch parse_ablation_switch(std::string_view name) {
  if (name == "grouping") return AblationSwitch::kGrouping;
  if (name == "sampling" || name == "fps") return AblationSwitch::kSampling;
  if (name == "conv") return AblationSwitch::kConv;
  throw ConfigError("unknown ablation switch '" + std::string(name) +
                    "' (expected grouping, sampling or conv)");
}

BackboneConfig ablate(BackboneConfig cfg, AblationSwitch which) {
  switch (which) {
    case AblationSwitch::kGrouping:
      cfg.ablation.grouping = GroupingOp::kBall3d;
      break;
    case AblationSwitch::kSampling:
      cfg.ablation.sampling = SamplingOp::kFpsEuclidean;
      break;
    case AblationSwitch::kConv:
      cfg.ablation.conv = ConvOp::kNone;
      break;
  }
  return cfg;
}

BackboneParams init_backbone_params(const BackboneConfig& cfg,
                                    std::uint64_t seed) {
  check_config(cfg);
  const ChannelPlan plan = plan_channels(cfg);
  BackboneParams params;
  std::uint64_t ordinal = 0;
  auto next_seed = [&] { return layer_seed(seed, ordinal++); };

  for (std::size_t s = 0; s < cfg.encoder.size(); ++s) {
    const EncoderStage& st = cfg.encoder[s];
    const std::size_t in = plan.level[s];
    LayerShape sa;
    sa.in_channels = in;
    sa.widths = {st.width, st.width};
    sa.radius = st.radius;
    sa.max_neighbors = st.max_neighbors;
    if (st.kind == StageKind::kCurve) {
      sa.kind = LayerKind::kCurveSa;
      sa.epsilon = st.epsilon;
      CurveStageParams p;
      p.sa = std::get<CurveSaParams>(init_params(sa, next_seed()));
      LayerShape conv;
      conv.kind = LayerKind::kCurveConvBlock;
      conv.in_channels = st.width;
      conv.widths = {st.width};
      conv.kernel_size = st.kernel_size;
      p.conv = std::get<CurveConvBlockParams>(init_params(conv, next_seed()));
      params.encoder.emplace_back(std::move(p));
    } else {
      sa.kind = LayerKind::kPointSa;
      sa.sample_ratio = st.sample_ratio;
      PointStageParams p;
      p.sa = std::get<PointSaParams>(init_params(sa, next_seed()));
      LayerShape graph;
      graph.kind = LayerKind::kGraphConv;
      graph.in_channels = st.width;
      graph.widths = {st.width};
      graph.k = st.k;
      p.graph = std::get<GraphConvParams>(init_params(graph, next_seed()));
      params.encoder.emplace_back(std::move(p));
    }
  }

  const std::size_t depth = cfg.encoder.size();
  for (std::size_t d = 0; d < depth; ++d) {
    const DecoderStage& st = cfg.decoder[d];
    const std::size_t level = depth - 1 - d;
    LayerShape fp;
    fp.kind = cfg.encoder[level].kind == StageKind::kCurve ? LayerKind::kCurveFp
                                                           : LayerKind::kPointFp;
    fp.in_channels = plan.decoder_in[d];
    fp.skip_channels = plan.level[level];
    fp.widths = {st.width};
    fp.k = cfg.point_fp_k;
    DecoderStageParams p;
    const LayerParams made = init_params(fp, next_seed());
    p.fp = fp.kind == LayerKind::kCurveFp ? std::get<CurveFpParams>(made).mlp
                                          : std::get<PointFpParams>(made).mlp;
    if (st.conv) {
      LayerShape conv;
      conv.kind = LayerKind::kCurveConvBlock;
      conv.in_channels = st.width;
      conv.widths = {st.width};
      conv.kernel_size = cfg.encoder[level].kernel_size;
      p.conv = std::get<CurveConvBlockParams>(init_params(conv, next_seed()));
    }
    params.decoder.push_back(std::move(p));
  }

  ParamRng rng(next_seed());
  const std::size_t last = cfg.decoder.back().width;
  params.head.layers.push_back(
      init_dense(last, cfg.head_width, Activation::kLeakyRelu, true, rng));
  params.head.layers.push_back(init_dense(cfg.head_width, cfg.num_classes,
                                          Activation::kIdentity, false, rng));
  return params;
}

void check_params(const BackboneConfig& cfg, const BackboneParams& params) {
  check_config(cfg);
  const ChannelPlan plan = plan_channels(cfg);
  if (params.encoder.size() != cfg.encoder.size() ||
      params.decoder.size() != cfg.decoder.size()) {
    throw ConfigError("parameter stage count does not match the config");
  }
  for (std::size_t s = 0; s < cfg.encoder.size(); ++s) {
    const EncoderStage& st = cfg.encoder[s];
    const std::string where = "encoder stage " + std::to_string(s);
    const std::size_t sa_widths[] = {st.width, st.width};
    if (st.kind == StageKind::kCurve) {
      const auto* p = std::get_if<CurveStageParams>(&params.encoder[s]);
      if (!p) throw ConfigError(where + ": expected curve stage parameters");
      require_mlp(p->sa.mlp, 3 + plan.level[s], sa_widths, where + " sa");
      require_pool(p->sa.pool, st.width, where + " sa");
      require_conv(p->conv, st.width, st.width, st.kernel_size, where);
      if (p->sa.epsilon != st.epsilon || p->sa.radius != st.radius ||
          p->sa.max_neighbors != std::optional<std::size_t>(st.max_neighbors)) {
        throw ConfigError(where + ": hyperparameters differ from the config");
      }
    } else {
      const auto* p = std::get_if<PointStageParams>(&params.encoder[s]);
      if (!p) throw ConfigError(where + ": expected point stage parameters");
      require_mlp(p->sa.mlp, 3 + plan.level[s], sa_widths, where + " sa");
      require_pool(p->sa.pool, st.width, where + " sa");
      const std::size_t g_widths[] = {st.width};
      require_mlp(p->graph.mlp, 2 * st.width, g_widths, where + " graph");
      require_pool(p->graph.pool, st.width, where + " graph");
      if (p->sa.radius != st.radius || p->sa.sample_ratio != st.sample_ratio ||
          p->sa.count != 0 ||
          p->sa.max_neighbors != std::optional<std::size_t>(st.max_neighbors) ||
          p->graph.k != st.k) {
        throw ConfigError(where + ": hyperparameters differ from the config");
      }
    }
  }
  const std::size_t depth = cfg.encoder.size();
  for (std::size_t d = 0; d < depth; ++d) {
    const DecoderStage& st = cfg.decoder[d];
    const std::size_t level = depth - 1 - d;
    const std::string where = "decoder stage " + std::to_string(d);
    const std::size_t widths[] = {st.width};
    require_mlp(params.decoder[d].fp, plan.decoder_in[d] + plan.level[level],
                widths, where + " fp");
    if (st.conv != params.decoder[d].conv.has_value()) {
      throw ConfigError(where + ": conv block presence differs from the config");
    }
    if (st.conv) {
      require_conv(*params.decoder[d].conv, st.width, st.width,
                   cfg.encoder[level].kernel_size, where);
    }
  }
  if (params.head.layers.size() != 2) {
    throw ConfigError("head must have two layers");
  }
  require_shape(params.head.layers[0], cfg.decoder.back().width, cfg.head_width,
                true, "head layer 0");
  require_shape(params.head.layers[1], cfg.head_width, cfg.num_classes, false,
                "head layer 1");
  check_mlp(params.head);
}

FeatureMap default_input_features(const CurveCloud& cc) {
  return positions_as_features(cc.positions);
}

std::vector<std::uint32_t> argmax_labels(const FeatureMap& logits) {
  std::vector<std::uint32_t> labels(logits.rows(), 0);
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    const auto row = logits.row(r);
    std::size_t best = 0;
    for (std::size_t c = 1; c < row.size(); ++c) {
      if (row[c] > row[best]) best = c;
    }
    labels[r] = static_cast<std::uint32_t>(best);
  }
  return labels;
}

SegmentationOutput forward(const CurveCloud& cc, const GeodesicTable& g,
                           const FeatureMap& input_feats,
                           const BackboneConfig& cfg,
                           const BackboneParams& params) {
  check_params(cfg, params);
  check_structure(cc);
  if (cc.num_points() == 0) throw InvalidInput("forward on an empty curve cloud");
  if (input_feats.rows() != cc.num_points()) {
    throw InvalidInput("input features have " +
                       std::to_string(input_feats.rows()) + " rows for " +
                       std::to_string(cc.num_points()) + " points");
  }
  if (input_feats.cols() != cfg.in_channels) {
    throw ConfigError("config expects " + std::to_string(cfg.in_channels) +
                      " input channels, features have " +
                      std::to_string(input_feats.cols()));
  }
  if (g.cumlen.size() != cc.num_points()) {
    throw InvalidInput("geodesic table does not match the curve cloud");
  }

  const Ablation& ab = cfg.ablation;
  const bool use_conv = ab.conv == ConvOp::kCurveConv;
  const std::size_t depth = cfg.encoder.size();

  std::vector<Level> levels(depth + 1);
  levels[0].cloud = cc;
  levels[0].geodesics = g;
  levels[0].feats = input_feats;

  for (std::size_t s = 0; s < depth; ++s) {
    const EncoderStage& st = cfg.encoder[s];
    Level& in = levels[s];
    Level& next = levels[s + 1];
    if (const auto* p = std::get_if<CurveStageParams>(&params.encoder[s])) {
      next.curve = true;
      if (ab.sampling == SamplingOp::kFps1d && ab.grouping == GroupingOp::kCurve) {
        CurveSaResult r = curve_sa(in.cloud, in.geodesic(), in.feats, p->sa);
        next.cloud = std::move(r.cloud);
        next.selection = std::move(r.selection);
        next.feats = std::move(r.features);
      } else {
        std::vector<Index> centers;
        if (ab.sampling == SamplingOp::kFps1d) {
          next.selection =
              fps_1d(in.cloud, in.geodesic(), SamplingConfig{st.epsilon});
          centers = next.selection->indices;
        } else {
          const auto pos = in.positions();
          centers = fps_euclidean(pos, matched_sample_count(in.cloud, st.epsilon),
                                  canonical_seed(pos));
          std::sort(centers.begin(), centers.end());
        }
        std::vector<Vec3> center_pos;
        center_pos.reserve(centers.size());
        for (Index c : centers) center_pos.push_back(in.cloud.positions[c]);
        const Neighborhoods groups =
            ab.grouping == GroupingOp::kCurve
                ? group_curve(in.cloud, in.geodesic(), centers,
                              GroupingConfig{st.radius, st.max_neighbors})
                : group_ball3d(in.cloud.positions, center_pos, st.radius,
                               st.max_neighbors);
        next.feats = abstract_neighborhoods(in.cloud.positions, in.feats,
                                            center_pos, groups, st.radius,
                                            p->sa.mlp, p->sa.pool);
        if (next.selection) {
          next.cloud.positions = std::move(center_pos);
          next.cloud.offsets = next.selection->offsets;
          next.cloud.source_beam = in.cloud.source_beam;
        } else {
          next.cloud = restrict_to(in.cloud, centers);
        }
      }
      if (use_conv && st.conv) {
        next.feats = curve_conv_block(next.cloud, next.feats, p->conv);
      }
    } else {
      const auto& pp = std::get<PointStageParams>(params.encoder[s]);
      next.curve = false;
      PointSaResult r = point_sa(in.positions(), in.feats, pp.sa);
      next.points = std::move(r.points);
      next.feats = std::move(r.features);
      // Tiny levels clamp k; a single point has no edges and passes through.
      const std::size_t n = next.points.size();
      if (n >= 2) {
        if (pp.graph.k < n) {
          next.feats = graph_conv(next.points, next.feats, pp.graph);
        } else {
          GraphConvParams clamped = pp.graph;
          clamped.k = n - 1;
          next.feats = graph_conv(next.points, next.feats, clamped);
        }
      }
    }
  }

  FeatureMap up = std::move(levels[depth].feats);
  for (std::size_t d = 0; d < depth; ++d) {
    const std::size_t s = depth - 1 - d;
    Level& hi = levels[s];
    const Level& lo = levels[s + 1];
    const DecoderStageParams& p = params.decoder[d];
    FeatureMap interpolated =
        (cfg.encoder[s].kind == StageKind::kCurve && lo.selection)
            ? interpolate_curve(hi.cloud, hi.geodesic(), *lo.selection, up)
            : interpolate_knn(hi.positions(), lo.positions(), up,
                              cfg.point_fp_k);
    up = apply_mlp(p.fp, concat_columns(interpolated, hi.feats));
    if (use_conv && p.conv) up = curve_conv_block(hi.cloud, up, *p.conv);
  }

  SegmentationOutput out;
  out.logits = apply_mlp(params.head, up);
  out.labels = argmax_labels(out.logits);
  return out;
}

}  // namespace curvecloud
