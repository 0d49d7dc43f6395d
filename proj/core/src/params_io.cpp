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

#include "curvecloud/params_io.hpp"

#include <fstream>
#include <json.hpp>
#include <map>

#include "curvecloud/io.hpp"

namespace curvecloud {
namespace {

using TensorFn =
    std::function<void(const std::string& name, FeatureMap& value)>;

void visit_vector(const std::string& name, std::span<double> v,
                  const TensorFn& fn) {
  FeatureMap tmp(1, v.size(), std::vector<double>(v.begin(), v.end()));
  fn(name, tmp);
  if (tmp.rows() != 1 || tmp.cols() != v.size()) {
    throw ConfigError(name + ": shape changed while visiting");
  }
  std::copy(tmp.values().begin(), tmp.values().end(), v.begin());
}

void visit_dense(const std::string& prefix, DenseLayer& l, const TensorFn& fn) {
  fn(prefix + ".weight", l.weight);
  visit_vector(prefix + ".bias", l.bias, fn);
  if (l.norm) {
    visit_vector(prefix + ".bn.mean", l.norm->mean, fn);
    visit_vector(prefix + ".bn.variance", l.norm->variance, fn);
    visit_vector(prefix + ".bn.scale", l.norm->scale, fn);
    visit_vector(prefix + ".bn.shift", l.norm->shift, fn);
  }
}

void visit_mlp(const std::string& prefix, MlpParams& mlp, const TensorFn& fn) {
  for (std::size_t i = 0; i < mlp.layers.size(); ++i) {
    visit_dense(prefix + "." + std::to_string(i), mlp.layers[i], fn);
  }
}

void visit_conv(const std::string& prefix, CurveConvBlockParams& conv,
                const TensorFn& fn) {
  for (std::size_t s = 0; s < 3; ++s) {
    const std::string p = prefix + "." + std::to_string(s);
    SymmetricKernel& k = conv.kernels[s];
    auto w = k.stored_weights();
    FeatureMap tmp(k.stored_taps() * k.in_channels(), k.out_channels(),
                   std::vector<double>(w.begin(), w.end()));
    fn(p + ".kernel", tmp);
    if (tmp.rows() != k.stored_taps() * k.in_channels() ||
        tmp.cols() != k.out_channels()) {
      throw ConfigError(p + ".kernel: shape changed while visiting");
    }
    std::copy(tmp.values().begin(), tmp.values().end(), w.begin());
    visit_vector(p + ".bias", k.bias(), fn);
    BatchNorm& bn = conv.norms[s];
    visit_vector(p + ".bn.mean", bn.mean, fn);
    visit_vector(p + ".bn.variance", bn.variance, fn);
    visit_vector(p + ".bn.scale", bn.scale, fn);
    visit_vector(p + ".bn.shift", bn.shift, fn);
  }
}

}  // namespace

void for_each_tensor(BackboneParams& params, const TensorFn& fn) {
  for (std::size_t s = 0; s < params.encoder.size(); ++s) {
    const std::string p = "encoder." + std::to_string(s);
    if (auto* c = std::get_if<CurveStageParams>(&params.encoder[s])) {
      visit_mlp(p + ".sa.mlp", c->sa.mlp, fn);
      visit_dense(p + ".sa.pool", c->sa.pool.score, fn);
      visit_conv(p + ".conv", c->conv, fn);
    } else {
      auto& q = std::get<PointStageParams>(params.encoder[s]);
      visit_mlp(p + ".sa.mlp", q.sa.mlp, fn);
      visit_dense(p + ".sa.pool", q.sa.pool.score, fn);
      visit_mlp(p + ".graph.mlp", q.graph.mlp, fn);
      visit_dense(p + ".graph.pool", q.graph.pool.score, fn);
    }
  }
  for (std::size_t d = 0; d < params.decoder.size(); ++d) {
    const std::string p = "decoder." + std::to_string(d);
    visit_mlp(p + ".fp.mlp", params.decoder[d].fp, fn);
    if (params.decoder[d].conv) visit_conv(p + ".conv", *params.decoder[d].conv, fn);
  }
  visit_mlp("head", params.head, fn);
}

std::vector<NamedTensor> flatten_params(const BackboneParams& params) {
  BackboneParams copy = params;
  std::vector<NamedTensor> out;
  for_each_tensor(copy, [&](const std::string& name, FeatureMap& value) {
    out.push_back(NamedTensor{name, value});
  });
  return out;
}

BackboneParams unflatten_params(const BackboneConfig& cfg,
                                std::span<const NamedTensor> tensors) {
  std::map<std::string, std::size_t> by_name;
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    if (!by_name.emplace(tensors[i].name, i).second) {
      throw FormatError("duplicate tensor '" + tensors[i].name + "'");
    }
  }
  BackboneParams params = init_backbone_params(cfg, 0);
  std::size_t used = 0;
  for_each_tensor(params, [&](const std::string& name, FeatureMap& value) {
    const auto it = by_name.find(name);
    if (it == by_name.end()) throw FormatError("missing tensor '" + name + "'");
    const FeatureMap& src = tensors[it->second].value;
    if (src.rows() != value.rows() || src.cols() != value.cols()) {
      throw FormatError("tensor '" + name + "' is " + std::to_string(src.rows()) +
                        "x" + std::to_string(src.cols()) + ", expected " +
                        std::to_string(value.rows()) + "x" +
                        std::to_string(value.cols()));
    }
    value = src;
    ++used;
  });
  if (used != tensors.size()) {
    throw FormatError(std::to_string(tensors.size() - used) +
                      " tensors do not belong to this config");
  }
  check_params(cfg, params);
  return params;
}

void save_params(const std::filesystem::path& manifest,
                 const BackboneConfig& cfg, const BackboneParams& params) {
  check_params(cfg, params);
  std::filesystem::path blob = manifest;
  blob.replace_extension(".bin");
  if (blob == manifest) blob += ".bin";

  const auto tensors = flatten_params(params);
  nlohmann::json j;
  j["version"] = 1;
  j["kind"] = "curvecloud-params";
  j["blob"] = blob.filename().string();
  j["config"] = nlohmann::json::parse(backbone_config_to_json(cfg));
  j["tensors"] = nlohmann::json::array();
  for (const auto& t : tensors) {
    j["tensors"].push_back(
        {{"name", t.name}, {"rows", t.value.rows()}, {"cols", t.value.cols()}});
  }

  std::ofstream blob_out(blob, std::ios::binary | std::ios::trunc);
  if (!blob_out) throw Error("cannot open '" + blob.string() + "' for writing");
  for (const auto& t : tensors) io::write_feature_map(blob_out, t.value);
  blob_out.flush();
  if (!blob_out) throw Error("failed writing '" + blob.string() + "'");

  std::ofstream out(manifest, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + manifest.string() + "' for writing");
  out << j.dump(2) << '\n';
  out.flush();
  if (!out) throw Error("failed writing '" + manifest.string() + "'");
}

Model load_params(const std::filesystem::path& manifest) {
  const auto text = io::read_file(manifest);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("parameter manifest is not valid JSON: " +
                      std::string(e.what()));
  }
  Model model;
  std::vector<NamedTensor> tensors;
  std::filesystem::path blob;
  try {
    if (j.at("version").get<int>() != 1 ||
        j.at("kind").get<std::string>() != "curvecloud-params") {
      throw FormatError("unsupported parameter manifest version or kind");
    }
    model.config = parse_backbone_config(j.at("config").dump());
    blob = manifest.parent_path() / j.at("blob").get<std::string>();
    for (const auto& t : j.at("tensors")) {
      tensors.push_back(NamedTensor{
          t.at("name").get<std::string>(),
          FeatureMap(t.at("rows").get<std::size_t>(),
                     t.at("cols").get<std::size_t>())});
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("malformed parameter manifest: " + std::string(e.what()));
  }

  std::ifstream in(blob, std::ios::binary);
  if (!in) throw FormatError("cannot open parameter blob '" + blob.string() + "'");
  for (auto& t : tensors) {
    FeatureMap value = io::read_feature_map(in);
    if (value.rows() != t.value.rows() || value.cols() != t.value.cols()) {
      throw FormatError("blob record for '" + t.name +
                        "' does not match the manifest shape");
    }
    t.value = std::move(value);
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw FormatError("parameter blob has trailing bytes");
  }
  model.params = unflatten_params(model.config, tensors);
  return model;
}

void zero_head(BackboneParams& params) {
  if (params.head.layers.empty()) return;
  DenseLayer& last = params.head.layers.back();
  std::fill(last.weight.values().begin(), last.weight.values().end(), 0.0);
  std::fill(last.bias.begin(), last.bias.end(), 0.0);
}

}  // namespace curvecloud
