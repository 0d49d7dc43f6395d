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

#ifndef CURVECLOUD_PARAMS_IO_HPP_
#define CURVECLOUD_PARAMS_IO_HPP_

#include <cstddef>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "curvecloud/backbone.hpp"
#include "curvecloud/feature_map.hpp"

// Parameter files come in pairs: a JSON manifest holding the backbone config
// and a tensor table, plus a blob of consecutive FeatureMap records (see
// io::write_feature_map) that the table indexes. docs/formats.md has the
// details.
namespace curvecloud {

struct NamedTensor {
  std::string name;  // e.g. "encoder.0.sa.mlp.1.weight"
  FeatureMap value;
};

// Calls `fn` on every tensor of `params` in a fixed order.
void for_each_tensor(
    BackboneParams& params,
    const std::function<void(const std::string& name, FeatureMap& value)>& fn);

std::vector<NamedTensor> flatten_params(const BackboneParams& params);

// Rebuilds parameters for `cfg` from named tensors. Every tensor the config
// needs must be present exactly once with the right shape.
BackboneParams unflatten_params(const BackboneConfig& cfg,
                                std::span<const NamedTensor> tensors);

// Writes `manifest` and the blob next to it (same stem, extension .bin).
void save_params(const std::filesystem::path& manifest,
                 const BackboneConfig& cfg, const BackboneParams& params);

struct Model {
  BackboneConfig config;
  BackboneParams params;
};

Model load_params(const std::filesystem::path& manifest);

// Sets the final head layer's weights and bias to zero.
void zero_head(BackboneParams& params);

}  // namespace curvecloud

#endif  // CURVECLOUD_PARAMS_IO_HPP_
