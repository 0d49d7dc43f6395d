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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include <json.hpp>

#include "curvecloud/params_io.hpp"

namespace curvecloud {
namespace {

class TempDir {
 public:
  TempDir() {
    path_ = std::filesystem::temp_directory_path() /
            (std::string("curvecloud_params_") +
             ::testing::UnitTest::GetInstance()->current_test_info()->name());
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// Parameters rounded to float so a save/load round trip is exact.
BackboneParams float_params(const BackboneConfig& cfg, std::uint64_t seed) {
  BackboneParams p = init_backbone_params(cfg, seed);
  for_each_tensor(p, [](const std::string&, FeatureMap& t) {
    for (double& v : t.values()) v = static_cast<float>(v);
  });
  return p;
}

bool same(const BackboneParams& a, const BackboneParams& b) {
  const auto ta = flatten_params(a);
  const auto tb = flatten_params(b);
  if (ta.size() != tb.size()) return false;
  for (std::size_t i = 0; i < ta.size(); ++i) {
    if (ta[i].name != tb[i].name || !(ta[i].value == tb[i].value)) return false;
  }
  return true;
}

TEST(Flatten, NamesAreUniqueAndStable) {
  const BackboneConfig cfg = toy_profile();
  const auto tensors = flatten_params(init_backbone_params(cfg, 1));
  std::set<std::string> names;
  for (const auto& t : tensors) EXPECT_TRUE(names.insert(t.name).second) << t.name;
  EXPECT_TRUE(names.count("encoder.0.sa.mlp.0.weight"));
  EXPECT_TRUE(names.count("head.1.bias"));
  const auto again = flatten_params(init_backbone_params(cfg, 1));
  ASSERT_EQ(again.size(), tensors.size());
  for (std::size_t i = 0; i < tensors.size(); ++i) EXPECT_EQ(again[i].name, tensors[i].name);
}

TEST(Flatten, UnflattenInverts) {
  for (const BackboneConfig& cfg : {toy_profile(), production_profile()}) {
    const BackboneParams p = init_backbone_params(cfg, 7);
    const auto tensors = flatten_params(p);
    EXPECT_TRUE(same(unflatten_params(cfg, tensors), p));
  }
}

TEST(Flatten, UnflattenRejectsMissingExtraAndMisshapen) {
  const BackboneConfig cfg = toy_profile();
  auto tensors = flatten_params(init_backbone_params(cfg, 1));
  auto missing = tensors;
  missing.pop_back();
  EXPECT_THROW(unflatten_params(cfg, missing), FormatError);
  auto extra = tensors;
  extra.push_back(NamedTensor{"bogus", FeatureMap(1, 1)});
  EXPECT_THROW(unflatten_params(cfg, extra), FormatError);
  auto wrong = tensors;
  wrong[0].value = FeatureMap(1, 1);
  EXPECT_THROW(unflatten_params(cfg, wrong), FormatError);
}

TEST(SaveLoad, RoundTripIsExact) {
  TempDir dir;
  for (const BackboneConfig& cfg : {toy_profile(), production_profile()}) {
    const BackboneParams p = float_params(cfg, 3);
    save_params(dir / "model.json", cfg, p);
    const Model m = load_params(dir / "model.json");
    EXPECT_EQ(backbone_config_to_json(m.config), backbone_config_to_json(cfg));
    EXPECT_TRUE(same(m.params, p));
  }
}

TEST(SaveLoad, ManifestLayout) {
  TempDir dir;
  save_params(dir / "toy.json", toy_profile(), init_backbone_params(toy_profile(), 0));
  std::ifstream in(dir / "toy.json");
  const auto j = nlohmann::json::parse(in);
  EXPECT_EQ(j.at("version"), 1);
  EXPECT_EQ(j.at("kind"), "curvecloud-params");
  EXPECT_EQ(j.at("blob"), "toy.bin");
  EXPECT_TRUE(std::filesystem::exists(dir / "toy.bin"));
  EXPECT_FALSE(j.at("tensors").empty());
}

TEST(SaveLoad, DamagedFilesAreFormatErrors) {
  TempDir dir;
  save_params(dir / "m.json", toy_profile(), init_backbone_params(toy_profile(), 0));
  std::filesystem::resize_file(dir / "m.bin", std::filesystem::file_size(dir / "m.bin") - 4);
  EXPECT_THROW(load_params(dir / "m.json"), FormatError);
  {
    std::ofstream out(dir / "m.json");
    out << "{\"version\": 2}";
  }
  EXPECT_THROW(load_params(dir / "m.json"), FormatError);
  EXPECT_THROW(load_params(dir / "absent.json"), FormatError);
}

TEST(ZeroHead, ClearsOnlyTheLastLayer) {
  BackboneParams p = init_backbone_params(toy_profile(), 5);
  const auto first = p.head.layers.front().weight;
  zero_head(p);
  for (double v : p.head.layers.back().weight.values()) EXPECT_EQ(v, 0.0);
  for (double v : p.head.layers.back().bias) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(p.head.layers.front().weight, first);
}

}  // namespace
}  // namespace curvecloud
