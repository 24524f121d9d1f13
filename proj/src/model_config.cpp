// Copyright 2026 The gesturedet Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "gesturedet/model_config.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

#include "gesturedet/error.hpp"
#include "gesturedet/layers.hpp"

namespace gesturedet {

using json = nlohmann::ordered_json;

int ScaleChannels(int channels, double depth_multiplier) {
  return std::max(8, static_cast<int>(std::lround(depth_multiplier * channels / 8.0)) * 8);
}

ModelConfig ModelConfig::Micro(int width, int height, double depth_multiplier) {
  ModelConfig c;
  c.profile = "micro";
  c.input_width = width;
  c.input_height = height;
  c.depth_multiplier = depth_multiplier;
  c.stem_channels = 16;
  c.stem_stride = 2;
  c.blocks = {{32, 2}, {64, 1}, {64, 2}, {128, 1}, {128, 2}, {256, 1}};
  c.taps = {3, 5};
  c.tap_priors = {AnchorConfig::DefaultPriors(), AnchorConfig::DefaultPriors()};
  return c;
}

ModelConfig ModelConfig::Full(int width, int height, double depth_multiplier) {
  ModelConfig c;
  c.profile = "full";
  c.input_width = width;
  c.input_height = height;
  c.depth_multiplier = depth_multiplier;
  c.stem_channels = 32;
  c.stem_stride = 2;
  c.blocks = {{64, 1},  {128, 2}, {128, 1}, {256, 2}, {256, 1},  {512, 2},  {512, 1},
              {512, 1}, {512, 1}, {512, 1}, {512, 1}, {1024, 2}, {1024, 1}, {512, 2}};
  c.taps = {12, 13};
  c.tap_priors = {AnchorConfig::DefaultPriors(), AnchorConfig::DefaultPriors()};
  return c;
}

ModelConfig ModelConfig::Profile(const std::string& profile, int width, int height, double depth_multiplier) {
  if (profile == "micro") return Micro(width, height, depth_multiplier);
  if (profile == "full") return Full(width, height, depth_multiplier);
  throw Error(ErrorCode::kConfig, "unknown model profile '" + profile + "'");
}

int ModelConfig::stem_width() const { return ScaleChannels(stem_channels, depth_multiplier); }

int ModelConfig::block_width(int block) const {
  return ScaleChannels(blocks.at(static_cast<std::size_t>(block)).channels, depth_multiplier);
}

std::pair<int, int> ModelConfig::stem_output_dims() const {
  return {SamePadding(input_height, 3, stem_stride).out, SamePadding(input_width, 3, stem_stride).out};
}

std::vector<std::pair<int, int>> ModelConfig::block_output_dims() const {
  std::vector<std::pair<int, int>> dims;
  auto [h, w] = stem_output_dims();
  for (const auto& b : blocks) {
    h = SamePadding(h, 3, b.stride).out;
    w = SamePadding(w, 3, b.stride).out;
    dims.emplace_back(h, w);
  }
  return dims;
}

AnchorConfig ModelConfig::anchor_config() const {
  AnchorConfig anchors;
  anchors.variances = variances;
  const auto dims = block_output_dims();
  for (std::size_t t = 0; t < taps.size(); ++t) {
    const auto [rows, cols] = dims.at(static_cast<std::size_t>(taps[t]));
    anchors.maps.push_back({rows, cols, tap_priors.at(t)});
  }
  return anchors;
}

std::string ModelConfig::name() const {
  const int percent = static_cast<int>(std::lround(depth_multiplier * 100.0));
  return std::string(profile == "full" ? "MobileNetSSD" : "MicroSSD") + "-" + std::to_string(percent) + "%";
}

void ValidateModelConfig(const ModelConfig& c) {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kConfig, what); };
  if (c.input_width < 1 || c.input_height < 1) fail("input dimensions must be positive");
  if (c.input_channels != 1) fail("only single-channel input is supported");
  if (!(c.depth_multiplier > 0.0 && c.depth_multiplier <= 1.0)) fail("depth multiplier must lie in (0, 1]");
  if (c.stem_channels < 1 || (c.stem_stride != 1 && c.stem_stride != 2)) fail("invalid stem");
  if (c.blocks.empty()) fail("model needs at least one block");
  for (const auto& b : c.blocks) {
    if (b.channels < 1 || (b.stride != 1 && b.stride != 2)) fail("block stride must be 1 or 2");
  }
  if (c.taps.empty()) fail("model needs at least one head tap");
  if (c.taps.size() != c.tap_priors.size()) fail("every tap needs a prior list");
  for (std::size_t i = 0; i < c.taps.size(); ++i) {
    if (c.taps[i] < 0 || c.taps[i] >= static_cast<int>(c.blocks.size())) fail("tap index out of range");
    if (i > 0 && c.taps[i] <= c.taps[i - 1]) fail("taps must be strictly increasing");
  }
  if (!(c.match_threshold > 0.0 && c.match_threshold < 1.0)) fail("match threshold must lie in (0, 1)");
  if (c.negatives_per_positive < 0) fail("negative ratio must be non-negative");
  ValidateAnchorConfig(c.anchor_config());
}

void CheckAnchorGrids(const ModelConfig& config, const AnchorConfig& anchors) {
  const AnchorConfig expected = config.anchor_config();
  if (expected.maps.size() != anchors.maps.size()) {
    throw Error(ErrorCode::kShape, "anchor config has " + std::to_string(anchors.maps.size()) +
                                       " maps, model taps " + std::to_string(expected.maps.size()));
  }
  for (std::size_t i = 0; i < anchors.maps.size(); ++i) {
    if (anchors.maps[i].rows != expected.maps[i].rows || anchors.maps[i].cols != expected.maps[i].cols) {
      throw Error(ErrorCode::kShape, "anchor grid " + std::to_string(i) + " is " + std::to_string(anchors.maps[i].cols) +
                                         "x" + std::to_string(anchors.maps[i].rows) + ", feature map is " +
                                         std::to_string(expected.maps[i].cols) + "x" +
                                         std::to_string(expected.maps[i].rows));
    }
  }
}

std::vector<ParamSpec> ParameterLayout(const ModelConfig& c) {
  std::vector<ParamSpec> layout;
  auto conv = [&](const std::string& name, int k, int cin, int cout) {
    layout.push_back({name + ".weight", {k, k, cin, cout}, k * k * cin, cout, k * k * cin, k * k * cout, false});
    layout.push_back({name + ".bias", {cout}, cout, 1, 0, 0, true});
  };
  auto depthwise = [&](const std::string& name, int k, int ch) {
    layout.push_back({name + ".weight", {k, k, ch}, k * k, ch, k * k, k * k, false});
    layout.push_back({name + ".bias", {ch}, ch, 1, 0, 0, true});
  };
  conv("stem", 3, c.input_channels, c.stem_width());
  int cin = c.stem_width();
  for (int i = 0; i < static_cast<int>(c.blocks.size()); ++i) {
    const std::string prefix = "block" + std::to_string(i + 1);
    depthwise(prefix + ".dw", 3, cin);
    conv(prefix + ".pw", 1, cin, c.block_width(i));
    cin = c.block_width(i);
  }
  for (std::size_t t = 0; t < c.taps.size(); ++t) {
    conv("head" + std::to_string(t + 1), 3, c.block_width(c.taps[t]),
         static_cast<int>(c.tap_priors[t].size()) * kHeadValuesPerPrior);
  }
  return layout;
}

std::int64_t ParameterCount(const ModelConfig& config) {
  std::int64_t n = 0;
  for (const auto& p : ParameterLayout(config)) n += p.count();
  return n;
}

std::int64_t MacCount(const ModelConfig& c) {
  const auto [sh, sw] = c.stem_output_dims();
  std::int64_t macs = static_cast<std::int64_t>(sh) * sw * 9 * c.input_channels * c.stem_width();
  const auto dims = c.block_output_dims();
  int cin = c.stem_width();
  for (std::size_t i = 0; i < c.blocks.size(); ++i) {
    const std::int64_t cells = static_cast<std::int64_t>(dims[i].first) * dims[i].second;
    const int cout = c.block_width(static_cast<int>(i));
    macs += cells * 9 * cin + cells * cin * cout;
    cin = cout;
  }
  for (std::size_t t = 0; t < c.taps.size(); ++t) {
    const auto [h, w] = dims[static_cast<std::size_t>(c.taps[t])];
    macs += static_cast<std::int64_t>(h) * w * 9 * c.block_width(c.taps[t]) *
            static_cast<std::int64_t>(c.tap_priors[t].size()) * kHeadValuesPerPrior;
  }
  return macs;
}

std::string ModelConfigToJson(const ModelConfig& c) {
  json j;
  j["profile"] = c.profile;
  j["input_width"] = c.input_width;
  j["input_height"] = c.input_height;
  j["input_channels"] = c.input_channels;
  j["depth_multiplier"] = c.depth_multiplier;
  j["stem_channels"] = c.stem_channels;
  j["stem_stride"] = c.stem_stride;
  json blocks = json::array();
  for (const auto& b : c.blocks) blocks.push_back({{"channels", b.channels}, {"stride", b.stride}});
  j["blocks"] = blocks;
  j["taps"] = c.taps;
  json priors = json::array();
  for (const auto& list : c.tap_priors) {
    json tap = json::array();
    for (const auto& p : list) tap.push_back({{"scale", p.scale}, {"aspect", p.aspect}});
    priors.push_back(tap);
  }
  j["tap_priors"] = priors;
  j["variances"] = {{"center", c.variances.center}, {"size", c.variances.size}};
  j["match_threshold"] = c.match_threshold;
  j["negatives_per_positive"] = c.negatives_per_positive;
  return j.dump();
}

ModelConfig ModelConfigFromJson(const std::string& text) {
  try {
    const json j = json::parse(text);
    ModelConfig c;
    c.profile = j.at("profile").get<std::string>();
    c.input_width = j.at("input_width").get<int>();
    c.input_height = j.at("input_height").get<int>();
    c.input_channels = j.at("input_channels").get<int>();
    c.depth_multiplier = j.at("depth_multiplier").get<double>();
    c.stem_channels = j.at("stem_channels").get<int>();
    c.stem_stride = j.at("stem_stride").get<int>();
    for (const auto& b : j.at("blocks")) c.blocks.push_back({b.at("channels").get<int>(), b.at("stride").get<int>()});
    c.taps = j.at("taps").get<std::vector<int>>();
    for (const auto& tap : j.at("tap_priors")) {
      std::vector<PriorShape> list;
      for (const auto& p : tap) list.push_back({p.at("scale").get<double>(), p.at("aspect").get<double>()});
      c.tap_priors.push_back(list);
    }
    c.variances = {j.at("variances").at("center").get<double>(), j.at("variances").at("size").get<double>()};
    c.match_threshold = j.at("match_threshold").get<double>();
    c.negatives_per_positive = j.at("negatives_per_positive").get<int>();
    ValidateModelConfig(c);
    return c;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfig, std::string("malformed model config: ") + e.what());
  }
}

}  // namespace gesturedet
