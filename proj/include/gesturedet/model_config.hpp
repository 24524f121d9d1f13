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

#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gesturedet/geometry.hpp"
#include "gesturedet/labels.hpp"

namespace gesturedet {

/// Per-anchor head width: class logits followed by box offsets.
inline constexpr int kNumOffsets = 4;
inline constexpr int kHeadValuesPerPrior = kNumClasses + kNumOffsets;

struct BlockSpec {
  int channels = 32;
  int stride = 1;
  friend bool operator==(const BlockSpec&, const BlockSpec&) = default;
};

/// Stem 3x3 conv, then depthwise-separable blocks (3x3 depthwise + 1x1
/// pointwise, each followed by ReLU). A 3x3 conv head sits on every tapped
/// block and emits priors * (9 + 4) channels.
struct ModelConfig {
  std::string profile = "micro";
  int input_width = 320;
  int input_height = 240;
  int input_channels = 1;
  double depth_multiplier = 1.0;
  int stem_channels = 16;
  int stem_stride = 2;
  std::vector<BlockSpec> blocks;
  /// 0-based indices into blocks, strictly increasing.
  std::vector<int> taps;
  /// Priors of each tapped feature map.
  std::vector<std::vector<PriorShape>> tap_priors;
  EncodingVariances variances;
  double match_threshold = 0.5;
  int negatives_per_positive = 3;

  /// Stem 16, blocks [32, 64, 64, 128, 128, 256] with strides
  /// [2, 1, 2, 1, 2, 1]; heads after blocks 4 and 6.
  static ModelConfig Micro(int width = 320, int height = 240, double depth_multiplier = 1.0);
  /// MobileNet's 13 blocks plus one stride-2 extra block; heads after blocks
  /// 13 and 14 (strides 32 and 64).
  static ModelConfig Full(int width = 320, int height = 240, double depth_multiplier = 1.0);
  static ModelConfig Profile(const std::string& profile, int width, int height, double depth_multiplier);

  int stem_width() const;
  int block_width(int block) const;
  /// (rows, cols) of every block's output.
  std::vector<std::pair<int, int>> block_output_dims() const;
  std::pair<int, int> stem_output_dims() const;
  /// Anchor grids follow the tapped feature map sizes.
  AnchorConfig anchor_config() const;
  std::string name() const;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

/// max(8, round(alpha * channels / 8) * 8).
int ScaleChannels(int channels, double depth_multiplier);

void ValidateModelConfig(const ModelConfig& config);
/// Throws kShape unless the anchor grids equal the tapped feature map sizes.
void CheckAnchorGrids(const ModelConfig& config, const AnchorConfig& anchors);

struct ParamSpec {
  std::string name;
  std::vector<int> shape;
  /// Matrix view used by the layers; biases are rows x 1.
  int rows = 0;
  int cols = 0;
  int fan_in = 0;
  int fan_out = 0;
  bool is_bias = false;

  std::int64_t count() const { return static_cast<std::int64_t>(rows) * cols; }
};

/// Parameters in checkpoint order: stem, each block's depthwise then
/// pointwise weight and bias, then each head.
std::vector<ParamSpec> ParameterLayout(const ModelConfig& config);
std::int64_t ParameterCount(const ModelConfig& config);
/// Multiply-accumulates of one forward pass on a single image.
std::int64_t MacCount(const ModelConfig& config);

std::string ModelConfigToJson(const ModelConfig& config);
ModelConfig ModelConfigFromJson(const std::string& text);

}  // namespace gesturedet
