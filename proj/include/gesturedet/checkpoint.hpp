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

#include <filesystem>
#include <string>
#include <string_view>

#include "gesturedet/model_config.hpp"
#include "gesturedet/params.hpp"

namespace gesturedet {

/// Weight file layout, all integers little-endian:
///
///   "GDW1"
///   per parameter, in ParameterLayout order:
///     u32 name length, name bytes (no terminator)
///     u32 rank, rank x u32 dims
///     prod(dims) x f32
///
/// The model config that produced the layout is stored next to it as
/// <weights>.json.
std::string EncodeWeights(const ParameterSet<float>& params);
ParameterSet<float> DecodeWeights(std::string_view bytes);

struct Checkpoint {
  ModelConfig config;
  ParameterSet<float> params;
};

void SaveCheckpoint(const std::filesystem::path& path, const ModelConfig& config, const ParameterSet<float>& params);
Checkpoint LoadCheckpoint(const std::filesystem::path& path);

}  // namespace gesturedet
