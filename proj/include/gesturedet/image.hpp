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
#include <filesystem>
#include <span>
#include <string>

#include <Eigen/Core>

namespace gesturedet {

/// 8-bit grayscale frame, rows = height, cols = width, row-major storage.
using GrayImage = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline int Width(const GrayImage& img) { return static_cast<int>(img.cols()); }
inline int Height(const GrayImage& img) { return static_cast<int>(img.rows()); }

GrayImage ImageFromBytes(std::span<const std::uint8_t> bytes, int width, int height);
inline std::span<const std::uint8_t> ImageBytes(const GrayImage& img) {
  return {img.data(), static_cast<std::size_t>(img.size())};
}

/// Binary PGM (P5, maxval 255).
std::string EncodePgm(const GrayImage& img);
GrayImage DecodePgm(std::string_view data);
void WritePgm(const std::filesystem::path& path, const GrayImage& img);
GrayImage ReadPgm(const std::filesystem::path& path);

/// Nearest-neighbour resize: output pixel (x, y) samples source pixel
/// floor((x + 0.5) * src_w / dst_w).
GrayImage ResizeNearest(const GrayImage& src, int width, int height);

}  // namespace gesturedet
