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

#include "gesturedet/image.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <fstream>
#include <sstream>

#include "gesturedet/error.hpp"

namespace gesturedet {

GrayImage ImageFromBytes(std::span<const std::uint8_t> bytes, int width, int height) {
  if (width <= 0 || height <= 0 || bytes.size() != static_cast<std::size_t>(width) * height) {
    throw Error(ErrorCode::kDimensionMismatch, "expected " + std::to_string(width) + "x" + std::to_string(height) +
                                                   " bytes, got " + std::to_string(bytes.size()));
  }
  GrayImage img(height, width);
  std::memcpy(img.data(), bytes.data(), bytes.size());
  return img;
}

std::string EncodePgm(const GrayImage& img) {
  std::string out = "P5\n" + std::to_string(img.cols()) + " " + std::to_string(img.rows()) + "\n255\n";
  const auto bytes = ImageBytes(img);
  out.append(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  return out;
}

GrayImage DecodePgm(std::string_view data) {
  std::size_t pos = 0;
  auto next_token = [&]() -> std::string {
    while (pos < data.size()) {
      if (data[pos] == '#') {
        while (pos < data.size() && data[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(data[pos]))) {
        ++pos;
      } else {
        break;
      }
    }
    const std::size_t start = pos;
    while (pos < data.size() && !std::isspace(static_cast<unsigned char>(data[pos]))) ++pos;
    return std::string(data.substr(start, pos - start));
  };
  if (next_token() != "P5") throw Error(ErrorCode::kStoreIo, "not a binary PGM");
  int width = 0, height = 0, maxval = 0;
  try {
    width = std::stoi(next_token());
    height = std::stoi(next_token());
    maxval = std::stoi(next_token());
  } catch (const std::exception&) {
    throw Error(ErrorCode::kStoreIo, "malformed PGM header");
  }
  if (maxval != 255) throw Error(ErrorCode::kStoreIo, "only 8-bit PGM is supported");
  ++pos;  // single whitespace byte before the raster
  const std::size_t expected = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  if (width <= 0 || height <= 0 || data.size() < pos || data.size() - pos != expected) {
    throw Error(ErrorCode::kStoreIo, "PGM raster size does not match header");
  }
  return ImageFromBytes({reinterpret_cast<const std::uint8_t*>(data.data() + pos), expected}, width, height);
}

void WritePgm(const std::filesystem::path& path, const GrayImage& img) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  const std::string bytes = EncodePgm(img);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kStoreIo, "cannot write " + path.string());
}

GrayImage ReadPgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kStoreIo, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return DecodePgm(buf.str());
}

GrayImage ResizeNearest(const GrayImage& src, int width, int height) {
  if (Width(src) == width && Height(src) == height) return src;
  GrayImage dst(height, width);
  for (int y = 0; y < height; ++y) {
    const int sy = std::min(Height(src) - 1, static_cast<int>((y + 0.5) * Height(src) / height));
    for (int x = 0; x < width; ++x) {
      const int sx = std::min(Width(src) - 1, static_cast<int>((x + 0.5) * Width(src) / width));
      dst(y, x) = src(sy, sx);
    }
  }
  return dst;
}

}  // namespace gesturedet
