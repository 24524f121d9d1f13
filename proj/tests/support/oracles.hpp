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

// Independent reference computations used only by tests.

#include <cstdint>
#include <vector>

#include "gesturedet/geometry.hpp"

namespace gesturedet::testing {

/// IoU by counting pixel centers of a grid x grid raster inside each box.
inline double RasterIou(const BBox& a, const BBox& b, int grid = 512) {
  auto inside = [](const BBox& box, double x, double y) {
    return x >= box.cx - box.w / 2 && x < box.cx + box.w / 2 && y >= box.cy - box.h / 2 && y < box.cy + box.h / 2;
  };
  std::int64_t inter = 0, uni = 0;
  for (int j = 0; j < grid; ++j) {
    const double y = (j + 0.5) / grid;
    for (int i = 0; i < grid; ++i) {
      const double x = (i + 0.5) / grid;
      const bool ia = inside(a, x, y);
      const bool ib = inside(b, x, y);
      inter += ia && ib;
      uni += ia || ib;
    }
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

/// Matching rule applied literally: positive iff IoU >= threshold or the
/// anchor is the first one attaining the maximum IoU.
inline std::vector<std::uint8_t> LiteralMatch(const BBox& gt, const std::vector<Anchor>& anchors, double threshold) {
  std::vector<double> ious;
  for (const auto& a : anchors) ious.push_back(Iou(gt, a.box));
  double best = -1.0;
  for (double v : ious) best = v > best ? v : best;
  std::vector<std::uint8_t> out(anchors.size(), 0);
  bool argmax_taken = false;
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    if (ious[i] >= threshold) out[i] = 1;
    if (!argmax_taken && ious[i] == best) {
      out[i] = 1;
      argmax_taken = true;
    }
  }
  return out;
}

/// Random valid box with sides in [min_side, max_side].
template <typename Rng>
BBox RandomBox(Rng& rng, double min_side = 0.02, double max_side = 0.6) {
  const double w = rng.Uniform(min_side, max_side);
  const double h = rng.Uniform(min_side, max_side);
  return {rng.Uniform(w / 2, 1 - w / 2), rng.Uniform(h / 2, 1 - h / 2), w, h};
}

/// Random valid box whose edges lie on multiples of 1 / grid, so a grid x grid
/// raster represents it exactly.
template <typename Rng>
BBox RandomGridBox(Rng& rng, int grid = 512, int min_cells = 4) {
  auto span = [&](int& lo, int& hi) {
    lo = static_cast<int>(rng.Below(static_cast<std::uint64_t>(grid - min_cells)));
    hi = lo + min_cells + static_cast<int>(rng.Below(static_cast<std::uint64_t>(grid - lo - min_cells + 1)));
  };
  int x0, x1, y0, y1;
  span(x0, x1);
  span(y0, y1);
  const double g = grid;
  return BBox::FromCorners(x0 / g, y0 / g, x1 / g, y1 / g);
}

}  // namespace gesturedet::testing
