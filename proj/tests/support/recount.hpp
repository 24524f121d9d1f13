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

// Dataset statistics recounted one pixel and one record at a time.

#include <array>
#include <cmath>
#include <map>
#include <span>
#include <utility>

#include "gesturedet/dataset.hpp"

namespace gesturedet::testing {

struct Recount {
  std::int64_t frames = 0;
  std::array<std::int64_t, kNumClasses> classes{};
  std::array<std::int64_t, 256> all{};
  std::array<std::int64_t, 256> in_box{};
  std::array<std::int64_t, kWidthBins> widths{};
  std::map<std::pair<int, int>, std::int64_t> heat;
};

inline Recount NaiveRecount(const DatasetStore& store, std::span<const FrameId> ids) {
  const int w = store.width();
  const int h = store.height();
  Recount rc;
  for (FrameId id : ids) {
    const FrameRecord r = store.Load(id);
    ++rc.frames;
    ++rc.classes[static_cast<std::size_t>(r.meta.label.index())];
    const double wpx = r.meta.bbox.w * w;
    int bin = 0;
    while (bin + 1 < kWidthBins && wpx >= (bin + 1) * (static_cast<double>(w) / kWidthBins)) ++bin;
    ++rc.widths[static_cast<std::size_t>(bin)];
    int row = 0, col = 0;
    while (row + 1 < kHeatmapRows && r.meta.bbox.cy >= (row + 1) / static_cast<double>(kHeatmapRows)) ++row;
    while (col + 1 < kHeatmapCols && r.meta.bbox.cx >= (col + 1) / static_cast<double>(kHeatmapCols)) ++col;
    ++rc.heat[{row, col}];
    const double x0 = std::round(r.meta.bbox.left() * w), x1 = std::round(r.meta.bbox.right() * w);
    const double y0 = std::round(r.meta.bbox.top() * h), y1 = std::round(r.meta.bbox.bottom() * h);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const std::uint8_t v = r.image(y, x);
        ++rc.all[v];
        if (x >= x0 && x < x1 && y >= y0 && y < y1) ++rc.in_box[v];
      }
    }
  }
  return rc;
}

inline bool SameCounts(const DatasetStats& st, const Recount& rc) {
  if (st.total_frames != rc.frames || st.class_counts != rc.classes || st.intensity_all != rc.all ||
      st.intensity_in_box != rc.in_box || st.width_histogram != rc.widths) {
    return false;
  }
  for (int r = 0; r < kHeatmapRows; ++r) {
    for (int c = 0; c < kHeatmapCols; ++c) {
      const auto it = rc.heat.find({r, c});
      if (st.center_heatmap(r, c) != (it == rc.heat.end() ? 0 : it->second)) return false;
    }
  }
  return true;
}

}  // namespace gesturedet::testing
