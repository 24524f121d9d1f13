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
#include <span>
#include <vector>

namespace gesturedet {

inline constexpr double kFrameEpsilon = 1e-6;

/// Axis-aligned box in normalized frame coordinates: center and size as
/// fractions of frame width and height.
struct BBox {
  double cx = 0.5;
  double cy = 0.5;
  double w = 0.0;
  double h = 0.0;

  double left() const { return cx - 0.5 * w; }
  double right() const { return cx + 0.5 * w; }
  double top() const { return cy - 0.5 * h; }
  double bottom() const { return cy + 0.5 * h; }
  double area() const { return w * h; }

  static BBox FromCorners(double x0, double y0, double x1, double y1) {
    return {0.5 * (x0 + x1), 0.5 * (y0 + y1), x1 - x0, y1 - y0};
  }

  friend bool operator==(const BBox&, const BBox&) = default;
};

/// Positive size and containment in the unit frame up to kFrameEpsilon.
bool IsValidBox(const BBox& b);
void ValidateBox(const BBox& b);

struct Anchor {
  BBox box;
  int map = 0;
  int row = 0;
  int col = 0;
  int prior = 0;
};

struct BoxOffsets {
  double t_cx = 0.0;
  double t_cy = 0.0;
  double t_w = 0.0;
  double t_h = 0.0;
};

struct EncodingVariances {
  double center = 0.1;
  double size = 0.2;
  friend bool operator==(const EncodingVariances&, const EncodingVariances&) = default;
};

struct PriorShape {
  double scale = 0.2;
  double aspect = 1.0;
  friend bool operator==(const PriorShape&, const PriorShape&) = default;
};

struct FeatureMapSpec {
  int rows = 1;
  int cols = 1;
  std::vector<PriorShape> priors;
};

struct AnchorConfig {
  std::vector<FeatureMapSpec> maps;
  EncodingVariances variances;

  /// Scales {0.2, 0.35} crossed with aspects {1.0, 0.75, 1.33}.
  static std::vector<PriorShape> DefaultPriors();
  /// Two maps of 10x8 and 5x4 cells.
  static AnchorConfig Default();

  int num_anchors() const;
  int max_priors() const;
};

void ValidateAnchorConfig(const AnchorConfig& config);

/// Intersection over union. Touching or disjoint boxes give 0.
double Iou(const BBox& a, const BBox& b);

/// Anchors ordered by (map, row, col, prior). Widths are s * sqrt(aspect) and
/// heights s / sqrt(aspect), both in normalized units.
std::vector<Anchor> GenerateAnchors(const AnchorConfig& config);

BoxOffsets Encode(const BBox& box, const BBox& anchor, const EncodingVariances& var = {});
BBox Decode(const BoxOffsets& offsets, const BBox& anchor, const EncodingVariances& var = {});

/// One flag per anchor. The highest-IoU anchor (lowest index on ties) is
/// always positive, as is every anchor with IoU >= threshold.
std::vector<std::uint8_t> MatchAnchors(const BBox& gt, std::span<const Anchor> anchors,
                                       double iou_threshold);

/// Pixel rectangle [x0, x1) x [y0, y1) covered by a box on a width x height
/// raster. Edges are rounded to the nearest pixel boundary and clamped.
struct PixelRect {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;
  bool contains(int x, int y) const { return x >= x0 && x < x1 && y >= y0 && y < y1; }
};
PixelRect ToPixelRect(const BBox& b, int width, int height);

/// Clamp the box center so the box lies inside the unit frame.
BBox ClampIntoFrame(const BBox& b);

}  // namespace gesturedet
