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

#include "gesturedet/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gesturedet/error.hpp"

namespace gesturedet {

bool IsValidBox(const BBox& b) {
  if (!std::isfinite(b.cx) || !std::isfinite(b.cy) || !std::isfinite(b.w) || !std::isfinite(b.h)) {
    return false;
  }
  return b.w > 0.0 && b.h > 0.0 && b.left() >= -kFrameEpsilon && b.right() <= 1.0 + kFrameEpsilon &&
         b.top() >= -kFrameEpsilon && b.bottom() <= 1.0 + kFrameEpsilon;
}

void ValidateBox(const BBox& b) {
  if (!IsValidBox(b)) {
    throw Error(ErrorCode::kInvalidBox, "box (" + std::to_string(b.cx) + ", " + std::to_string(b.cy) +
                                            ", " + std::to_string(b.w) + ", " + std::to_string(b.h) +
                                            ") is not inside the unit frame");
  }
}

std::vector<PriorShape> AnchorConfig::DefaultPriors() {
  std::vector<PriorShape> priors;
  for (double scale : {0.2, 0.35}) {
    for (double aspect : {1.0, 0.75, 1.33}) priors.push_back({scale, aspect});
  }
  return priors;
}

AnchorConfig AnchorConfig::Default() {
  AnchorConfig config;
  config.maps.push_back({8, 10, DefaultPriors()});
  config.maps.push_back({4, 5, DefaultPriors()});
  return config;
}

int AnchorConfig::num_anchors() const {
  int n = 0;
  for (const auto& m : maps) n += m.rows * m.cols * static_cast<int>(m.priors.size());
  return n;
}

int AnchorConfig::max_priors() const {
  int n = 0;
  for (const auto& m : maps) n = std::max(n, static_cast<int>(m.priors.size()));
  return n;
}

void ValidateAnchorConfig(const AnchorConfig& config) {
  if (config.maps.empty()) throw Error(ErrorCode::kConfig, "anchor config needs at least one feature map");
  for (const auto& m : config.maps) {
    if (m.rows < 1 || m.cols < 1) throw Error(ErrorCode::kConfig, "feature map grid must be at least 1x1");
    if (m.priors.empty()) throw Error(ErrorCode::kConfig, "feature map has no priors");
    for (const auto& p : m.priors) {
      if (!(p.scale > 0.0 && p.scale <= 1.0)) {
        throw Error(ErrorCode::kConfig, "prior scale outside (0, 1]: " + std::to_string(p.scale));
      }
      if (!(p.aspect > 0.0) || !std::isfinite(p.aspect)) {
        throw Error(ErrorCode::kConfig, "prior aspect must be positive: " + std::to_string(p.aspect));
      }
    }
  }
  if (!(config.variances.center > 0.0) || !(config.variances.size > 0.0)) {
    throw Error(ErrorCode::kConfig, "encoding variances must be positive");
  }
}

double Iou(const BBox& a, const BBox& b) {
  const double iw = std::min(a.right(), b.right()) - std::max(a.left(), b.left());
  const double ih = std::min(a.bottom(), b.bottom()) - std::max(a.top(), b.top());
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  return std::clamp(inter / uni, 0.0, 1.0);
}

std::vector<Anchor> GenerateAnchors(const AnchorConfig& config) {
  ValidateAnchorConfig(config);
  std::vector<Anchor> anchors;
  anchors.reserve(static_cast<std::size_t>(config.num_anchors()));
  for (int m = 0; m < static_cast<int>(config.maps.size()); ++m) {
    const auto& spec = config.maps[static_cast<std::size_t>(m)];
    for (int r = 0; r < spec.rows; ++r) {
      for (int c = 0; c < spec.cols; ++c) {
        const double cx = (c + 0.5) / spec.cols;
        const double cy = (r + 0.5) / spec.rows;
        for (int p = 0; p < static_cast<int>(spec.priors.size()); ++p) {
          const auto& prior = spec.priors[static_cast<std::size_t>(p)];
          const double root = std::sqrt(prior.aspect);
          anchors.push_back({{cx, cy, prior.scale * root, prior.scale / root}, m, r, c, p});
        }
      }
    }
  }
  return anchors;
}

BoxOffsets Encode(const BBox& box, const BBox& anchor, const EncodingVariances& var) {
  if (!(anchor.w > 0.0) || !(anchor.h > 0.0)) throw Error(ErrorCode::kInvalidBox, "anchor has non-positive size");
  BoxOffsets t{(box.cx - anchor.cx) / (anchor.w * var.center), (box.cy - anchor.cy) / (anchor.h * var.center),
               std::log(box.w / anchor.w) / var.size, std::log(box.h / anchor.h) / var.size};
  if (!std::isfinite(t.t_cx) || !std::isfinite(t.t_cy) || !std::isfinite(t.t_w) || !std::isfinite(t.t_h)) {
    throw Error(ErrorCode::kInvalidBox, "encoding produced non-finite offsets");
  }
  return t;
}

BBox Decode(const BoxOffsets& t, const BBox& anchor, const EncodingVariances& var) {
  if (!(anchor.w > 0.0) || !(anchor.h > 0.0)) throw Error(ErrorCode::kInvalidBox, "anchor has non-positive size");
  BBox b{anchor.cx + t.t_cx * var.center * anchor.w, anchor.cy + t.t_cy * var.center * anchor.h,
         anchor.w * std::exp(t.t_w * var.size), anchor.h * std::exp(t.t_h * var.size)};
  if (!std::isfinite(b.cx) || !std::isfinite(b.cy) || !std::isfinite(b.w) || !std::isfinite(b.h) ||
      !(b.w > 0.0) || !(b.h > 0.0)) {
    throw Error(ErrorCode::kInvalidBox, "decoding produced a non-finite box");
  }
  return b;
}

std::vector<std::uint8_t> MatchAnchors(const BBox& gt, std::span<const Anchor> anchors, double iou_threshold) {
  std::vector<std::uint8_t> positive(anchors.size(), 0);
  if (anchors.empty()) return positive;
  std::size_t best = 0;
  double best_iou = -1.0;
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    const double overlap = Iou(gt, anchors[i].box);
    if (overlap > best_iou) {
      best_iou = overlap;
      best = i;
    }
    if (overlap >= iou_threshold) positive[i] = 1;
  }
  positive[best] = 1;
  return positive;
}

PixelRect ToPixelRect(const BBox& b, int width, int height) {
  auto edge = [](double v, int extent) {
    return static_cast<int>(std::clamp(std::lround(v * extent), 0L, static_cast<long>(extent)));
  };
  return {edge(b.left(), width), edge(b.top(), height), edge(b.right(), width), edge(b.bottom(), height)};
}

BBox ClampIntoFrame(const BBox& b) {
  BBox out = b;
  out.w = std::min(out.w, 1.0);
  out.h = std::min(out.h, 1.0);
  out.cx = std::clamp(out.cx, 0.5 * out.w, 1.0 - 0.5 * out.w);
  out.cy = std::clamp(out.cy, 0.5 * out.h, 1.0 - 0.5 * out.h);
  return out;
}

}  // namespace gesturedet
