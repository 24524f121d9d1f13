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

#include "gesturedet/augment.hpp"

#include <algorithm>
#include <cmath>

#include "gesturedet/error.hpp"

namespace gesturedet {

void ValidateAugmentParams(const AugmentParams& p) {
  auto check = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::kConfig, what);
  };
  check(p.brightness_min <= p.brightness_max, "brightness range is empty");
  check(p.contrast_min <= p.contrast_max && p.contrast_min > 0.0, "contrast range is empty or non-positive");
  check(p.crop_probability >= 0.0 && p.crop_probability <= 1.0, "crop probability outside [0, 1]");
  check(p.pad_probability >= 0.0 && p.pad_probability <= 1.0, "pad probability outside [0, 1]");
  check(p.crop_min_retained_iou >= 0.0 && p.crop_min_retained_iou <= 1.0, "crop IoU gate outside [0, 1]");
  check(p.crop_area_min > 0.0 && p.crop_area_min <= p.crop_area_max && p.crop_area_max <= 1.0,
        "crop area range must satisfy 0 < min <= max <= 1");
  check(p.crop_max_trials >= 1, "crop needs at least one trial");
  check(p.pad_max_expansion >= 1.0, "pad expansion must be at least 1");
}

GrayImage PerturbPhotometric(const GrayImage& image, double brightness_delta, double contrast_factor) {
  return image.unaryExpr([&](std::uint8_t v) {
    const double out = std::round(contrast_factor * (static_cast<double>(v) - 128.0) + 128.0 + brightness_delta);
    return static_cast<std::uint8_t>(std::clamp(out, 0.0, 255.0));
  });
}

double RetainedIou(const BBox& bbox, const BBox& window) {
  const double x0 = std::max(bbox.left(), window.left());
  const double x1 = std::min(bbox.right(), window.right());
  const double y0 = std::max(bbox.top(), window.top());
  const double y1 = std::min(bbox.bottom(), window.bottom());
  if (x1 <= x0 || y1 <= y0) return 0.0;
  return Iou(bbox, BBox::FromCorners(x0, y0, x1, y1));
}

AugmentedFrame CropToWindow(const GrayImage& image, const BBox& bbox, const BBox& window) {
  const double x0 = std::clamp(std::max(bbox.left(), window.left()), 0.0, 1.0);
  const double x1 = std::clamp(std::min(bbox.right(), window.right()), 0.0, 1.0);
  const double y0 = std::clamp(std::max(bbox.top(), window.top()), 0.0, 1.0);
  const double y1 = std::clamp(std::min(bbox.bottom(), window.bottom()), 0.0, 1.0);
  if (x1 <= x0 || y1 <= y0) throw Error(ErrorCode::kInvalidBox, "box lies outside the crop window");

  const int width = Width(image);
  const int height = Height(image);
  GrayImage out(height, width);
  for (int y = 0; y < height; ++y) {
    const double v = window.top() + (y + 0.5) / height * window.h;
    const int sy = std::clamp(static_cast<int>(std::floor(v * height)), 0, height - 1);
    for (int x = 0; x < width; ++x) {
      const double u = window.left() + (x + 0.5) / width * window.w;
      const int sx = std::clamp(static_cast<int>(std::floor(u * width)), 0, width - 1);
      out(y, x) = image(sy, sx);
    }
  }
  auto remap_x = [&](double x) { return std::clamp((x - window.left()) / window.w, 0.0, 1.0); };
  auto remap_y = [&](double y) { return std::clamp((y - window.top()) / window.h, 0.0, 1.0); };
  return {std::move(out), BBox::FromCorners(remap_x(x0), remap_y(y0), remap_x(x1), remap_y(y1))};
}

AugmentedFrame PadToCanvas(const GrayImage& image, const BBox& bbox, double factor, double offset_x,
                           double offset_y, std::uint8_t fill) {
  if (!(factor >= 1.0)) throw Error(ErrorCode::kDomain, "pad factor must be at least 1");
  if (offset_x < 0.0 || offset_y < 0.0 || offset_x > factor - 1.0 || offset_y > factor - 1.0) {
    throw Error(ErrorCode::kDomain, "pad offset places the frame outside the canvas");
  }
  const int width = Width(image);
  const int height = Height(image);
  GrayImage out(height, width);
  for (int y = 0; y < height; ++y) {
    const double v = (y + 0.5) / height * factor - offset_y;
    for (int x = 0; x < width; ++x) {
      const double u = (x + 0.5) / width * factor - offset_x;
      if (u >= 0.0 && u < 1.0 && v >= 0.0 && v < 1.0) {
        out(y, x) = image(std::min(height - 1, static_cast<int>(v * height)),
                          std::min(width - 1, static_cast<int>(u * width)));
      } else {
        out(y, x) = fill;
      }
    }
  }
  const BBox moved{(bbox.cx + offset_x) / factor, (bbox.cy + offset_y) / factor, bbox.w / factor, bbox.h / factor};
  return {std::move(out), moved};
}

AugmentedFrame RandomCrop(const GrayImage& image, const BBox& bbox, Rng& rng, const AugmentParams& params) {
  for (int trial = 0; trial < params.crop_max_trials; ++trial) {
    const double side = std::sqrt(rng.Uniform(params.crop_area_min, params.crop_area_max));
    const double x0 = rng.Uniform(0.0, 1.0 - side);
    const double y0 = rng.Uniform(0.0, 1.0 - side);
    const BBox window = BBox::FromCorners(x0, y0, x0 + side, y0 + side);
    if (RetainedIou(bbox, window) >= params.crop_min_retained_iou && RetainedIou(bbox, window) > 0.0) {
      return CropToWindow(image, bbox, window);
    }
  }
  return {image, bbox};
}

AugmentedFrame RandomPad(const GrayImage& image, const BBox& bbox, Rng& rng, const AugmentParams& params) {
  const double factor = rng.Uniform(1.0, params.pad_max_expansion);
  const double ox = rng.Uniform(0.0, factor - 1.0);
  const double oy = rng.Uniform(0.0, factor - 1.0);
  return PadToCanvas(image, bbox, factor, ox, oy, params.pad_fill);
}

AugmentedFrame Augment(const GrayImage& image, const BBox& bbox, Rng& rng, const AugmentParams& params) {
  const double brightness = rng.Uniform(params.brightness_min, params.brightness_max);
  const double contrast = rng.Uniform(params.contrast_min, params.contrast_max);
  GrayImage jittered = PerturbPhotometric(image, brightness, contrast);
  if (rng.Bernoulli(params.crop_probability)) return RandomCrop(jittered, bbox, rng, params);
  if (rng.Bernoulli(params.pad_probability)) return RandomPad(jittered, bbox, rng, params);
  return {std::move(jittered), bbox};
}

}  // namespace gesturedet
