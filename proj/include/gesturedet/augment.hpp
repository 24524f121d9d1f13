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

#include "gesturedet/geometry.hpp"
#include "gesturedet/image.hpp"
#include "gesturedet/rng.hpp"

namespace gesturedet {

struct AugmentParams {
  double brightness_min = -25.0;
  double brightness_max = 25.0;
  double contrast_min = 0.8;
  double contrast_max = 1.25;

  double crop_probability = 0.5;
  /// Fraction of the ground-truth box that must survive clipping, measured
  /// as IoU(original box, clipped box).
  double crop_min_retained_iou = 0.5;
  double crop_area_min = 0.5;
  double crop_area_max = 1.0;
  int crop_max_trials = 50;

  double pad_probability = 0.5;
  double pad_max_expansion = 1.5;
  std::uint8_t pad_fill = 128;
};

void ValidateAugmentParams(const AugmentParams& params);

struct AugmentedFrame {
  GrayImage image;
  BBox bbox;
};

/// out = clamp(round(contrast * (in - 128) + 128 + brightness), 0, 255), with
/// round-half-away-from-zero.
GrayImage PerturbPhotometric(const GrayImage& image, double brightness_delta, double contrast_factor);

/// Crop to a window given in normalized corners and resample back to the
/// input size by nearest neighbour. The box is clipped to the window and
/// re-normalized.
AugmentedFrame CropToWindow(const GrayImage& image, const BBox& bbox, const BBox& window);

/// Place the frame at (offset_x, offset_y) in frame units on a canvas
/// `factor` times larger, fill the rest, and resample back to the input size.
AugmentedFrame PadToCanvas(const GrayImage& image, const BBox& bbox, double factor, double offset_x,
                           double offset_y, std::uint8_t fill);

/// Fraction-of-box criterion used to accept crop windows.
double RetainedIou(const BBox& bbox, const BBox& window);

/// Tries up to crop_max_trials square-in-frame-units windows and returns the
/// first whose retained IoU passes; otherwise returns the input unchanged.
AugmentedFrame RandomCrop(const GrayImage& image, const BBox& bbox, Rng& rng, const AugmentParams& params);

AugmentedFrame RandomPad(const GrayImage& image, const BBox& bbox, Rng& rng, const AugmentParams& params);

/// Photometric jitter, then crop with crop_probability, otherwise pad with
/// pad_probability.
AugmentedFrame Augment(const GrayImage& image, const BBox& bbox, Rng& rng, const AugmentParams& params);

}  // namespace gesturedet
