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

#include <span>
#include <vector>

#include "gesturedet/geometry.hpp"
#include "gesturedet/image.hpp"
#include "gesturedet/labels.hpp"
#include "gesturedet/loss.hpp"
#include "gesturedet/network.hpp"

namespace gesturedet {

struct Detection {
  ClassLabel label;
  double confidence = 0.0;
  BBox box;
  int anchor_index = 0;
};

/// Top-confidence pick for one image: the anchor whose best non-None softmax
/// probability is highest (lowest index on ties). The label is that anchor's
/// best non-None class, or None when every anchor's argmax is None.
template <typename Scalar>
Detection SelectTopDetection(const Predictions<Scalar>& preds, int image, std::span<const Anchor> anchors,
                             const EncodingVariances& variances) {
  if (static_cast<int>(anchors.size()) != preds.num_anchors) {
    throw Error(ErrorCode::kShape, "anchor list does not match the prediction rows");
  }
  const Eigen::Index base = static_cast<Eigen::Index>(image) * preds.num_anchors;
  int best_anchor = 0;
  int best_class = 1;
  double best_prob = -1.0;
  bool any_non_none = false;
  for (int a = 0; a < preds.num_anchors; ++a) {
    const auto probs = Softmax(preds.class_logits.row(base + a));
    Eigen::Index argmax = 0;
    probs.maxCoeff(&argmax);
    if (argmax != 0) any_non_none = true;
    Eigen::Index cls = 0;
    const double p = static_cast<double>(probs.tail(kNumClasses - 1).maxCoeff(&cls));
    if (p > best_prob) {
      best_prob = p;
      best_anchor = a;
      best_class = static_cast<int>(cls) + 1;
    }
  }
  const auto row = preds.box_offsets.row(base + best_anchor);
  const BoxOffsets offsets{static_cast<double>(row(0)), static_cast<double>(row(1)), static_cast<double>(row(2)),
                           static_cast<double>(row(3))};
  Detection det;
  det.label = any_non_none ? ClassLabel::FromIndex(best_class) : ClassLabel::None();
  det.confidence = best_prob;
  det.box = Decode(offsets, anchors[static_cast<std::size_t>(best_anchor)].box, variances);
  det.anchor_index = best_anchor;
  return det;
}

/// Maps 8-bit pixels to [-1, 1] after resizing to the model input.
template <typename Scalar>
void NormalizeInto(const GrayImage& image, Tensor<Scalar>& batch, int index) {
  const int h = batch.h();
  const int w = batch.w();
  const GrayImage sized = (Width(image) == w && Height(image) == h) ? image : ResizeNearest(image, w, h);
  Eigen::Map<Eigen::Array<Scalar, Eigen::Dynamic, 1>> dst(batch.data() + batch.offset(index, 0, 0, 0),
                                                          static_cast<Eigen::Index>(h) * w);
  const Eigen::Map<const Eigen::Array<std::uint8_t, Eigen::Dynamic, 1>> src(sized.data(),
                                                                            static_cast<Eigen::Index>(h) * w);
  dst = src.template cast<Scalar>() / Scalar(127.5) - Scalar(1);
}

template <typename Scalar>
Tensor<Scalar> Preprocess(const ModelConfig& config, std::span<const GrayImage> images) {
  Tensor<Scalar> batch(static_cast<int>(images.size()), config.input_height, config.input_width, 1);
  for (std::size_t i = 0; i < images.size(); ++i) NormalizeInto(images[i], batch, static_cast<int>(i));
  return batch;
}

template <typename Scalar>
Detection Predict(const ModelConfig& config, const ParameterSet<Scalar>& params, const GrayImage& image) {
  const std::vector<Anchor> anchors = GenerateAnchors(config.anchor_config());
  const Tensor<Scalar> input = Preprocess<Scalar>(config, std::span<const GrayImage>(&image, 1));
  return SelectTopDetection(Forward(config, params, input), 0, anchors, config.variances);
}

}  // namespace gesturedet
