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

#include <vector>

#include "gesturedet/layers.hpp"
#include "gesturedet/model_config.hpp"
#include "gesturedet/params.hpp"

namespace gesturedet {

/// Per-anchor head outputs; row n * num_anchors + a belongs to anchor a of
/// image n, anchors in GenerateAnchors order.
template <typename Scalar>
struct Predictions {
  int batch = 0;
  int num_anchors = 0;
  RowMatrix<Scalar> class_logits;  // (batch * num_anchors) x 9
  RowMatrix<Scalar> box_offsets;   // (batch * num_anchors) x 4

  static Predictions Zeros(int batch, int num_anchors) {
    const Eigen::Index rows = static_cast<Eigen::Index>(batch) * num_anchors;
    return {batch, num_anchors, RowMatrix<Scalar>::Zero(rows, kNumClasses), RowMatrix<Scalar>::Zero(rows, kNumOffsets)};
  }
};

/// Activations kept by Forward for Backward.
template <typename Scalar>
struct ForwardCache {
  Tensor<Scalar> input;
  Tensor<Scalar> stem;
  std::vector<Tensor<Scalar>> depthwise;
  std::vector<Tensor<Scalar>> pointwise;
};

namespace detail {

inline std::vector<int> MapAnchorOffsets(const ModelConfig& config) {
  std::vector<int> offsets;
  const auto dims = config.block_output_dims();
  int total = 0;
  for (std::size_t t = 0; t < config.taps.size(); ++t) {
    offsets.push_back(total);
    const auto [h, w] = dims[static_cast<std::size_t>(config.taps[t])];
    total += h * w * static_cast<int>(config.tap_priors[t].size());
  }
  offsets.push_back(total);
  return offsets;
}

}  // namespace detail

template <typename Scalar>
Predictions<Scalar> Forward(const ModelConfig& config, const ParameterSet<Scalar>& params, const Tensor<Scalar>& input,
                            ForwardCache<Scalar>* cache = nullptr) {
  if (input.h() != config.input_height || input.w() != config.input_width || input.c() != config.input_channels) {
    throw Error(ErrorCode::kShape, "input " + ShapeString(input.shape()) + " does not match model input " +
                                       std::to_string(config.input_height) + "x" + std::to_string(config.input_width));
  }
  if (params.size() != ParameterLayout(config).size()) throw Error(ErrorCode::kShape, "parameter set does not match config");

  const std::size_t num_blocks = config.blocks.size();
  const auto stem = ParamIndex::Stem();
  Tensor<Scalar> x = Relu(Conv2d(input, params.matrix(stem), params.vector(stem + 1), 3, config.stem_stride));
  GESTUREDET_CHECK_FINITE(x, "stem");
  if (cache) {
    cache->input = input;
    cache->stem = x;
    cache->depthwise.clear();
    cache->pointwise.clear();
  }

  const std::vector<int> map_offset = detail::MapAnchorOffsets(config);
  const int num_anchors = map_offset.back();
  Predictions<Scalar> preds = Predictions<Scalar>::Zeros(input.n(), num_anchors);

  std::size_t next_tap = 0;
  for (std::size_t b = 0; b < num_blocks; ++b) {
    const auto dw = ParamIndex::Depthwise(b);
    const auto pw = ParamIndex::Pointwise(b);
    Tensor<Scalar> d = Relu(DepthwiseConv2d(x, params.matrix(dw), params.vector(dw + 1), 3, config.blocks[b].stride));
    x = Relu(Conv2d(d, params.matrix(pw), params.vector(pw + 1), 1, 1));
    GESTUREDET_CHECK_FINITE(x, "block " + std::to_string(b + 1));
    if (cache) {
      cache->depthwise.push_back(std::move(d));
      cache->pointwise.push_back(x);
    }

    if (next_tap < config.taps.size() && config.taps[next_tap] == static_cast<int>(b)) {
      const auto hi = ParamIndex::Head(num_blocks, next_tap);
      const Tensor<Scalar> head = Conv2d(x, params.matrix(hi), params.vector(hi + 1), 3, 1);
      const int priors = static_cast<int>(config.tap_priors[next_tap].size());
      const auto m = head.matrix();
      for (int n = 0; n < head.n(); ++n) {
        for (int cell = 0; cell < head.h() * head.w(); ++cell) {
          const Eigen::Index src = static_cast<Eigen::Index>(n) * head.h() * head.w() + cell;
          for (int p = 0; p < priors; ++p) {
            const Eigen::Index dst =
                static_cast<Eigen::Index>(n) * num_anchors + map_offset[next_tap] + cell * priors + p;
            preds.class_logits.row(dst) = m.row(src).segment(p * kHeadValuesPerPrior, kNumClasses);
            preds.box_offsets.row(dst) = m.row(src).segment(p * kHeadValuesPerPrior + kNumClasses, kNumOffsets);
          }
        }
      }
      ++next_tap;
    }
  }
  return preds;
}

/// Reverse-mode gradients of every parameter given the loss gradient with
/// respect to the predictions.
template <typename Scalar>
ParameterSet<Scalar> Backward(const ModelConfig& config, const ParameterSet<Scalar>& params,
                              const ForwardCache<Scalar>& cache, const Predictions<Scalar>& grad) {
  ParameterSet<Scalar> grads(ParameterLayout(config));
  const std::size_t num_blocks = config.blocks.size();
  if (cache.pointwise.size() != num_blocks) throw Error(ErrorCode::kShape, "forward cache is incomplete");
  const std::vector<int> map_offset = detail::MapAnchorOffsets(config);
  const int num_anchors = map_offset.back();
  const int batch = cache.input.n();
  if (grad.class_logits.rows() != static_cast<Eigen::Index>(batch) * num_anchors) {
    throw Error(ErrorCode::kShape, "prediction gradient rows do not match the anchor count");
  }

  // Gradient flowing into the current block output; heads add to it.
  Tensor<Scalar> dx;
  for (std::size_t bi = num_blocks; bi-- > 0;) {
    const Tensor<Scalar>& out = cache.pointwise[bi];
    if (dx.size() == 0) dx = Tensor<Scalar>(out.n(), out.h(), out.w(), out.c());

    for (std::size_t t = 0; t < config.taps.size(); ++t) {
      if (config.taps[t] != static_cast<int>(bi)) continue;
      const int priors = static_cast<int>(config.tap_priors[t].size());
      Tensor<Scalar> dhead(out.n(), out.h(), out.w(), priors * kHeadValuesPerPrior);
      auto m = dhead.matrix();
      for (int n = 0; n < out.n(); ++n) {
        for (int cell = 0; cell < out.h() * out.w(); ++cell) {
          const Eigen::Index dst = static_cast<Eigen::Index>(n) * out.h() * out.w() + cell;
          for (int p = 0; p < priors; ++p) {
            const Eigen::Index src = static_cast<Eigen::Index>(n) * num_anchors + map_offset[t] + cell * priors + p;
            m.row(dst).segment(p * kHeadValuesPerPrior, kNumClasses) = grad.class_logits.row(src);
            m.row(dst).segment(p * kHeadValuesPerPrior + kNumClasses, kNumOffsets) = grad.box_offsets.row(src);
          }
        }
      }
      const auto hi = ParamIndex::Head(num_blocks, t);
      Tensor<Scalar> dfeat;
      Conv2dBackward(out, dhead, params.matrix(hi), 3, 1, &dfeat, grads.matrix(hi), grads.vector(hi + 1));
      dx.values() += dfeat.values();
    }

    const auto dw = ParamIndex::Depthwise(bi);
    const auto pw = ParamIndex::Pointwise(bi);
    const Tensor<Scalar>& d = cache.depthwise[bi];
    const Tensor<Scalar>& in = bi == 0 ? cache.stem : cache.pointwise[bi - 1];
    Tensor<Scalar> dd;
    Conv2dBackward(d, ReluBackward(out, std::move(dx)), params.matrix(pw), 1, 1, &dd, grads.matrix(pw),
                   grads.vector(pw + 1));
    Tensor<Scalar> din;
    DepthwiseConv2dBackward(in, ReluBackward(d, std::move(dd)), params.matrix(dw), 3, config.blocks[bi].stride, &din,
                            grads.matrix(dw), grads.vector(dw + 1));
    dx = std::move(din);
  }
  const auto stem = ParamIndex::Stem();
  Conv2dBackward(cache.input, ReluBackward(cache.stem, std::move(dx)), params.matrix(stem), 3, config.stem_stride,
                 static_cast<Tensor<Scalar>*>(nullptr), grads.matrix(stem), grads.vector(stem + 1));
  return grads;
}

}  // namespace gesturedet
