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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "gesturedet/geometry.hpp"
#include "gesturedet/labels.hpp"
#include "gesturedet/network.hpp"

namespace gesturedet {

/// 0.5 x^2 below unit magnitude, |x| - 0.5 above.
template <typename Scalar>
Scalar SmoothL1(Scalar x) {
  const Scalar a = std::abs(x);
  return a < Scalar(1) ? Scalar(0.5) * x * x : a - Scalar(0.5);
}

template <typename Scalar>
Scalar SmoothL1Grad(Scalar x) {
  return std::abs(x) < Scalar(1) ? x : (x > Scalar(0) ? Scalar(1) : Scalar(-1));
}

/// One labeled box per frame.
struct TrainTarget {
  ClassLabel label;
  BBox box;
};

struct LossBreakdown {
  double total = 0.0;
  double classification = 0.0;
  double localization = 0.0;
  int positives = 0;
  int negatives = 0;
};

/// Log-softmax of one row of logits.
template <typename Derived>
auto LogSoftmax(const Eigen::MatrixBase<Derived>& logits) {
  using Scalar = typename Derived::Scalar;
  const Scalar peak = logits.maxCoeff();
  const Scalar lse = peak + std::log((logits.array() - peak).exp().sum());
  return (logits.array() - lse).matrix().eval();
}

/// Softmax of one row of logits, normalized after exponentiation so the row
/// sums to one at working precision.
template <typename Derived>
auto Softmax(const Eigen::MatrixBase<Derived>& logits) {
  const auto e = (logits.array() - logits.maxCoeff()).exp().eval();
  return (e / e.sum()).matrix().eval();
}

/// Per-image L = L_cls + L_loc, averaged over the batch. L_cls is the mean
/// cross-entropy over positives and mined negatives (the highest None-class
/// losses, negatives_per_positive per positive); L_loc is the mean over
/// positives of the summed smooth-L1 offset error. When grad is non-null it
/// receives dL/dpredictions (mining treated as fixed).
template <typename Scalar>
LossBreakdown ComputeLoss(const Predictions<Scalar>& preds, std::span<const TrainTarget> targets,
                          std::span<const Anchor> anchors, const ModelConfig& config,
                          Predictions<Scalar>* grad = nullptr) {
  if (static_cast<int>(targets.size()) != preds.batch) throw Error(ErrorCode::kShape, "one target per image required");
  if (static_cast<int>(anchors.size()) != preds.num_anchors) {
    throw Error(ErrorCode::kShape, "anchor list does not match the prediction rows");
  }
  if (grad) *grad = Predictions<Scalar>::Zeros(preds.batch, preds.num_anchors);

  const int num_anchors = preds.num_anchors;
  const Scalar inv_batch = Scalar(1) / static_cast<Scalar>(preds.batch);
  LossBreakdown out;
  for (int n = 0; n < preds.batch; ++n) {
    const TrainTarget& target = targets[static_cast<std::size_t>(n)];
    const auto positive = MatchAnchors(target.box, anchors, config.match_threshold);
    const Eigen::Index base = static_cast<Eigen::Index>(n) * num_anchors;

    std::vector<int> pos, neg;
    for (int a = 0; a < num_anchors; ++a) (positive[static_cast<std::size_t>(a)] ? pos : neg).push_back(a);
    if (pos.empty()) throw Error(ErrorCode::kInternal, "no positive anchor for ground truth");

    RowMatrix<Scalar> log_probs(num_anchors, kNumClasses);
    for (int a = 0; a < num_anchors; ++a) log_probs.row(a) = LogSoftmax(preds.class_logits.row(base + a));

    std::stable_sort(neg.begin(), neg.end(), [&](int a, int b) { return log_probs(a, 0) < log_probs(b, 0); });
    const std::size_t keep =
        std::min(neg.size(), static_cast<std::size_t>(config.negatives_per_positive) * pos.size());
    neg.resize(keep);

    const Scalar cls_norm = Scalar(1) / static_cast<Scalar>(pos.size() + neg.size());
    const Scalar loc_norm = Scalar(1) / static_cast<Scalar>(pos.size());
    Scalar cls = 0;
    Scalar loc = 0;
    auto add_ce = [&](int a, int cls_index) {
      cls -= log_probs(a, cls_index);
      if (grad) {
        auto g = grad->class_logits.row(base + a);
        g = log_probs.row(a).array().exp().matrix();
        g(cls_index) -= Scalar(1);
        g *= cls_norm * inv_batch;
      }
    };
    for (int a : pos) {
      add_ce(a, target.label.index());
      const BoxOffsets t = Encode(target.box, anchors[static_cast<std::size_t>(a)].box, config.variances);
      const Scalar goal[kNumOffsets] = {static_cast<Scalar>(t.t_cx), static_cast<Scalar>(t.t_cy),
                                        static_cast<Scalar>(t.t_w), static_cast<Scalar>(t.t_h)};
      for (int k = 0; k < kNumOffsets; ++k) {
        const Scalar diff = preds.box_offsets(base + a, k) - goal[k];
        loc += SmoothL1(diff);
        if (grad) grad->box_offsets(base + a, k) = SmoothL1Grad(diff) * loc_norm * inv_batch;
      }
    }
    for (int a : neg) add_ce(a, 0);

    const double image_cls = static_cast<double>(cls * cls_norm);
    const double image_loc = static_cast<double>(loc * loc_norm);
    out.classification += image_cls / preds.batch;
    out.localization += image_loc / preds.batch;
    out.positives += static_cast<int>(pos.size());
    out.negatives += static_cast<int>(neg.size());
  }
  out.total = out.classification + out.localization;
  return out;
}

}  // namespace gesturedet
