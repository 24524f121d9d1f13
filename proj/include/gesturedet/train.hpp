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
#include <functional>
#include <span>
#include <vector>

#include "gesturedet/augment.hpp"
#include "gesturedet/dataset.hpp"
#include "gesturedet/loss.hpp"
#include "gesturedet/network.hpp"

namespace gesturedet {

struct SgdParams {
  double learning_rate = 0.01;
  double momentum = 0.9;
};

/// v <- momentum * v - lr * g;  p <- p + v.
template <typename Scalar>
void SgdMomentumUpdate(Eigen::Ref<Vector<Scalar>> params, const Eigen::Ref<const Vector<Scalar>>& grads,
                       Eigen::Ref<Vector<Scalar>> velocity, const SgdParams& sgd) {
  velocity = static_cast<Scalar>(sgd.momentum) * velocity - static_cast<Scalar>(sgd.learning_rate) * grads;
  params += velocity;
}

/// Exclusively owned by one trainer; copy params out for concurrent inference.
struct TrainState {
  ModelConfig config;
  ParameterSet<float> params;
  ParameterSet<float> velocity;
  std::vector<Anchor> anchors;
  std::int64_t step = 0;

  static TrainState Initialize(const ModelConfig& config, std::uint64_t seed);
  static TrainState FromParams(const ModelConfig& config, ParameterSet<float> params);
};

struct TrainBatch {
  std::vector<GrayImage> images;
  std::vector<TrainTarget> targets;
};

/// One SGD step on the batch. Throws kTrainingAborted on a non-finite loss.
LossBreakdown TrainStep(TrainState& state, const TrainBatch& batch, const SgdParams& sgd);

/// Draws augmented training batches from a store. Frames are visited in a
/// fresh seeded shuffle every epoch; images are cached in memory.
class BatchSampler {
 public:
  BatchSampler(const DatasetStore& store, std::span<const FrameId> ids, const AugmentParams& augment,
               std::uint64_t seed);

  TrainBatch Next(int batch_size);
  std::size_t size() const { return images_.size(); }

 private:
  std::vector<GrayImage> images_;
  std::vector<TrainTarget> targets_;
  std::vector<std::size_t> order_;
  std::size_t cursor_ = 0;
  AugmentParams augment_;
  Rng rng_;
};

struct TrainOptions {
  int steps = 1000;
  int batch_size = 32;
  SgdParams sgd;
  /// Called after every step with the 1-based step number.
  std::function<void(std::int64_t, const LossBreakdown&)> on_step;
};

std::vector<double> Train(TrainState& state, BatchSampler& sampler, const TrainOptions& options);

}  // namespace gesturedet
