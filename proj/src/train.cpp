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

#include "gesturedet/train.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "gesturedet/detect.hpp"
#include "gesturedet/error.hpp"

namespace gesturedet {

TrainState TrainState::Initialize(const ModelConfig& config, std::uint64_t seed) {
  return FromParams(config, ParameterSet<float>::GlorotUniform(config, seed));
}

TrainState TrainState::FromParams(const ModelConfig& config, ParameterSet<float> params) {
  ValidateModelConfig(config);
  TrainState state;
  state.config = config;
  state.params = std::move(params);
  state.velocity = ParameterSet<float>::Zeros(config);
  if (!state.params.SameLayout(state.velocity)) throw Error(ErrorCode::kShape, "parameters do not match config");
  state.anchors = GenerateAnchors(config.anchor_config());
  return state;
}

LossBreakdown TrainStep(TrainState& state, const TrainBatch& batch, const SgdParams& sgd) {
  if (batch.images.empty() || batch.images.size() != batch.targets.size()) {
    throw Error(ErrorCode::kShape, "batch needs matching images and targets");
  }
  const Tensor<float> input = Preprocess<float>(state.config, batch.images);
  ForwardCache<float> cache;
  const Predictions<float> preds = Forward(state.config, state.params, input, &cache);
  Predictions<float> dpreds;
  const LossBreakdown loss = ComputeLoss(preds, std::span<const TrainTarget>(batch.targets), state.anchors,
                                         state.config, &dpreds);
  if (!std::isfinite(loss.total)) {
    std::ostringstream msg;
    msg << "loss is " << loss.total << " at step " << state.step + 1 << " (classification " << loss.classification
        << ", localization " << loss.localization << ", lr " << sgd.learning_rate << ")";
    throw Error(ErrorCode::kTrainingAborted, msg.str());
  }
  const ParameterSet<float> grads = Backward(state.config, state.params, cache, dpreds);
  for (std::size_t i = 0; i < state.params.size(); ++i) {
    SgdMomentumUpdate<float>(state.params.entry(i).values, grads.entry(i).values, state.velocity.entry(i).values, sgd);
  }
  ++state.step;
  return loss;
}

BatchSampler::BatchSampler(const DatasetStore& store, std::span<const FrameId> ids, const AugmentParams& augment,
                           std::uint64_t seed)
    : augment_(augment), rng_(seed) {
  ValidateAugmentParams(augment);
  if (ids.empty()) throw Error(ErrorCode::kEmptySelection, "no training frames");
  for (FrameId id : ids) {
    const FrameMeta& m = store.meta(id);
    images_.push_back(store.LoadImage(id));
    targets_.push_back({m.label, m.bbox});
  }
  order_.resize(images_.size());
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  cursor_ = order_.size();
}

TrainBatch BatchSampler::Next(int batch_size) {
  TrainBatch batch;
  for (int i = 0; i < batch_size; ++i) {
    if (cursor_ == order_.size()) {
      Shuffle(order_, rng_);
      cursor_ = 0;
    }
    const std::size_t k = order_[cursor_++];
    AugmentedFrame aug = Augment(images_[k], targets_[k].box, rng_, augment_);
    batch.images.push_back(std::move(aug.image));
    batch.targets.push_back({targets_[k].label, aug.bbox});
  }
  return batch;
}

std::vector<double> Train(TrainState& state, BatchSampler& sampler, const TrainOptions& options) {
  std::vector<double> history;
  history.reserve(static_cast<std::size_t>(options.steps));
  for (int s = 0; s < options.steps; ++s) {
    const LossBreakdown loss = TrainStep(state, sampler.Next(options.batch_size), options.sgd);
    history.push_back(loss.total);
    if (options.on_step) options.on_step(state.step, loss);
  }
  return history;
}

}  // namespace gesturedet
