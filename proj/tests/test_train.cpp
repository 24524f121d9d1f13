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

#include <cmath>
#include <numeric>
#include <set>

#include "doctest.h"
#include "gesturedet/dataset.hpp"
#include "gesturedet/error.hpp"
#include "gesturedet/synth.hpp"
#include "gesturedet/train.hpp"
#include "support/temp_dir.hpp"

using namespace gesturedet;
using gesturedet::testing::TempDir;

TEST_CASE("sgd step on a one-parameter quadratic") {
  // L(p) = 0.5 * (p - 3)^2, so g = p - 3.
  Vector<double> p(1), v(1), g(1);
  p << 1.0;
  v << 0.0;
  g << p[0] - 3.0;
  SgdMomentumUpdate<double>(p, g, v, {0.1, 0.9});
  CHECK(p[0] == doctest::Approx(1.0 - 0.1 * -2.0));
  g << p[0] - 3.0;
  const double before = p[0];
  const double v1 = v[0];
  SgdMomentumUpdate<double>(p, g, v, {0.1, 0.9});
  CHECK(p[0] == doctest::Approx(before + 0.9 * v1 - 0.1 * g[0]));
}

TEST_CASE("training steps on synthetic frames") {
  TempDir tmp;
  SynthOptions opt;
  opt.n_subjects = 1;
  opt.frames_per_sequence = 4;
  opt.width = 32;
  opt.height = 24;
  Synthesize(tmp / "ds", opt);
  const DatasetStore store = DatasetStore::OpenReadOnly(tmp / "ds");
  std::vector<FrameId> ids;
  for (const auto& m : store.records()) ids.push_back(m.frame_id);
  const ModelConfig config = ModelConfig::Micro(32, 24, 0.25);

  SUBCASE("zero learning rate leaves parameters unchanged") {
    TrainState state = TrainState::Initialize(config, 1);
    const auto before = state.params.Flatten();
    BatchSampler sampler(store, ids, AugmentParams{}, 2);
    const LossBreakdown loss = TrainStep(state, sampler.Next(8), {0.0, 0.9});
    CHECK(std::isfinite(loss.total));
    CHECK(state.params.Flatten() == before);
    CHECK(state.step == 1);
  }

  SUBCASE("training is deterministic") {
    auto run = [&]() {
      TrainState state = TrainState::Initialize(config, 5);
      BatchSampler sampler(store, ids, AugmentParams{}, 6);
      TrainOptions options;
      options.steps = 3;
      options.batch_size = 4;
      Train(state, sampler, options);
      return state.params.Flatten();
    };
    CHECK(run() == run());
  }

  SUBCASE("loss decreases over the first hundred steps") {
    TrainState state = TrainState::Initialize(config, 3);
    BatchSampler sampler(store, ids, AugmentParams{}, 4);
    TrainOptions options;
    options.steps = 100;
    options.batch_size = 16;
    options.sgd.learning_rate = 0.03;
    int calls = 0;
    options.on_step = [&](std::int64_t step, const LossBreakdown&) { CHECK(step == ++calls); };
    const std::vector<double> history = Train(state, sampler, options);
    REQUIRE(history.size() == 100);
    const double head = std::accumulate(history.begin(), history.begin() + 20, 0.0) / 20;
    const double tail = std::accumulate(history.end() - 20, history.end(), 0.0) / 20;
    MESSAGE("loss " << head << " -> " << tail);
    CHECK(tail < head);
  }

  SUBCASE("divergence aborts with a diagnostic") {
    TrainState state = TrainState::Initialize(config, 3);
    BatchSampler sampler(store, ids, AugmentParams{}, 4);
    bool aborted = false;
    try {
      for (int i = 0; i < 50; ++i) TrainStep(state, sampler.Next(8), {1e6, 0.9});
    } catch (const Error& e) {
      aborted = e.code() == ErrorCode::kTrainingAborted;
      CHECK(std::string(e.what()).find("loss is") != std::string::npos);
    }
    CHECK(aborted);
  }

  SUBCASE("sampler covers every frame each epoch") {
    AugmentParams none;
    none.brightness_min = none.brightness_max = 0.0;
    none.contrast_min = none.contrast_max = 1.0;
    none.crop_probability = 0.0;
    none.pad_probability = 0.0;
    BatchSampler sampler(store, ids, none, 9);
    const TrainBatch batch = sampler.Next(static_cast<int>(ids.size()));
    std::multiset<double> seen, expected;
    for (const auto& t : batch.targets) seen.insert(t.box.cx * 1000 + t.box.cy + t.label.index() * 1e6);
    for (const auto& m : store.records()) expected.insert(m.bbox.cx * 1000 + m.bbox.cy + m.label.index() * 1e6);
    CHECK(seen == expected);
  }
}
