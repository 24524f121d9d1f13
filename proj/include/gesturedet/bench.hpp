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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gesturedet/dataset.hpp"
#include "gesturedet/detect.hpp"
#include "gesturedet/model_config.hpp"
#include "gesturedet/params.hpp"

namespace gesturedet {

/// Inference pipeline split into the three timed stages.
class Detector {
 public:
  Detector(ModelConfig config, ParameterSet<float> params);

  Tensor<float> Preprocess(const GrayImage& image) const;
  Predictions<float> Infer(const Tensor<float>& input) const;
  Detection Postprocess(const Predictions<float>& preds) const;
  Detection Run(const GrayImage& image) const { return Postprocess(Infer(Preprocess(image))); }
  /// Batched Run, identical results.
  std::vector<Detection> RunBatch(std::span<const GrayImage> images) const;

  const ModelConfig& config() const { return config_; }
  const ParameterSet<float>& params() const { return params_; }

 private:
  ModelConfig config_;
  ParameterSet<float> params_;
  std::vector<Anchor> anchors_;
};

struct StageStats {
  double mean_ms = 0.0;
  double min_ms = 0.0;
  double max_ms = 0.0;
  double p95_ms = 0.0;
};

/// Nearest-rank percentile.
StageStats Summarize(std::span<const double> samples_ms);

struct MachineInfo {
  std::string cpu_model;
  unsigned hardware_threads = 0;
  int pinned_cpu = -1;
  std::string kernel;
  std::string compiler;
};

MachineInfo DescribeMachine();

struct BenchOptions {
  int runs = 30;
  int warmup = 5;
  /// CPU for the timed worker; -1 picks the first CPU in the process mask.
  int cpu = -1;
};

struct LatencyReport {
  std::string model_name;
  double depth_multiplier = 1.0;
  int runs = 0;
  int warmup = 0;
  StageStats preprocess;
  StageStats inference;
  StageStats postprocess;
  StageStats total;
  std::vector<double> preprocess_ms;
  std::vector<double> inference_ms;
  std::vector<double> postprocess_ms;
  std::vector<double> total_ms;
  MachineInfo machine;
};

/// Times the pipeline on one worker thread pinned to a single CPU. Warmup
/// runs are discarded.
LatencyReport Benchmark(const Detector& detector, const GrayImage& frame, const BenchOptions& options = {});

/// Fraction of bootstrap resamples in which the sample means are strictly
/// increasing across the groups, each group resampled independently.
double BootstrapOrderingConfidence(const std::vector<std::vector<double>>& groups, int resamples = 10000,
                                   std::uint64_t seed = 0);

struct EvalReport {
  std::int64_t frames = 0;
  std::int64_t correct = 0;
  double precision = 0.0;
  std::optional<double> iou_gate;
  /// Frames whose label is right, ignoring the IoU gate.
  std::int64_t label_correct = 0;
  /// Over label-correct frames.
  double mean_iou = 0.0;
  double fraction_iou_50 = 0.0;
  /// Rows are ground truth, columns predictions.
  Eigen::Matrix<std::int64_t, kNumClasses, kNumClasses, Eigen::RowMajor> confusion;
};

using PredictFn = std::function<Detection(const GrayImage&)>;

/// No augmentation; a frame is correct when the label matches and, with a
/// gate, IoU(prediction, ground truth) >= gate.
EvalReport EvaluateWith(const PredictFn& predict, const DatasetStore& store, std::span<const FrameId> ids,
                        std::optional<double> iou_gate = std::nullopt);
EvalReport Evaluate(const Detector& detector, const DatasetStore& store, std::span<const FrameId> ids,
                    std::optional<double> iou_gate = std::nullopt);

/// End-to-end frames per second over a cycled frame stream.
double SustainedFps(const Detector& detector, std::span<const GrayImage> frames, double duration_s);

struct BenchRow {
  LatencyReport latency;
  std::optional<double> precision;
};

/// Model, Depth multiplier, Precision, Inference latency (ms), Total latency (ms).
std::string FormatBenchTable(std::span<const BenchRow> rows);
/// One JSON object, raw samples included.
std::string BenchRowToJson(const BenchRow& row);
std::string EvalReportToJson(const EvalReport& report);

}  // namespace gesturedet
