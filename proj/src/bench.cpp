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

#include "gesturedet/bench.hpp"

#include <pthread.h>
#include <sched.h>
#include <sys/utsname.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <thread>

#include <fmt/format.h>

#include "gesturedet/error.hpp"
#include "gesturedet/rng.hpp"
#include "json.hpp"

namespace gesturedet {
namespace {

using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

double Ms(Clock::duration d) { return std::chrono::duration<double, std::milli>(d).count(); }

int FirstAllowedCpu() {
  cpu_set_t set;
  CPU_ZERO(&set);
  if (sched_getaffinity(0, sizeof(set), &set) != 0) return 0;
  for (int c = 0; c < CPU_SETSIZE; ++c) {
    if (CPU_ISSET(c, &set)) return c;
  }
  return 0;
}

void PinCurrentThread(int cpu) {
  cpu_set_t set;
  CPU_ZERO(&set);
  CPU_SET(cpu, &set);
  if (pthread_setaffinity_np(pthread_self(), sizeof(set), &set) != 0) {
    throw Error(ErrorCode::kConfig, fmt::format("cannot pin benchmark thread to cpu {}", cpu));
  }
}

json StatsJson(const StageStats& s) {
  return {{"mean_ms", s.mean_ms}, {"min_ms", s.min_ms}, {"max_ms", s.max_ms}, {"p95_ms", s.p95_ms}};
}

}  // namespace

Detector::Detector(ModelConfig config, ParameterSet<float> params)
    : config_(std::move(config)), params_(std::move(params)), anchors_(GenerateAnchors(config_.anchor_config())) {
  ValidateModelConfig(config_);
  if (params_.size() != ParameterLayout(config_).size()) {
    throw Error(ErrorCode::kShape, "parameter set does not match " + config_.name());
  }
}

Tensor<float> Detector::Preprocess(const GrayImage& image) const {
  return gesturedet::Preprocess<float>(config_, std::span<const GrayImage>(&image, 1));
}

Predictions<float> Detector::Infer(const Tensor<float>& input) const { return Forward(config_, params_, input); }

Detection Detector::Postprocess(const Predictions<float>& preds) const {
  return SelectTopDetection(preds, 0, anchors_, config_.variances);
}

std::vector<Detection> Detector::RunBatch(std::span<const GrayImage> images) const {
  std::vector<Detection> out;
  if (images.empty()) return out;
  const Predictions<float> preds = Forward(config_, params_, gesturedet::Preprocess<float>(config_, images));
  out.reserve(images.size());
  for (int i = 0; i < static_cast<int>(images.size()); ++i) {
    out.push_back(SelectTopDetection(preds, i, anchors_, config_.variances));
  }
  return out;
}

StageStats Summarize(std::span<const double> samples_ms) {
  if (samples_ms.empty()) throw Error(ErrorCode::kEmptySelection, "no latency samples");
  std::vector<double> sorted(samples_ms.begin(), samples_ms.end());
  std::sort(sorted.begin(), sorted.end());
  StageStats s;
  s.mean_ms = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(sorted.size());
  s.min_ms = sorted.front();
  s.max_ms = sorted.back();
  const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(sorted.size())));
  s.p95_ms = sorted[std::max<std::size_t>(rank, 1) - 1];
  return s;
}

MachineInfo DescribeMachine() {
  MachineInfo info;
  std::ifstream cpuinfo("/proc/cpuinfo");
  for (std::string line; std::getline(cpuinfo, line);) {
    if (line.rfind("model name", 0) == 0) {
      const auto colon = line.find(':');
      if (colon != std::string::npos) info.cpu_model = line.substr(line.find_first_not_of(' ', colon + 1));
      break;
    }
  }
  if (info.cpu_model.empty()) info.cpu_model = "unknown";
  info.hardware_threads = std::thread::hardware_concurrency();
  utsname u{};
  if (uname(&u) == 0) info.kernel = std::string(u.sysname) + " " + u.release + " " + u.machine;
#if defined(__clang__)
  info.compiler = "clang " __clang_version__;
#elif defined(__GNUC__)
  info.compiler = "gcc " __VERSION__;
#else
  info.compiler = "unknown";
#endif
  return info;
}

LatencyReport Benchmark(const Detector& detector, const GrayImage& frame, const BenchOptions& options) {
  if (options.runs < 30) throw Error(ErrorCode::kDomain, fmt::format("runs must be >= 30, got {}", options.runs));
  if (options.warmup < 5) throw Error(ErrorCode::kDomain, fmt::format("warmup must be >= 5, got {}", options.warmup));

  LatencyReport report;
  report.model_name = detector.config().name();
  report.depth_multiplier = detector.config().depth_multiplier;
  report.runs = options.runs;
  report.warmup = options.warmup;
  report.machine = DescribeMachine();
  report.machine.pinned_cpu = options.cpu >= 0 ? options.cpu : FirstAllowedCpu();
  Eigen::setNbThreads(1);

  std::exception_ptr failure;
  std::thread worker([&] {
    try {
      PinCurrentThread(report.machine.pinned_cpu);
      for (int i = 0; i < options.warmup + options.runs; ++i) {
        const auto t0 = Clock::now();
        const Tensor<float> input = detector.Preprocess(frame);
        const auto t1 = Clock::now();
        const Predictions<float> preds = detector.Infer(input);
        const auto t2 = Clock::now();
        const Detection det = detector.Postprocess(preds);
        const auto t3 = Clock::now();
        static_cast<void>(det);
        if (i < options.warmup) continue;
        report.preprocess_ms.push_back(Ms(t1 - t0));
        report.inference_ms.push_back(Ms(t2 - t1));
        report.postprocess_ms.push_back(Ms(t3 - t2));
        report.total_ms.push_back(Ms(t3 - t0));
      }
    } catch (...) {
      failure = std::current_exception();
    }
  });
  worker.join();
  if (failure) std::rethrow_exception(failure);

  report.preprocess = Summarize(report.preprocess_ms);
  report.inference = Summarize(report.inference_ms);
  report.postprocess = Summarize(report.postprocess_ms);
  report.total = Summarize(report.total_ms);
  return report;
}

double BootstrapOrderingConfidence(const std::vector<std::vector<double>>& groups, int resamples, std::uint64_t seed) {
  if (groups.size() < 2) throw Error(ErrorCode::kDomain, "ordering needs at least two groups");
  if (resamples < 1) throw Error(ErrorCode::kDomain, "resamples must be positive");
  for (const auto& g : groups) {
    if (g.empty()) throw Error(ErrorCode::kEmptySelection, "empty sample group");
  }
  Rng rng(seed);
  std::int64_t ordered = 0;
  std::vector<double> means(groups.size());
  for (int r = 0; r < resamples; ++r) {
    for (std::size_t k = 0; k < groups.size(); ++k) {
      const auto& g = groups[k];
      double sum = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) sum += g[rng.Below(g.size())];
      means[k] = sum / static_cast<double>(g.size());
    }
    bool inc = true;
    for (std::size_t k = 1; k < means.size(); ++k) inc = inc && means[k - 1] < means[k];
    if (inc) ++ordered;
  }
  return static_cast<double>(ordered) / resamples;
}

namespace {

template <typename BatchPredict>
EvalReport EvaluateImpl(const BatchPredict& predict, const DatasetStore& store, std::span<const FrameId> ids,
                        std::optional<double> iou_gate) {
  if (ids.empty()) throw Error(ErrorCode::kEmptySelection, "evaluation set is empty");
  if (iou_gate && !(*iou_gate >= 0.0 && *iou_gate <= 1.0)) {
    throw Error(ErrorCode::kDomain, fmt::format("iou gate must lie in [0, 1], got {}", *iou_gate));
  }
  EvalReport report;
  report.iou_gate = iou_gate;
  report.confusion.setZero();
  double iou_sum = 0.0;
  std::int64_t iou_50 = 0;
  constexpr std::size_t kChunk = 64;
  for (std::size_t begin = 0; begin < ids.size(); begin += kChunk) {
    const auto chunk = ids.subspan(begin, std::min(kChunk, ids.size() - begin));
    std::vector<GrayImage> images;
    images.reserve(chunk.size());
    for (FrameId id : chunk) images.push_back(store.LoadImage(id));
    const std::vector<Detection> dets = predict(std::span<const GrayImage>(images));
    for (std::size_t i = 0; i < chunk.size(); ++i) {
      const FrameMeta& meta = store.meta(chunk[i]);
      const Detection& det = dets[i];
      ++report.confusion(meta.label.index(), det.label.index());
      ++report.frames;
      if (det.label != meta.label) continue;
      ++report.label_correct;
      const double iou = Iou(det.box, meta.bbox);
      iou_sum += iou;
      if (iou >= 0.5) ++iou_50;
      if (!iou_gate || iou >= *iou_gate) ++report.correct;
    }
  }
  report.precision = static_cast<double>(report.correct) / static_cast<double>(report.frames);
  if (report.label_correct > 0) {
    report.mean_iou = iou_sum / static_cast<double>(report.label_correct);
    report.fraction_iou_50 = static_cast<double>(iou_50) / static_cast<double>(report.label_correct);
  }
  return report;
}

}  // namespace

EvalReport EvaluateWith(const PredictFn& predict, const DatasetStore& store, std::span<const FrameId> ids,
                        std::optional<double> iou_gate) {
  auto batch = [&](std::span<const GrayImage> images) {
    std::vector<Detection> out;
    for (const auto& img : images) out.push_back(predict(img));
    return out;
  };
  return EvaluateImpl(batch, store, ids, iou_gate);
}

EvalReport Evaluate(const Detector& detector, const DatasetStore& store, std::span<const FrameId> ids,
                    std::optional<double> iou_gate) {
  auto batch = [&](std::span<const GrayImage> images) { return detector.RunBatch(images); };
  return EvaluateImpl(batch, store, ids, iou_gate);
}

double SustainedFps(const Detector& detector, std::span<const GrayImage> frames, double duration_s) {
  if (frames.empty()) throw Error(ErrorCode::kEmptySelection, "frame source is empty");
  if (!(duration_s >= 5.0)) throw Error(ErrorCode::kDomain, fmt::format("duration must be >= 5 s, got {}", duration_s));
  const auto budget = std::chrono::duration<double>(duration_s);
  const auto start = Clock::now();
  std::int64_t done = 0;
  Clock::time_point now = start;
  while (now - start < budget) {
    static_cast<void>(detector.Run(frames[static_cast<std::size_t>(done) % frames.size()]));
    ++done;
    now = Clock::now();
  }
  return static_cast<double>(done) / std::chrono::duration<double>(now - start).count();
}

std::string FormatBenchTable(std::span<const BenchRow> rows) {
  const std::string header = fmt::format("{:<24} {:>16} {:>10} {:>24} {:>20}\n", "Model", "Depth multiplier",
                                         "Precision", "Inference latency (ms)", "Total latency (ms)");
  std::string out = header;
  out += std::string(header.size() - 1, '-') + "\n";
  for (const auto& row : rows) {
    const std::string precision = row.precision ? fmt::format("{:.4f}", *row.precision) : "n/a";
    out += fmt::format("{:<24} {:>16.2f} {:>10} {:>24.3f} {:>20.3f}\n", row.latency.model_name,
                       row.latency.depth_multiplier, precision, row.latency.inference.mean_ms,
                       row.latency.total.mean_ms);
  }
  return out;
}

std::string BenchRowToJson(const BenchRow& row) {
  const LatencyReport& r = row.latency;
  json j;
  j["model"] = r.model_name;
  j["depth_multiplier"] = r.depth_multiplier;
  j["precision"] = row.precision ? json(*row.precision) : json(nullptr);
  j["runs"] = r.runs;
  j["warmup"] = r.warmup;
  j["preprocess"] = StatsJson(r.preprocess);
  j["inference"] = StatsJson(r.inference);
  j["postprocess"] = StatsJson(r.postprocess);
  j["total"] = StatsJson(r.total);
  j["machine"] = {{"cpu_model", r.machine.cpu_model},
                  {"hardware_threads", r.machine.hardware_threads},
                  {"pinned_cpu", r.machine.pinned_cpu},
                  {"kernel", r.machine.kernel},
                  {"compiler", r.machine.compiler}};
  j["samples_ms"] = {{"preprocess", r.preprocess_ms},
                     {"inference", r.inference_ms},
                     {"postprocess", r.postprocess_ms},
                     {"total", r.total_ms}};
  return j.dump();
}

std::string EvalReportToJson(const EvalReport& report) {
  json j;
  j["frames"] = report.frames;
  j["correct"] = report.correct;
  j["precision"] = report.precision;
  j["iou_gate"] = report.iou_gate ? json(*report.iou_gate) : json(nullptr);
  j["label_correct"] = report.label_correct;
  j["mean_iou"] = report.mean_iou;
  j["fraction_iou_50"] = report.fraction_iou_50;
  json classes = json::array();
  for (int i = 0; i < kNumClasses; ++i) classes.push_back(std::string(ClassLabel::FromIndex(i).name()));
  j["classes"] = classes;
  json rows = json::array();
  for (int r = 0; r < kNumClasses; ++r) {
    json row = json::array();
    for (int c = 0; c < kNumClasses; ++c) row.push_back(report.confusion(r, c));
    rows.push_back(row);
  }
  j["confusion"] = rows;
  return j.dump();
}

}  // namespace gesturedet
