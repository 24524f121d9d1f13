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

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <spdlog/cfg/env.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "gesturedet/bench.hpp"
#include "gesturedet/capture_server.hpp"
#include "gesturedet/checkpoint.hpp"
#include "gesturedet/dataset.hpp"
#include "gesturedet/error.hpp"
#include "gesturedet/protocol.hpp"
#include "gesturedet/synth.hpp"
#include "gesturedet/train.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace gesturedet;

namespace {

std::string ReadFile(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::kStoreIo, "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw Error(ErrorCode::kStoreIo, "cannot write " + p.string());
}

void Emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text << '\n';
  } else {
    WriteFile(out_path, text + "\n");
    spdlog::info("wrote {}", out_path);
  }
}

void LogConfig(std::string_view command, const json& config) {
  spdlog::info("{} config: {}", command, config.dump());
}

std::vector<FrameId> AllIds(const DatasetStore& store) {
  std::vector<FrameId> ids;
  ids.reserve(store.size());
  for (const auto& m : store.records()) ids.push_back(m.frame_id);
  return ids;
}

struct SplitChoice {
  std::string split_file;
  double eval_fraction = 0.0;
  std::uint64_t seed = 0;
};

/// A split file wins; otherwise a fresh split when eval_fraction > 0.
std::optional<SplitResult> ResolveSplit(const DatasetStore& store, const SplitChoice& c) {
  if (!c.split_file.empty()) return SplitFromJson(ReadFile(c.split_file));
  if (c.eval_fraction > 0.0) return SplitBySubject(store, c.eval_fraction, c.seed);
  return std::nullopt;
}

std::vector<double> ParseList(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorCode::kConfig, "bad number '" + item + "' in list '" + text + "'");
    }
  }
  if (out.empty()) throw Error(ErrorCode::kConfig, "empty list");
  return out;
}

std::vector<std::string> SplitCommas(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) out.push_back(item);
  return out;
}

json DetectionJson(const Detection& d) {
  return {{"label", d.label.name()},
          {"confidence", d.confidence},
          {"bbox", {d.box.cx, d.box.cy, d.box.w, d.box.h}},
          {"anchor", d.anchor_index}};
}

// ---------------------------------------------------------------------------

struct SynthArgs {
  std::string out;
  SynthOptions options;
};

int RunSynth(const SynthArgs& a) {
  LogConfig("synth", {{"out", a.out},
                      {"subjects", a.options.n_subjects},
                      {"frames_per_sequence", a.options.frames_per_sequence},
                      {"width", a.options.width},
                      {"height", a.options.height},
                      {"duration_s", a.options.duration_s},
                      {"seed", a.options.seed}});
  Synthesize(a.out, a.options);
  const DatasetStore store = DatasetStore::OpenReadOnly(a.out);
  spdlog::info("synthesized {} frames into {}", store.size(), a.out);
  return 0;
}

struct StatsArgs {
  std::string store;
  std::string split_file;
  std::string side = "all";
  std::string out;
};

int RunStats(const StatsArgs& a) {
  LogConfig("stats", {{"store", a.store}, {"split", a.split_file}, {"side", a.side}, {"out", a.out}});
  const DatasetStore store = DatasetStore::OpenReadOnly(a.store);
  std::vector<FrameId> ids;
  if (a.side != "all") {
    if (a.split_file.empty()) throw Error(ErrorCode::kConfig, "--side needs --split");
    const SplitResult split = SplitFromJson(ReadFile(a.split_file));
    ids = a.side == "train" ? split.train_ids : split.eval_ids;
    if (ids.empty()) throw Error(ErrorCode::kEmptySelection, "the " + a.side + " side of the split is empty");
  }
  Emit(StatsToJson(ComputeStats(store, ids)), a.out);
  return 0;
}

struct SplitArgs {
  std::string store;
  double eval_fraction = 1.0 / 3.0;
  std::uint64_t seed = 0;
  std::string out;
};

int RunSplit(const SplitArgs& a) {
  LogConfig("split", {{"store", a.store}, {"eval_fraction", a.eval_fraction}, {"seed", a.seed}, {"out", a.out}});
  const DatasetStore store = DatasetStore::OpenReadOnly(a.store);
  const SplitResult split = SplitBySubject(store, a.eval_fraction, a.seed);
  spdlog::info("train {} frames / {} subjects, eval {} frames / {} subjects", split.train_ids.size(),
               split.train_subjects.size(), split.eval_ids.size(), split.eval_subjects.size());
  Emit(SplitToJson(split), a.out);
  return 0;
}

struct TrainArgs {
  std::string store;
  SplitChoice split{"", 1.0 / 3.0, 0};
  std::string profile = "micro";
  int width = 0;
  int height = 0;
  double depth_multiplier = 1.0;
  int steps = 2000;
  int batch = 32;
  double lr = 0.03;
  double momentum = 0.9;
  std::uint64_t seed = 0;
  int log_every = 50;
  int pad_fill = 128;
  std::string out;
};

int RunTrain(const TrainArgs& a) {
  const DatasetStore store = DatasetStore::OpenReadOnly(a.store);
  const int width = a.width > 0 ? a.width : store.width();
  const int height = a.height > 0 ? a.height : store.height();
  const ModelConfig config = ModelConfig::Profile(a.profile, width, height, a.depth_multiplier);
  if (a.pad_fill < 0 || a.pad_fill > 255) throw Error(ErrorCode::kConfig, "--pad-fill must lie in [0, 255]");
  AugmentParams augment;
  augment.pad_fill = static_cast<std::uint8_t>(a.pad_fill);
  ValidateAugmentParams(augment);
  LogConfig("train", {{"store", a.store},
                      {"split", a.split.split_file},
                      {"eval_fraction", a.split.eval_fraction},
                      {"steps", a.steps},
                      {"batch", a.batch},
                      {"learning_rate", a.lr},
                      {"momentum", a.momentum},
                      {"seed", a.seed},
                      {"pad_fill", a.pad_fill},
                      {"out", a.out},
                      {"model", json::parse(ModelConfigToJson(config))}});

  const std::optional<SplitResult> split = ResolveSplit(store, a.split);
  const std::vector<FrameId> train_ids = split ? split->train_ids : AllIds(store);
  if (train_ids.empty()) throw Error(ErrorCode::kEmptySelection, "no training frames");

  TrainState state = TrainState::Initialize(config, a.seed);
  BatchSampler sampler(store, train_ids, augment, a.seed + 1);
  TrainOptions options;
  options.steps = a.steps;
  options.batch_size = a.batch;
  options.sgd = {a.lr, a.momentum};
  const auto start = std::chrono::steady_clock::now();
  options.on_step = [&](std::int64_t step, const LossBreakdown& loss) {
    if (a.log_every > 0 && (step % a.log_every == 0 || step == a.steps)) {
      const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      spdlog::info("step {} loss {:.4f} (cls {:.4f}, loc {:.4f}) {:.1f}s", step, loss.total, loss.classification,
                   loss.localization, elapsed);
    }
  };
  Train(state, sampler, options);
  SaveCheckpoint(a.out, config, state.params);
  spdlog::info("saved {}", a.out);

  json summary = {{"checkpoint", a.out}, {"steps", a.steps}};
  if (split && !split->eval_ids.empty()) {
    const EvalReport report = Evaluate(Detector(config, state.params), store, split->eval_ids);
    summary["eval_precision"] = report.precision;
    summary["eval_frames"] = report.frames;
  }
  std::cout << summary.dump() << '\n';
  return 0;
}

struct EvalArgs {
  std::string checkpoint;
  std::string store;
  std::string split_file;
  double iou_gate = -1.0;
  std::string out;
};

int RunEval(const EvalArgs& a) {
  LogConfig("eval", {{"checkpoint", a.checkpoint},
                     {"store", a.store},
                     {"split", a.split_file},
                     {"iou_gate", a.iou_gate >= 0.0 ? json(a.iou_gate) : json(nullptr)},
                     {"out", a.out}});
  Checkpoint ckpt = LoadCheckpoint(a.checkpoint);
  const DatasetStore store = DatasetStore::OpenReadOnly(a.store);
  const std::vector<FrameId> ids = a.split_file.empty() ? AllIds(store) : SplitFromJson(ReadFile(a.split_file)).eval_ids;
  const std::optional<double> gate = a.iou_gate >= 0.0 ? std::optional<double>(a.iou_gate) : std::nullopt;
  const EvalReport report = Evaluate(Detector(ckpt.config, std::move(ckpt.params)), store, ids, gate);
  spdlog::info("precision {:.4f} over {} frames", report.precision, report.frames);
  Emit(EvalReportToJson(report), a.out);
  return 0;
}

struct BenchArgs {
  std::string profile = "full";
  int width = 320;
  int height = 240;
  std::string multipliers = "0.25,0.5,1.0";
  std::string checkpoints;
  std::string store;
  std::string split_file;
  int runs = 30;
  int warmup = 5;
  int cpu = -1;
  std::uint64_t seed = 0;
  std::string jsonl;
};

int RunBench(const BenchArgs& a) {
  LogConfig("bench", {{"profile", a.profile},
                      {"width", a.width},
                      {"height", a.height},
                      {"multipliers", a.multipliers},
                      {"checkpoints", a.checkpoints},
                      {"store", a.store},
                      {"split", a.split_file},
                      {"runs", a.runs},
                      {"warmup", a.warmup},
                      {"cpu", a.cpu},
                      {"seed", a.seed},
                      {"jsonl", a.jsonl}});
  std::vector<Detector> detectors;
  if (!a.checkpoints.empty()) {
    for (const auto& path : SplitCommas(a.checkpoints)) {
      Checkpoint c = LoadCheckpoint(path);
      detectors.emplace_back(c.config, std::move(c.params));
    }
  } else {
    for (double m : ParseList(a.multipliers)) {
      const ModelConfig config = ModelConfig::Profile(a.profile, a.width, a.height, m);
      detectors.emplace_back(config, TrainState::Initialize(config, a.seed).params);
    }
  }
  std::optional<DatasetStore> store;
  std::vector<FrameId> eval_ids;
  if (!a.store.empty()) {
    if (a.checkpoints.empty()) throw Error(ErrorCode::kConfig, "precision needs trained --checkpoints");
    store = DatasetStore::OpenReadOnly(a.store);
    eval_ids = a.split_file.empty() ? AllIds(*store) : SplitFromJson(ReadFile(a.split_file)).eval_ids;
  }

  BenchOptions options;
  options.runs = a.runs;
  options.warmup = a.warmup;
  options.cpu = a.cpu;
  std::vector<BenchRow> rows;
  for (const Detector& det : detectors) {
    const ModelConfig& c = det.config();
    // Mid-gray frame at the model input size; latency does not depend on content.
    const GrayImage frame = GrayImage::Constant(c.input_height, c.input_width, 128);
    spdlog::info("benchmarking {}", c.name());
    BenchRow row;
    row.latency = Benchmark(det, frame, options);
    if (store) row.precision = Evaluate(det, *store, eval_ids).precision;
    rows.push_back(std::move(row));
  }
  std::cout << FormatBenchTable(rows);
  if (rows.size() >= 2) {
    std::vector<std::vector<double>> groups;
    for (const auto& r : rows) groups.push_back(r.latency.inference_ms);
    std::cout << fmt::format("P(mean inference latency strictly increasing down the table) = {:.4f}\n",
                             BootstrapOrderingConfidence(groups, 10000, a.seed));
  }
  std::string lines;
  for (const auto& r : rows) lines += BenchRowToJson(r) + "\n";
  if (a.jsonl.empty()) {
    std::cout << lines;
  } else {
    WriteFile(a.jsonl, lines);
    spdlog::info("wrote {}", a.jsonl);
  }
  return 0;
}

struct PredictArgs {
  std::string checkpoint;
  std::vector<std::string> images;
};

int RunPredict(const PredictArgs& a) {
  LogConfig("predict", {{"checkpoint", a.checkpoint}, {"images", a.images}});
  Checkpoint ckpt = LoadCheckpoint(a.checkpoint);
  const Detector det(ckpt.config, std::move(ckpt.params));
  for (const auto& path : a.images) {
    json j = DetectionJson(det.Run(ReadPgm(path)));
    j["image"] = path;
    std::cout << j.dump() << '\n';
  }
  return 0;
}

struct PlanArgs {
  std::string subject = "subject-00";
  std::string scene = "scene-00";
  double duration_s = kDefaultSequenceDuration;
  std::string out;
};

int RunPlan(const PlanArgs& a) {
  LogConfig("plan", {{"subject", a.subject}, {"scene", a.scene}, {"duration_s", a.duration_s}, {"out", a.out}});
  Emit(SessionPlanToJson(PlanDefaultSession(a.subject, a.scene, a.duration_s)), a.out);
  return 0;
}

struct ServeArgs {
  std::string plan;
  std::string store;
  std::string address = "127.0.0.1";
  int port = 8765;
  int width = 320;
  int height = 240;
};

int RunServe(const ServeArgs& a) {
  LogConfig("capture-serve", {{"plan", a.plan},
                              {"store", a.store},
                              {"address", a.address},
                              {"port", a.port},
                              {"width", a.width},
                              {"height", a.height}});
  if (a.port < 0 || a.port > 65535) throw Error(ErrorCode::kConfig, "--port must lie in [0, 65535]");
  CaptureServerOptions options;
  options.plan = SessionPlanFromJson(ReadFile(a.plan));
  options.store_dir = a.store;
  options.address = a.address;
  options.port = static_cast<std::uint16_t>(a.port);
  options.width = a.width;
  options.height = a.height;
  CaptureServer server(options);
  // Scripts read this line to find an ephemeral port.
  std::cout << "listening " << a.address << ":" << server.port() << std::endl;
  server.Run();
  std::cout << json{{"frames_accepted", server.frames_accepted()}}.dump() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  auto logger = spdlog::stderr_color_mt("gesturedet");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::info);
  // SPDLOG_LEVEL=debug (or warn, off, ...) overrides the default.
  spdlog::cfg::load_env_levels();

  CLI::App app{"Gesture detection pipeline: data, training, evaluation, benchmarking and capture."};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* c_synth = app.add_subcommand("synth", "Render a synthetic glyph dataset");
  c_synth->add_option("--out", synth.out, "Dataset directory to create")->required();
  c_synth->add_option("--subjects", synth.options.n_subjects, "Number of subjects")->capture_default_str();
  c_synth->add_option("--frames-per-sequence", synth.options.frames_per_sequence)->capture_default_str();
  c_synth->add_option("--width", synth.options.width)->capture_default_str();
  c_synth->add_option("--height", synth.options.height)->capture_default_str();
  c_synth->add_option("--duration", synth.options.duration_s, "Seconds per sequence")->capture_default_str();
  c_synth->add_option("--seed", synth.options.seed)->capture_default_str();

  StatsArgs stats;
  auto* c_stats = app.add_subcommand("stats", "Class counts, box heatmap and intensity histograms");
  c_stats->add_option("--store", stats.store)->required();
  c_stats->add_option("--split", stats.split_file, "Split document from `split`");
  c_stats->add_option("--side", stats.side)->check(CLI::IsMember({"all", "train", "eval"}))->capture_default_str();
  c_stats->add_option("--out", stats.out, "Write JSON here instead of stdout");

  SplitArgs split;
  auto* c_split = app.add_subcommand("split", "Subject-disjoint train/eval split");
  c_split->add_option("--store", split.store)->required();
  c_split->add_option("--eval-fraction", split.eval_fraction)->capture_default_str();
  c_split->add_option("--seed", split.seed)->capture_default_str();
  c_split->add_option("--out", split.out);

  TrainArgs train;
  auto* c_train = app.add_subcommand("train", "Train a detector with SGD and momentum");
  c_train->add_option("--store", train.store)->required();
  c_train->add_option("--split", train.split.split_file, "Split document; overrides --eval-fraction");
  c_train->add_option("--eval-fraction", train.split.eval_fraction, "0 trains on every frame")->capture_default_str();
  c_train->add_option("--split-seed", train.split.seed)->capture_default_str();
  c_train->add_option("--profile", train.profile)->check(CLI::IsMember({"micro", "full"}))->capture_default_str();
  c_train->add_option("--width", train.width, "Model input width (default: store width)");
  c_train->add_option("--height", train.height, "Model input height (default: store height)");
  c_train->add_option("--depth-multiplier", train.depth_multiplier)->capture_default_str();
  c_train->add_option("--steps", train.steps)->capture_default_str();
  c_train->add_option("--batch", train.batch)->capture_default_str();
  c_train->add_option("--lr", train.lr)->capture_default_str();
  c_train->add_option("--momentum", train.momentum)->capture_default_str();
  c_train->add_option("--seed", train.seed)->capture_default_str();
  c_train->add_option("--pad-fill", train.pad_fill, "Gray level for zoom-out padding")->capture_default_str();
  c_train->add_option("--log-every", train.log_every)->capture_default_str();
  c_train->add_option("--out", train.out, "Checkpoint path")->required();

  EvalArgs eval;
  auto* c_eval = app.add_subcommand("eval", "Precision and confusion matrix of a checkpoint");
  c_eval->add_option("--checkpoint", eval.checkpoint)->required();
  c_eval->add_option("--store", eval.store)->required();
  c_eval->add_option("--split", eval.split_file, "Evaluate the eval side only");
  c_eval->add_option("--iou-gate", eval.iou_gate, "Also require IoU >= gate");
  c_eval->add_option("--out", eval.out);

  BenchArgs bench;
  auto* c_bench = app.add_subcommand("bench", "Single-thread latency per depth multiplier");
  c_bench->add_option("--profile", bench.profile)->check(CLI::IsMember({"micro", "full"}))->capture_default_str();
  c_bench->add_option("--width", bench.width)->capture_default_str();
  c_bench->add_option("--height", bench.height)->capture_default_str();
  c_bench->add_option("--multipliers", bench.multipliers, "Comma-separated depth multipliers")->capture_default_str();
  c_bench->add_option("--checkpoints", bench.checkpoints, "Comma-separated checkpoints; replaces --multipliers");
  c_bench->add_option("--store", bench.store, "Dataset for the precision column");
  c_bench->add_option("--split", bench.split_file);
  c_bench->add_option("--runs", bench.runs)->capture_default_str();
  c_bench->add_option("--warmup", bench.warmup)->capture_default_str();
  c_bench->add_option("--cpu", bench.cpu, "CPU to pin to (default: first allowed)");
  c_bench->add_option("--seed", bench.seed)->capture_default_str();
  c_bench->add_option("--jsonl", bench.jsonl, "Write JSON lines here instead of stdout");

  PredictArgs predict;
  auto* c_predict = app.add_subcommand("predict", "Top detection for PGM images");
  c_predict->add_option("--checkpoint", predict.checkpoint)->required();
  c_predict->add_option("images", predict.images, "PGM files")->required();

  PlanArgs plan;
  auto* c_plan = app.add_subcommand("plan", "Write the default 24-sequence capture plan");
  c_plan->add_option("--subject", plan.subject)->capture_default_str();
  c_plan->add_option("--scene", plan.scene)->capture_default_str();
  c_plan->add_option("--duration", plan.duration_s)->capture_default_str();
  c_plan->add_option("--out", plan.out);

  ServeArgs serve;
  auto* c_serve = app.add_subcommand("capture-serve", "WebSocket capture service");
  c_serve->add_option("--plan", serve.plan)->required();
  c_serve->add_option("--store", serve.store)->required();
  c_serve->add_option("--address", serve.address)->capture_default_str();
  c_serve->add_option("--port", serve.port, "0 picks a free port")->capture_default_str();
  c_serve->add_option("--width", serve.width, "Frame width for a new store")->capture_default_str();
  c_serve->add_option("--height", serve.height, "Frame height for a new store")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*c_synth) return RunSynth(synth);
    if (*c_stats) return RunStats(stats);
    if (*c_split) return RunSplit(split);
    if (*c_train) return RunTrain(train);
    if (*c_eval) return RunEval(eval);
    if (*c_bench) return RunBench(bench);
    if (*c_predict) return RunPredict(predict);
    if (*c_plan) return RunPlan(plan);
    if (*c_serve) return RunServe(serve);
  } catch (const Error& e) {
    std::fprintf(stderr, "gesturedet: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "gesturedet: %s\n", e.what());
    return 1;
  }
  return 1;
}
