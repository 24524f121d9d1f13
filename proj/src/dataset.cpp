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

#include "gesturedet/dataset.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

#include "gesturedet/error.hpp"
#include "gesturedet/rng.hpp"

namespace gesturedet {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

fs::path FramePath(const fs::path& dir, FrameId id) { return dir / "frames" / (std::to_string(id) + ".pgm"); }

std::string ReadText(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kStoreIo, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

std::string EncodeRecordLine(const FrameMeta& m) {
  json j;
  j["frame_id"] = m.frame_id;
  j["subject_id"] = m.subject_id;
  j["scene_id"] = m.scene_id;
  j["sequence_index"] = m.sequence_index;
  j["timestamp_s"] = m.timestamp_s;
  j["label"] = m.label.name();
  j["bbox"] = {m.bbox.cx, m.bbox.cy, m.bbox.w, m.bbox.h};
  return j.dump();
}

FrameMeta DecodeRecordLine(std::string_view line) {
  try {
    const json j = json::parse(line);
    FrameMeta m;
    m.frame_id = j.at("frame_id").get<FrameId>();
    m.subject_id = j.at("subject_id").get<std::string>();
    m.scene_id = j.at("scene_id").get<std::string>();
    m.sequence_index = j.at("sequence_index").get<int>();
    m.timestamp_s = j.at("timestamp_s").get<double>();
    m.label = ClassLabel::Parse(j.at("label").get<std::string>());
    const auto& b = j.at("bbox");
    if (!b.is_array() || b.size() != 4) throw Error(ErrorCode::kStoreIo, "bbox must have four numbers");
    m.bbox = {b[0].get<double>(), b[1].get<double>(), b[2].get<double>(), b[3].get<double>()};
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kStoreIo, std::string("malformed record line: ") + e.what());
  }
}

DatasetStore DatasetStore::Create(const fs::path& dir, int width, int height, const std::string& source) {
  if (width <= 0 || height <= 0) throw Error(ErrorCode::kConfig, "store dimensions must be positive");
  if (fs::exists(dir / "manifest.json")) throw Error(ErrorCode::kStoreIo, dir.string() + " already holds a dataset");
  fs::create_directories(dir / "frames");
  json manifest;
  manifest["version"] = kFormatVersion;
  manifest["width"] = width;
  manifest["height"] = height;
  manifest["source"] = source;
  json classes = json::array();
  for (int i = 0; i < kNumClasses; ++i) classes.push_back(ClassLabel::FromIndex(i).name());
  manifest["classes"] = classes;
  {
    std::ofstream out(dir / "manifest.json", std::ios::binary | std::ios::trunc);
    out << manifest.dump(2) << "\n";
    if (!out) throw Error(ErrorCode::kStoreIo, "cannot write manifest in " + dir.string());
  }
  { std::ofstream touch(dir / "records.jsonl", std::ios::binary | std::ios::app); }
  return OpenForWrite(dir);
}

DatasetStore DatasetStore::OpenReadOnly(const fs::path& dir) {
  DatasetStore store;
  store.dir_ = dir;
  const json manifest = [&] {
    try {
      return json::parse(ReadText(dir / "manifest.json"));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kStoreIo, std::string("malformed manifest: ") + e.what());
    }
  }();
  if (manifest.value("version", 0) != kFormatVersion) {
    throw Error(ErrorCode::kStoreIo, "unsupported dataset version in " + dir.string());
  }
  store.width_ = manifest.at("width").get<int>();
  store.height_ = manifest.at("height").get<int>();
  store.source_ = manifest.value("source", std::string("unknown"));
  const auto& classes = manifest.at("classes");
  for (int i = 0; i < kNumClasses; ++i) {
    if (classes.at(static_cast<std::size_t>(i)).get<std::string>() != ClassLabel::FromIndex(i).name()) {
      throw Error(ErrorCode::kStoreIo, "class table in manifest does not match");
    }
  }
  store.LoadRecords();
  return store;
}

DatasetStore DatasetStore::OpenForWrite(const fs::path& dir) {
  DatasetStore store = OpenReadOnly(dir);
  store.AcquireLock();
  store.writable_ = true;
  store.journal_ = std::make_unique<std::ofstream>(dir / "records.jsonl", std::ios::binary | std::ios::app);
  if (!*store.journal_) throw Error(ErrorCode::kStoreIo, "cannot open records.jsonl for append");
  return store;
}

void DatasetStore::AcquireLock() {
  const auto path = dir_ / "manifest.json";
  lock_fd_ = ::open(path.c_str(), O_RDONLY | O_CLOEXEC);
  if (lock_fd_ < 0) throw Error(ErrorCode::kStoreIo, "cannot open " + path.string());
  if (::flock(lock_fd_, LOCK_EX | LOCK_NB) != 0) {
    ::close(lock_fd_);
    lock_fd_ = -1;
    throw Error(ErrorCode::kStoreLocked, dir_.string() + " is open for writing elsewhere");
  }
}

void DatasetStore::LoadRecords() {
  std::ifstream in(dir_ / "records.jsonl", std::ios::binary);
  if (!in) throw Error(ErrorCode::kStoreIo, "missing records.jsonl in " + dir_.string());
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    FrameMeta m = DecodeRecordLine(line);
    if (index_.count(m.frame_id)) throw Error(ErrorCode::kDuplicateId, "frame " + std::to_string(m.frame_id));
    index_.emplace(m.frame_id, records_.size());
    next_id_ = std::max(next_id_, m.frame_id + 1);
    records_.push_back(std::move(m));
  }
}

DatasetStore::DatasetStore(DatasetStore&& other) noexcept
    : dir_(std::move(other.dir_)),
      width_(other.width_),
      height_(other.height_),
      source_(std::move(other.source_)),
      writable_(other.writable_),
      lock_fd_(std::exchange(other.lock_fd_, -1)),
      journal_(std::move(other.journal_)),
      records_(std::move(other.records_)),
      index_(std::move(other.index_)),
      next_id_(other.next_id_) {
  other.writable_ = false;
}

DatasetStore& DatasetStore::operator=(DatasetStore&& other) noexcept {
  if (this != &other) {
    if (lock_fd_ >= 0) ::close(lock_fd_);
    dir_ = std::move(other.dir_);
    width_ = other.width_;
    height_ = other.height_;
    source_ = std::move(other.source_);
    writable_ = std::exchange(other.writable_, false);
    lock_fd_ = std::exchange(other.lock_fd_, -1);
    journal_ = std::move(other.journal_);
    records_ = std::move(other.records_);
    index_ = std::move(other.index_);
    next_id_ = other.next_id_;
  }
  return *this;
}

DatasetStore::~DatasetStore() {
  journal_.reset();
  if (lock_fd_ >= 0) ::close(lock_fd_);  // releases the flock
}

void DatasetStore::Append(const FrameRecord& record) {
  if (!writable_) throw Error(ErrorCode::kStoreIo, "store is read-only");
  const FrameMeta& m = record.meta;
  if (index_.count(m.frame_id)) throw Error(ErrorCode::kDuplicateId, "frame " + std::to_string(m.frame_id));
  if (Width(record.image) != width_ || Height(record.image) != height_) {
    throw Error(ErrorCode::kDimensionMismatch,
                "image is " + std::to_string(Width(record.image)) + "x" + std::to_string(Height(record.image)) +
                    ", store expects " + std::to_string(width_) + "x" + std::to_string(height_));
  }
  if (m.label.is_none()) throw Error(ErrorCode::kConfig, "captured frames cannot be labeled None");
  ValidateBox(m.bbox);
  if (!(m.timestamp_s >= 0.0) || !std::isfinite(m.timestamp_s)) {
    throw Error(ErrorCode::kDomain, "timestamp must be a non-negative number");
  }

  WritePgm(FramePath(dir_, m.frame_id), record.image);
  *journal_ << EncodeRecordLine(m) << '\n';
  journal_->flush();
  if (!*journal_) throw Error(ErrorCode::kStoreIo, "failed to append to records.jsonl");
  index_.emplace(m.frame_id, records_.size());
  next_id_ = std::max(next_id_, m.frame_id + 1);
  records_.push_back(m);
}

const FrameMeta& DatasetStore::meta(FrameId id) const {
  const auto it = index_.find(id);
  if (it == index_.end()) throw Error(ErrorCode::kDomain, "no frame " + std::to_string(id));
  return records_[it->second];
}

GrayImage DatasetStore::LoadImage(FrameId id) const {
  GrayImage img = ReadPgm(FramePath(dir_, id));
  if (Width(img) != width_ || Height(img) != height_) {
    throw Error(ErrorCode::kDimensionMismatch, "frame " + std::to_string(id) + " has wrong dimensions");
  }
  return img;
}

FrameRecord DatasetStore::Load(FrameId id) const { return {meta(id), LoadImage(id)}; }

SplitResult SplitBySubject(std::span<const FrameMeta> records, double eval_fraction, std::uint64_t seed) {
  if (!(eval_fraction > 0.0 && eval_fraction < 1.0)) {
    throw Error(ErrorCode::kConfig, "eval fraction must lie in (0, 1)");
  }
  std::map<std::string, std::int64_t> frames_per_subject;
  for (const auto& m : records) ++frames_per_subject[m.subject_id];
  if (frames_per_subject.size() < 2) {
    throw Error(ErrorCode::kCannotSplit, "need at least two subjects, found " + std::to_string(frames_per_subject.size()));
  }
  std::vector<std::string> order;
  for (const auto& [subject, _] : frames_per_subject) order.push_back(subject);
  Rng rng(seed);
  Shuffle(order, rng);

  const double target = eval_fraction * static_cast<double>(records.size());
  std::set<std::string> eval_subjects;
  std::int64_t eval_frames = 0;
  for (const auto& subject : order) {
    const auto n = frames_per_subject[subject];
    if (std::abs(static_cast<double>(eval_frames + n) - target) < std::abs(static_cast<double>(eval_frames) - target)) {
      eval_subjects.insert(subject);
      eval_frames += n;
    }
  }
  if (eval_subjects.empty()) eval_subjects.insert(order.front());
  if (eval_subjects.size() == order.size()) {
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      if (eval_subjects.count(*it)) {
        eval_subjects.erase(*it);
        break;
      }
    }
  }

  SplitResult split;
  for (const auto& m : records) {
    (eval_subjects.count(m.subject_id) ? split.eval_ids : split.train_ids).push_back(m.frame_id);
  }
  for (const auto& [subject, _] : frames_per_subject) {
    (eval_subjects.count(subject) ? split.eval_subjects : split.train_subjects).push_back(subject);
  }
  return split;
}

SplitResult SplitBySubject(const DatasetStore& store, double eval_fraction, std::uint64_t seed) {
  return SplitBySubject(store.records(), eval_fraction, seed);
}

double DatasetStats::mean_intensity() const {
  std::int64_t n = 0;
  double sum = 0.0;
  for (int v = 0; v < 256; ++v) {
    n += intensity_all[static_cast<std::size_t>(v)];
    sum += static_cast<double>(v) * static_cast<double>(intensity_all[static_cast<std::size_t>(v)]);
  }
  return n > 0 ? sum / static_cast<double>(n) : 0.0;
}

DatasetStats ComputeStats(const DatasetStore& store, std::span<const FrameId> ids) {
  std::vector<FrameId> selection(ids.begin(), ids.end());
  if (selection.empty()) {
    for (const auto& m : store.records()) selection.push_back(m.frame_id);
  }
  if (selection.empty()) throw Error(ErrorCode::kEmptySelection, "no frames selected for statistics");

  DatasetStats stats;
  stats.image_width = store.width();
  stats.image_height = store.height();
  stats.center_heatmap.setZero();
  for (FrameId id : selection) {
    const FrameMeta& m = store.meta(id);
    const GrayImage img = store.LoadImage(id);
    ++stats.total_frames;
    ++stats.class_counts[static_cast<std::size_t>(m.label.index())];

    const int col = std::clamp(static_cast<int>(std::floor(m.bbox.cx * kHeatmapCols)), 0, kHeatmapCols - 1);
    const int row = std::clamp(static_cast<int>(std::floor(m.bbox.cy * kHeatmapRows)), 0, kHeatmapRows - 1);
    ++stats.center_heatmap(row, col);
    const int bin = std::clamp(static_cast<int>(std::floor(m.bbox.w * kWidthBins)), 0, kWidthBins - 1);
    ++stats.width_histogram[static_cast<std::size_t>(bin)];

    const PixelRect rect = ToPixelRect(m.bbox, store.width(), store.height());
    for (int y = 0; y < Height(img); ++y) {
      for (int x = 0; x < Width(img); ++x) {
        const std::uint8_t v = img(y, x);
        ++stats.intensity_all[v];
        if (rect.contains(x, y)) ++stats.intensity_in_box[v];
      }
    }
  }
  for (int c = 0; c < kNumClasses; ++c) {
    stats.class_fractions[static_cast<std::size_t>(c)] =
        static_cast<double>(stats.class_counts[static_cast<std::size_t>(c)]) / static_cast<double>(stats.total_frames);
  }
  return stats;
}

std::string StatsToJson(const DatasetStats& stats) {
  json j;
  j["total_frames"] = stats.total_frames;
  j["image_width"] = stats.image_width;
  j["image_height"] = stats.image_height;
  json classes = json::object();
  for (int c = 0; c < kNumClasses; ++c) {
    classes[ClassLabel::FromIndex(c).name()] = {{"count", stats.class_counts[static_cast<std::size_t>(c)]},
                                                {"fraction", stats.class_fractions[static_cast<std::size_t>(c)]}};
  }
  j["classes"] = classes;
  json heat = json::array();
  for (int r = 0; r < kHeatmapRows; ++r) {
    json row = json::array();
    for (int c = 0; c < kHeatmapCols; ++c) row.push_back(stats.center_heatmap(r, c));
    heat.push_back(row);
  }
  j["center_heatmap"] = heat;
  json bins = json::array();
  for (int b = 0; b <= kWidthBins; ++b) bins.push_back(static_cast<double>(b) * stats.image_width / kWidthBins);
  j["width_bin_edges_px"] = bins;
  j["width_histogram"] = stats.width_histogram;
  j["intensity_all"] = stats.intensity_all;
  j["intensity_in_box"] = stats.intensity_in_box;
  j["mean_intensity"] = stats.mean_intensity();
  return j.dump();
}

std::string SplitToJson(const SplitResult& split) {
  json j;
  j["train_subjects"] = split.train_subjects;
  j["eval_subjects"] = split.eval_subjects;
  j["train_ids"] = split.train_ids;
  j["eval_ids"] = split.eval_ids;
  return j.dump();
}

SplitResult SplitFromJson(std::string_view text) {
  try {
    const json j = json::parse(text);
    SplitResult split;
    split.train_subjects = j.at("train_subjects").get<std::vector<std::string>>();
    split.eval_subjects = j.at("eval_subjects").get<std::vector<std::string>>();
    split.train_ids = j.at("train_ids").get<std::vector<FrameId>>();
    split.eval_ids = j.at("eval_ids").get<std::vector<FrameId>>();
    return split;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfig, std::string("malformed split file: ") + e.what());
  }
}

}  // namespace gesturedet
