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

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

#include "gesturedet/geometry.hpp"
#include "gesturedet/image.hpp"
#include "gesturedet/labels.hpp"

namespace gesturedet {

using FrameId = std::uint64_t;

struct FrameMeta {
  FrameId frame_id = 0;
  std::string subject_id;
  std::string scene_id;
  int sequence_index = 0;
  double timestamp_s = 0.0;
  ClassLabel label;
  BBox bbox;

  friend bool operator==(const FrameMeta&, const FrameMeta&) = default;
};

struct FrameRecord {
  FrameMeta meta;
  GrayImage image;
};

/// On-disk layout of a dataset directory:
///
///   manifest.json    {"version", "width", "height", "source", "classes"}
///   records.jsonl    one object per line: frame_id, subject_id, scene_id,
///                    sequence_index, timestamp_s, label, bbox [cx, cy, w, h]
///   frames/<id>.pgm  binary 8-bit PGM
///
/// A store opened for writing holds an exclusive advisory lock on
/// manifest.json. Readers take no lock.
class DatasetStore {
 public:
  static constexpr int kFormatVersion = 1;

  static DatasetStore Create(const std::filesystem::path& dir, int width, int height,
                             const std::string& source = "synthetic");
  static DatasetStore OpenForWrite(const std::filesystem::path& dir);
  static DatasetStore OpenReadOnly(const std::filesystem::path& dir);

  DatasetStore(DatasetStore&&) noexcept;
  DatasetStore& operator=(DatasetStore&&) noexcept;
  ~DatasetStore();

  void Append(const FrameRecord& record);

  const std::filesystem::path& dir() const { return dir_; }
  int width() const { return width_; }
  int height() const { return height_; }
  const std::string& source() const { return source_; }
  std::size_t size() const { return records_.size(); }
  bool writable() const { return writable_; }

  const std::vector<FrameMeta>& records() const { return records_; }
  const FrameMeta& meta(FrameId id) const;
  bool contains(FrameId id) const { return index_.count(id) != 0; }
  GrayImage LoadImage(FrameId id) const;
  FrameRecord Load(FrameId id) const;
  /// Smallest id greater than every stored id.
  FrameId next_frame_id() const { return next_id_; }

 private:
  DatasetStore() = default;
  void LoadRecords();
  void AcquireLock();

  std::filesystem::path dir_;
  int width_ = 0;
  int height_ = 0;
  std::string source_;
  bool writable_ = false;
  int lock_fd_ = -1;
  std::unique_ptr<std::ofstream> journal_;
  std::vector<FrameMeta> records_;
  std::unordered_map<FrameId, std::size_t> index_;
  FrameId next_id_ = 0;
};

std::string EncodeRecordLine(const FrameMeta& meta);
FrameMeta DecodeRecordLine(std::string_view line);

struct SplitResult {
  std::vector<FrameId> train_ids;
  std::vector<FrameId> eval_ids;
  std::vector<std::string> train_subjects;
  std::vector<std::string> eval_subjects;
};

/// Subject-disjoint split. Subjects are visited in a seeded shuffle and each
/// joins the eval side when that moves the eval frame share closer to
/// eval_fraction. Both sides always receive at least one subject.
SplitResult SplitBySubject(const DatasetStore& store, double eval_fraction, std::uint64_t seed);
SplitResult SplitBySubject(std::span<const FrameMeta> records, double eval_fraction, std::uint64_t seed);

inline constexpr int kHeatmapCols = 32;
inline constexpr int kHeatmapRows = 24;
inline constexpr int kWidthBins = 16;

struct DatasetStats {
  std::int64_t total_frames = 0;
  int image_width = 0;
  int image_height = 0;
  std::array<std::int64_t, kNumClasses> class_counts{};
  std::array<double, kNumClasses> class_fractions{};
  /// Box-center counts; cell (row, col) = (floor(cy * 24), floor(cx * 32)).
  Eigen::Matrix<std::int64_t, kHeatmapRows, kHeatmapCols, Eigen::RowMajor> center_heatmap;
  /// Box widths in pixels, bins of width image_width / 16.
  std::array<std::int64_t, kWidthBins> width_histogram{};
  std::array<std::int64_t, 256> intensity_all{};
  std::array<std::int64_t, 256> intensity_in_box{};

  double mean_intensity() const;
};

/// Exact counts over the selected frames (all frames when ids is empty).
DatasetStats ComputeStats(const DatasetStore& store, std::span<const FrameId> ids = {});

std::string StatsToJson(const DatasetStats& stats);
std::string SplitToJson(const SplitResult& split);
SplitResult SplitFromJson(std::string_view text);

}  // namespace gesturedet
