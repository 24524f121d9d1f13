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

#include "gesturedet/trajectory.hpp"

#include <algorithm>
#include <cmath>

#include "gesturedet/error.hpp"

namespace gesturedet {

namespace {

struct PathExtents {
  double x_left, x_right, y_top, y_bottom;
  double row_length, row_step;
};

PathExtents Extents(const TrajectoryConfig& traj) {
  PathExtents e{};
  e.x_left = 0.5 * traj.box_w + traj.margin;
  e.x_right = std::max(e.x_left, 1.0 - 0.5 * traj.box_w - traj.margin);
  e.y_top = 0.5 * traj.box_h + traj.margin;
  e.y_bottom = std::max(e.y_top, 1.0 - 0.5 * traj.box_h - traj.margin);
  e.row_length = e.x_right - e.x_left;
  e.row_step = traj.n_rows > 1 ? (e.y_bottom - e.y_top) / (traj.n_rows - 1) : 0.0;
  return e;
}

}  // namespace

TrajectoryConfig TrajectoryConfig::ForBox(double box_w, double box_h, double duration_s) {
  TrajectoryConfig traj;
  traj.box_w = box_w;
  traj.box_h = box_h;
  // The small slack keeps 1/3 from rounding up to 4 rows.
  traj.n_rows = std::max(1, static_cast<int>(std::ceil(1.0 / box_h - 1e-9)));
  traj.duration_s = duration_s;
  return traj;
}

double TrajectoryConfig::path_length() const {
  const PathExtents e = Extents(*this);
  return n_rows * e.row_length + (n_rows - 1) * e.row_step;
}

void ValidateTrajectory(const TrajectoryConfig& traj) {
  if (traj.n_rows < 1) throw Error(ErrorCode::kConfig, "trajectory needs at least one row");
  if (!(traj.duration_s > 0.0)) throw Error(ErrorCode::kConfig, "trajectory duration must be positive");
  if (!(traj.box_w > 0.0 && traj.box_w <= 1.0 && traj.box_h > 0.0 && traj.box_h <= 1.0)) {
    throw Error(ErrorCode::kConfig, "target box must fit in the frame");
  }
  if (traj.margin < 0.0) throw Error(ErrorCode::kConfig, "margin must be non-negative");
}

BBox TargetAt(const TrajectoryConfig& traj, double t) {
  ValidateTrajectory(traj);
  if (!(t >= 0.0 && t <= traj.duration_s)) {
    throw Error(ErrorCode::kDomain, "trajectory time " + std::to_string(t) + " outside [0, " +
                                        std::to_string(traj.duration_s) + "]");
  }
  const PathExtents e = Extents(traj);
  const double total = traj.n_rows * e.row_length + (traj.n_rows - 1) * e.row_step;
  double s = total * (t / traj.duration_s);

  double cx = e.x_left;
  double cy = e.y_top;
  for (int row = 0; row < traj.n_rows; ++row) {
    const bool rightward = row % 2 == 0;
    const double y = e.y_top + row * e.row_step;
    if (s <= e.row_length || row == traj.n_rows - 1) {
      const double along = std::min(s, e.row_length);
      cx = rightward ? e.x_left + along : e.x_right - along;
      cy = y;
      break;
    }
    s -= e.row_length;
    if (s <= e.row_step) {
      cx = rightward ? e.x_right : e.x_left;
      cy = y + s;
      break;
    }
    s -= e.row_step;
  }
  return ClampIntoFrame({cx, cy, traj.box_w, traj.box_h});
}

double Coverage(const TrajectoryConfig& traj, int n_samples, int grid) {
  ValidateTrajectory(traj);
  if (n_samples < 2) throw Error(ErrorCode::kDomain, "coverage needs at least two samples");
  if (grid < 256) throw Error(ErrorCode::kDomain, "coverage raster must be at least 256x256");

  std::vector<std::uint8_t> covered(static_cast<std::size_t>(grid) * grid, 0);
  for (int k = 0; k < n_samples; ++k) {
    const double t = traj.duration_s * k / (n_samples - 1);
    const BBox b = TargetAt(traj, t);
    // Pixel i is covered when left <= (i + 0.5) / grid < right.
    const int x0 = std::max(0, static_cast<int>(std::ceil(b.left() * grid - 0.5)));
    const int x1 = std::min(grid, static_cast<int>(std::ceil(b.right() * grid - 0.5)));
    const int y0 = std::max(0, static_cast<int>(std::ceil(b.top() * grid - 0.5)));
    const int y1 = std::min(grid, static_cast<int>(std::ceil(b.bottom() * grid - 0.5)));
    for (int y = y0; y < y1; ++y) {
      std::fill(covered.begin() + static_cast<std::ptrdiff_t>(y) * grid + x0,
                covered.begin() + static_cast<std::ptrdiff_t>(y) * grid + x1, std::uint8_t{1});
    }
  }
  const auto count = std::count(covered.begin(), covered.end(), std::uint8_t{1});
  return static_cast<double>(count) / static_cast<double>(covered.size());
}

std::vector<BoxSize> DefaultBoxSizes() {
  return {{80.0 / 320.0, 80.0 / 240.0}, {100.0 / 320.0, 100.0 / 240.0}, {120.0 / 320.0, 120.0 / 240.0}};
}

SessionPlan PlanSession(const std::string& subject_id, const std::string& scene_id,
                        std::span<const GestureClass> gestures, std::span<const Hand> hands,
                        std::span<const BoxSize> sizes, double duration_s) {
  if (gestures.empty() || hands.empty() || sizes.empty()) {
    throw Error(ErrorCode::kConfig, "session needs at least one gesture, hand and box size");
  }
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    for (std::size_t j = i + 1; j < sizes.size(); ++j) {
      if (sizes[i] == sizes[j]) throw Error(ErrorCode::kConfig, "box sizes must be pairwise distinct");
    }
  }
  SessionPlan plan{subject_id, scene_id, {}};
  int index = 0;
  for (GestureClass g : gestures) {
    for (Hand h : hands) {
      for (const BoxSize& size : sizes) {
        TrajectoryConfig traj = TrajectoryConfig::ForBox(size.w, size.h, duration_s);
        ValidateTrajectory(traj);
        plan.sequences.push_back({g, h, traj, index++});
      }
    }
  }
  return plan;
}

SessionPlan PlanDefaultSession(const std::string& subject_id, const std::string& scene_id, double duration_s) {
  const auto sizes = DefaultBoxSizes();
  return PlanSession(subject_id, scene_id, kAllGestures, kAllHands, sizes, duration_s);
}

}  // namespace gesturedet
