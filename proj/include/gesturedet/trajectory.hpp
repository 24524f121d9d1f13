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
#include <span>
#include <string>
#include <vector>

#include "gesturedet/geometry.hpp"
#include "gesturedet/labels.hpp"

namespace gesturedet {

inline constexpr double kDefaultSequenceDuration = 30.0;

/// Zigzag sweep of a fixed-size target box. Rows run top to bottom,
/// alternating left-to-right and right-to-left, joined by vertical segments.
struct TrajectoryConfig {
  double box_w = 0.25;
  double box_h = 0.25;
  int n_rows = 4;
  double duration_s = kDefaultSequenceDuration;
  double margin = 0.0;

  /// n_rows = ceil(1 / box_h), the fewest rows whose footprints tile the frame.
  static TrajectoryConfig ForBox(double box_w, double box_h, double duration_s = kDefaultSequenceDuration);

  double path_length() const;
  double speed() const { return path_length() / duration_s; }

  friend bool operator==(const TrajectoryConfig&, const TrajectoryConfig&) = default;
};

void ValidateTrajectory(const TrajectoryConfig& traj);

/// Target box at time t in [0, duration_s], moving at constant arc-length speed.
BBox TargetAt(const TrajectoryConfig& traj, double t);

/// Fraction of a grid x grid raster covered by the union of n_samples box
/// footprints taken at evenly spaced times. A pixel is covered when its center
/// lies in [left, right) x [top, bottom).
double Coverage(const TrajectoryConfig& traj, int n_samples, int grid = 256);

struct BoxSize {
  double w = 0.25;
  double h = 0.25;
  friend bool operator==(const BoxSize&, const BoxSize&) = default;
};

/// Three hand-box sizes: 80, 100 and 120 pixel squares on a 320x240 frame.
std::vector<BoxSize> DefaultBoxSizes();

struct SequenceSpec {
  GestureClass gesture = GestureClass::kThumbsPress;
  Hand hand = Hand::kLeft;
  TrajectoryConfig trajectory;
  int sequence_index = 0;

  ClassLabel label() const { return ClassLabel(gesture, hand); }
  friend bool operator==(const SequenceSpec&, const SequenceSpec&) = default;
};

struct SessionPlan {
  std::string subject_id;
  std::string scene_id;
  std::vector<SequenceSpec> sequences;
  friend bool operator==(const SessionPlan&, const SessionPlan&) = default;
};

/// One sequence per (gesture, hand, size), gesture-major.
SessionPlan PlanSession(const std::string& subject_id, const std::string& scene_id,
                        std::span<const GestureClass> gestures, std::span<const Hand> hands,
                        std::span<const BoxSize> sizes, double duration_s = kDefaultSequenceDuration);

/// Every gesture on both hands with the default sizes.
SessionPlan PlanDefaultSession(const std::string& subject_id, const std::string& scene_id,
                               double duration_s = kDefaultSequenceDuration);

}  // namespace gesturedet
