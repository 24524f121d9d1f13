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

#include "gesturedet/capture_session.hpp"

#include <algorithm>
#include <vector>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "gesturedet/error.hpp"

namespace gesturedet {

namespace fs = std::filesystem;

std::int64_t EstimateClockOffset(std::span<const ClockProbeSample> samples) {
  if (samples.empty()) throw Error(ErrorCode::kProtocol, "no clock probes completed");
  std::vector<std::int64_t> offsets;
  offsets.reserve(samples.size());
  for (const auto& s : samples) {
    if (s.server_receive_ms < s.server_send_ms) throw Error(ErrorCode::kProtocol, "clock echo precedes its probe");
    // Floor of the midpoint, exact for negative sums too.
    const std::int64_t sum = s.server_send_ms + s.server_receive_ms;
    const std::int64_t mid = sum >= 0 ? sum / 2 : -((-sum + 1) / 2);
    offsets.push_back(s.client_ms - mid);
  }
  std::sort(offsets.begin(), offsets.end());
  return offsets[(offsets.size() - 1) / 2];
}

CaptureSession::CaptureSession(std::string session_id, SessionPlan plan, DatasetStore store, ServerClock& clock)
    : session_id_(std::move(session_id)), plan_(std::move(plan)), store_(std::move(store)), clock_(&clock) {
  if (plan_.sequences.empty()) throw Error(ErrorCode::kConfig, "session plan has no sequences");
  if (!store_.writable()) throw Error(ErrorCode::kStoreIo, "capture needs a store opened for writing");
  for (const auto& s : plan_.sequences) ValidateTrajectory(s.trajectory);
}

int CaptureSession::pending() const {
  if (complete_) return 0;
  return static_cast<int>(plan_.sequences.size()) - sequence_;
}

ClickerResult CaptureSession::Clicker() {
  if (complete_) return ClickerResult::kSessionComplete;
  if (phase_ == Phase::kRunning) {
    spdlog::warn("clicker ignored: sequence {} already running", sequence_);
    return ClickerResult::kIgnored;
  }
  t0_ms_ = clock_->NowMs();
  phase_ = Phase::kRunning;
  spdlog::info("sequence {} started: {} {}", sequence_, GestureName(current().gesture), HandName(current().hand));
  return ClickerResult::kStarted;
}

void CaptureSession::FinishSequence() {
  phase_ = Phase::kDone;
  spdlog::info("sequence {} done", sequence_);
  if (sequence_ + 1 < static_cast<int>(plan_.sequences.size())) {
    ++sequence_;
    phase_ = Phase::kIdle;
  } else {
    complete_ = true;
  }
}

IngestResult CaptureSession::IngestFrame(const GrayImage& image, std::uint64_t client_ms) {
  if (phase_ != Phase::kRunning) {
    throw Error(ErrorCode::kNotRunning, fmt::format("sequence {} is {}", sequence_, PhaseName(phase_)));
  }
  if (Width(image) != store_.width() || Height(image) != store_.height()) {
    throw Error(ErrorCode::kDimensionMismatch, fmt::format("frame is {}x{}, store expects {}x{}", Width(image),
                                                           Height(image), store_.width(), store_.height()));
  }
  const SequenceSpec& seq = current();
  const std::int64_t server_ms = static_cast<std::int64_t>(client_ms) - offset_ms_;
  IngestResult result;
  result.t = SequenceTime(server_ms);
  if (result.t < 0.0) {
    result.reason = "frame precedes the sequence start";
    return result;
  }
  if (result.t > seq.trajectory.duration_s) {
    result.reason = "frame is past the sequence end";
    result.sequence_finished = true;
    FinishSequence();
    return result;
  }
  FrameRecord record;
  record.meta.frame_id = store_.next_frame_id();
  record.meta.subject_id = plan_.subject_id;
  record.meta.scene_id = plan_.scene_id;
  record.meta.sequence_index = seq.sequence_index;
  record.meta.timestamp_s = result.t;
  record.meta.label = seq.label();
  record.meta.bbox = TargetAt(seq.trajectory, result.t);
  record.image = image;
  store_.Append(record);
  ++frames_accepted_;
  result.accepted = true;
  result.frame_id = record.meta.frame_id;
  return result;
}

bool CaptureSession::Tick() {
  if (phase_ != Phase::kRunning) return false;
  if (SequenceTime(clock_->NowMs()) <= current().trajectory.duration_s) return false;
  FinishSequence();
  return true;
}

msg::Target CaptureSession::Target() {
  if (auto running = RunningTarget()) return *running;
  const SequenceSpec& seq = current();
  msg::Target m;
  m.gesture = seq.gesture;
  m.hand = seq.hand;
  m.sequence_index = seq.sequence_index;
  m.phase = complete_ ? Phase::kDone : phase_;
  m.t = complete_ ? seq.trajectory.duration_s : 0.0;
  m.bbox = TargetAt(seq.trajectory, m.t);
  return m;
}

std::optional<msg::Target> CaptureSession::RunningTarget() {
  if (phase_ != Phase::kRunning) return std::nullopt;
  const SequenceSpec& seq = current();
  const double t = SequenceTime(clock_->NowMs());
  if (t < 0.0 || t > seq.trajectory.duration_s) return std::nullopt;
  msg::Target m;
  m.t = t;
  m.bbox = TargetAt(seq.trajectory, t);
  m.gesture = seq.gesture;
  m.hand = seq.hand;
  m.phase = Phase::kRunning;
  m.sequence_index = seq.sequence_index;
  return m;
}

CaptureSession& CaptureService::StartSession(const SessionPlan& plan, const fs::path& store_dir, int width,
                                             int height) {
  if (session_ && !session_->complete()) {
    throw Error(ErrorCode::kSessionActive, "session " + session_->session_id() + " is still active");
  }
  session_.reset();
  DatasetStore store = fs::exists(store_dir / "manifest.json") ? DatasetStore::OpenForWrite(store_dir)
                                                               : DatasetStore::Create(store_dir, width, height, "capture");
  session_ = std::make_unique<CaptureSession>(fmt::format("session-{}", next_session_++), plan, std::move(store),
                                              *clock_);
  spdlog::info("{} started: {} sequences into {}", session_->session_id(), plan.sequences.size(), store_dir.string());
  return *session_;
}

}  // namespace gesturedet
