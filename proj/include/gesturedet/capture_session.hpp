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

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>

#include "gesturedet/dataset.hpp"
#include "gesturedet/protocol.hpp"
#include "gesturedet/trajectory.hpp"

namespace gesturedet {

/// Authoritative server time in integer milliseconds.
class ServerClock {
 public:
  virtual ~ServerClock() = default;
  virtual std::int64_t NowMs() = 0;
};

class SteadyServerClock final : public ServerClock {
 public:
  std::int64_t NowMs() override {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

/// Test clock advanced by hand.
class ManualServerClock final : public ServerClock {
 public:
  explicit ManualServerClock(std::int64_t start_ms = 0) : now_(start_ms) {}
  std::int64_t NowMs() override { return now_.load(); }
  void Set(std::int64_t ms) { now_.store(ms); }
  void Advance(std::int64_t ms) { now_.fetch_add(ms); }

 private:
  std::atomic<std::int64_t> now_;
};

/// Lower median of the per-probe offsets client_ms - midpoint(send, receive).
struct ClockProbeSample {
  std::int64_t server_send_ms = 0;
  std::int64_t server_receive_ms = 0;
  std::int64_t client_ms = 0;
};
std::int64_t EstimateClockOffset(std::span<const ClockProbeSample> samples);

enum class ClickerResult { kStarted, kIgnored, kSessionComplete };

struct IngestResult {
  bool accepted = false;
  std::optional<FrameId> frame_id;
  /// Sequence time of the frame in seconds.
  double t = 0.0;
  std::string reason;
  /// The frame pushed the running sequence past its duration.
  bool sequence_finished = false;
};

/// One capture session over a writable store. Not thread-safe; the server
/// drives it from a single strand.
class CaptureSession {
 public:
  CaptureSession(std::string session_id, SessionPlan plan, DatasetStore store, ServerClock& clock);

  const std::string& session_id() const { return session_id_; }
  const SessionPlan& plan() const { return plan_; }
  const DatasetStore& store() const { return store_; }
  Phase phase() const { return phase_; }
  int sequence_index() const { return sequence_; }
  const SequenceSpec& current() const { return plan_.sequences[static_cast<std::size_t>(sequence_)]; }
  /// Sequences not yet finished, the current one included.
  int pending() const;
  bool complete() const { return complete_; }
  std::int64_t frames_accepted() const { return frames_accepted_; }
  std::int64_t t0_ms() const { return t0_ms_; }

  /// client time = server time + offset.
  void SetClockOffset(std::int64_t offset_ms) { offset_ms_ = offset_ms; }
  std::int64_t clock_offset_ms() const { return offset_ms_; }

  ClickerResult Clicker();
  /// Throws kNotRunning outside Running and kDimensionMismatch when the frame
  /// size differs from the store. Frames outside [0, duration] are rejected;
  /// one past the end also finishes the sequence.
  IngestResult IngestFrame(const GrayImage& image, std::uint64_t client_ms);
  /// Finishes the running sequence once the server clock passes its
  /// duration. Returns true on that transition.
  bool Tick();
  /// Current target: the start box while Idle, target_at(now) while Running,
  /// the final box once complete.
  msg::Target Target();
  std::optional<msg::Target> RunningTarget();

 private:
  void FinishSequence();
  double SequenceTime(std::int64_t server_ms) const { return static_cast<double>(server_ms - t0_ms_) / 1000.0; }

  std::string session_id_;
  SessionPlan plan_;
  DatasetStore store_;
  ServerClock* clock_;
  int sequence_ = 0;
  Phase phase_ = Phase::kIdle;
  bool complete_ = false;
  std::int64_t t0_ms_ = 0;
  std::int64_t offset_ms_ = 0;
  std::int64_t frames_accepted_ = 0;
};

/// Holds at most one active session.
class CaptureService {
 public:
  explicit CaptureService(ServerClock& clock) : clock_(&clock) {}

  /// Opens (or creates at width x height) the store for writing. Throws
  /// kSessionActive when a session is already active, kStoreLocked when
  /// another writer holds the store.
  CaptureSession& StartSession(const SessionPlan& plan, const std::filesystem::path& store_dir, int width = 320,
                               int height = 240);
  CaptureSession* active() { return session_.get(); }
  /// Releases the store.
  void EndSession() { session_.reset(); }

 private:
  ServerClock* clock_;
  std::unique_ptr<CaptureSession> session_;
  std::uint64_t next_session_ = 1;
};

}  // namespace gesturedet
