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
#include <filesystem>
#include <memory>
#include <string>

#include "gesturedet/capture_session.hpp"
#include "gesturedet/trajectory.hpp"

namespace gesturedet {

struct CaptureServerOptions {
  std::string address = "127.0.0.1";
  /// 0 binds an ephemeral port; see CaptureServer::port().
  std::uint16_t port = 0;
  SessionPlan plan;
  std::filesystem::path store_dir;
  /// Used only when the store does not exist yet.
  int width = 320;
  int height = 240;
  int target_period_ms = 25;
  int clock_probes = 5;
  /// Return from Run once the session completes and its client disconnects.
  bool exit_when_complete = true;
  /// Defaults to a steady clock owned by the server.
  ServerClock* clock = nullptr;
};

/// WebSocket capture endpoint. One client at a time; a reconnecting client
/// resumes the active session. All session work runs on one thread, which
/// serializes dataset writes.
class CaptureServer {
 public:
  /// Binds and listens immediately.
  explicit CaptureServer(CaptureServerOptions options);
  ~CaptureServer();
  CaptureServer(const CaptureServer&) = delete;
  CaptureServer& operator=(const CaptureServer&) = delete;

  std::uint16_t port() const;
  /// Blocks until Stop() or, with exit_when_complete, the end of the session.
  void Run();
  /// Safe from any thread.
  void Stop();
  /// Frames written so far; valid after Run returns.
  std::int64_t frames_accepted() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace gesturedet
