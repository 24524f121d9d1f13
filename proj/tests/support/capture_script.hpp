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

// A headless capture run: clicker, frames at known sequence times, then one
// frame past the end to finish each sequence.

#include <cmath>
#include <cstdint>
#include <vector>

#include "gesturedet/image.hpp"
#include "gesturedet/protocol.hpp"
#include "support/ws_client.hpp"

namespace gesturedet::testing {

struct SentFrame {
  int sequence = 0;
  std::int64_t t_ms = 0;
  std::uint64_t client_ms = 0;
  msg::FrameAck ack;
};

struct ScriptResult {
  msg::SessionStart start;
  std::vector<msg::SequenceStart> sequences;
  std::vector<SentFrame> frames;
  std::vector<msg::Target> targets;
  std::int64_t frames_accepted_reported = -1;
};

inline GrayImage ScriptFrame(int width, int height, int sequence, int index) {
  GrayImage img(height, width);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) img(y, x) = static_cast<std::uint8_t>((sequence * 31 + index * 7 + x + 3 * y) % 256);
  return img;
}

/// Sequence times round(i * duration / (n - 1)) ms for i in [0, n), so the
/// first frame lands on t = 0 and the last on t = duration.
inline ScriptResult RunCaptureScript(std::uint16_t port, const SessionPlan& plan, int frames_per_sequence,
                                     std::int64_t client_skew_ms = 250000) {
  ScriptedClient client(port);
  ScriptResult out;
  out.start = client.Handshake([&](std::int64_t server_ms) { return server_ms + client_skew_ms; });
  for (std::size_t k = 0; k < plan.sequences.size(); ++k) {
    client.Send(msg::Clicker{});
    const msg::SequenceStart seq = client.ReadUntil<msg::SequenceStart>();
    out.sequences.push_back(seq);
    const auto duration_ms = static_cast<std::int64_t>(std::llround(seq.trajectory.duration_s * 1000.0));
    const std::int64_t base = seq.t0_ms + seq.clock_offset_ms;
    for (int i = 0; i < frames_per_sequence; ++i) {
      SentFrame f;
      f.sequence = seq.sequence_index;
      f.t_ms = frames_per_sequence == 1 ? 0 : std::llround(static_cast<double>(i) * duration_ms / (frames_per_sequence - 1));
      f.client_ms = static_cast<std::uint64_t>(base + f.t_ms);
      client.SendFrame(ScriptFrame(out.start.width, out.start.height, seq.sequence_index, i), f.client_ms);
      f.ack = client.ReadUntil<msg::FrameAck>();
      out.frames.push_back(f);
    }
    client.SendFrame(ScriptFrame(out.start.width, out.start.height, seq.sequence_index, -1),
                     static_cast<std::uint64_t>(base + duration_ms + 1));
    const msg::FrameAck past = client.ReadUntil<msg::FrameAck>();
    if (past.accepted) throw Error(ErrorCode::kInternal, "frame past the sequence end was accepted");
  }
  out.frames_accepted_reported = client.ReadUntil<msg::SessionDone>().frames_accepted;
  out.targets = client.targets();
  return out;
}

}  // namespace gesturedet::testing
