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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "gesturedet/geometry.hpp"
#include "gesturedet/image.hpp"
#include "gesturedet/labels.hpp"
#include "gesturedet/trajectory.hpp"

namespace gesturedet {

inline constexpr int kProtocolVersion = 1;
inline constexpr std::uint32_t kFrameMagic = 0x47465231;
/// u32 magic, width, height, reserved, then u64 client timestamp in ms.
inline constexpr std::size_t kFrameHeaderBytes = 24;

enum class Phase { kIdle, kRunning, kDone };

std::string_view PhaseName(Phase p);
Phase ParsePhase(std::string_view name);

namespace msg {

// client -> server
struct Hello {
  int version = kProtocolVersion;
};
struct ClockEcho {
  std::int64_t server_ms = 0;
  std::int64_t client_ms = 0;
};
struct Clicker {};

// server -> client
struct ClockProbe {
  std::int64_t server_ms = 0;
};
struct SessionStart {
  std::string session_id;
  std::string subject_id;
  std::string scene_id;
  int sequences = 0;
  int pending = 0;
  int width = 0;
  int height = 0;
  std::int64_t clock_offset_ms = 0;
};
struct Target {
  double t = 0.0;
  BBox bbox;
  GestureClass gesture = GestureClass::kThumbsPress;
  Hand hand = Hand::kLeft;
  Phase phase = Phase::kIdle;
  int sequence_index = 0;
};
/// Sent when a clicker starts a sequence. Server time t0_ms plus the clock
/// offset gives the client time of t = 0.
struct SequenceStart {
  int sequence_index = 0;
  GestureClass gesture = GestureClass::kThumbsPress;
  Hand hand = Hand::kLeft;
  TrajectoryConfig trajectory;
  std::int64_t t0_ms = 0;
  std::int64_t clock_offset_ms = 0;
};
struct FrameAck {
  std::uint64_t client_ms = 0;
  bool accepted = false;
  std::optional<std::uint64_t> frame_id;
  double t = 0.0;
  std::string reason;
};
struct SessionDone {
  std::int64_t frames_accepted = 0;
};
struct ErrorMessage {
  std::string message;
};

}  // namespace msg

using Message = std::variant<msg::Hello, msg::ClockProbe, msg::ClockEcho, msg::SessionStart, msg::Target,
                             msg::SequenceStart, msg::Clicker, msg::FrameAck, msg::SessionDone, msg::ErrorMessage>;

/// One JSON object with a "type" field.
std::string EncodeMessage(const Message& m);
/// Throws kProtocol on malformed text or an unknown type.
Message DecodeMessage(std::string_view text);
std::string_view MessageType(const Message& m);

struct FramePacket {
  std::uint64_t client_ms = 0;
  GrayImage image;
};

std::string EncodeFrame(const GrayImage& image, std::uint64_t client_ms);
/// Throws kProtocol on a short, oversized or mislabeled payload.
FramePacket DecodeFrame(std::span<const std::uint8_t> bytes);

std::string SessionPlanToJson(const SessionPlan& plan);
SessionPlan SessionPlanFromJson(std::string_view text);

}  // namespace gesturedet
