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

#include "gesturedet/protocol.hpp"

#include <fmt/format.h>

#include "gesturedet/error.hpp"
#include "json.hpp"

namespace gesturedet {
namespace {

using json = nlohmann::ordered_json;

constexpr std::uint32_t kMaxFrameSide = 8192;

void PutLe(std::string& out, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint64_t GetLe(std::span<const std::uint8_t> in, std::size_t at, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(in[at + static_cast<std::size_t>(i)]) << (8 * i);
  return v;
}

json BoxJson(const BBox& b) { return json::array({b.cx, b.cy, b.w, b.h}); }

BBox BoxFrom(const json& j) {
  if (!j.is_array() || j.size() != 4) throw Error(ErrorCode::kProtocol, "bbox must be [cx, cy, w, h]");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

json TrajectoryJson(const TrajectoryConfig& t) {
  return {{"box_w", t.box_w}, {"box_h", t.box_h}, {"n_rows", t.n_rows}, {"duration_s", t.duration_s},
          {"margin", t.margin}};
}

TrajectoryConfig TrajectoryFrom(const json& j) {
  TrajectoryConfig t;
  t.box_w = j.at("box_w").get<double>();
  t.box_h = j.at("box_h").get<double>();
  t.n_rows = j.at("n_rows").get<int>();
  t.duration_s = j.at("duration_s").get<double>();
  t.margin = j.value("margin", 0.0);
  return t;
}

struct Encoder {
  json operator()(const msg::Hello& m) const { return {{"type", "hello"}, {"version", m.version}}; }
  json operator()(const msg::ClockProbe& m) const { return {{"type", "clock_probe"}, {"server_ms", m.server_ms}}; }
  json operator()(const msg::ClockEcho& m) const {
    return {{"type", "clock_echo"}, {"server_ms", m.server_ms}, {"client_ms", m.client_ms}};
  }
  json operator()(const msg::SessionStart& m) const {
    return {{"type", "session_start"}, {"session_id", m.session_id},     {"subject_id", m.subject_id},
            {"scene_id", m.scene_id},  {"sequences", m.sequences},       {"pending", m.pending},
            {"width", m.width},        {"height", m.height},             {"clock_offset_ms", m.clock_offset_ms}};
  }
  json operator()(const msg::Target& m) const {
    return {{"type", "target"},
            {"t", m.t},
            {"bbox", BoxJson(m.bbox)},
            {"gesture", GestureName(m.gesture)},
            {"hand", HandName(m.hand)},
            {"phase", PhaseName(m.phase)},
            {"sequence_index", m.sequence_index}};
  }
  json operator()(const msg::SequenceStart& m) const {
    return {{"type", "sequence_start"},
            {"sequence_index", m.sequence_index},
            {"gesture", GestureName(m.gesture)},
            {"hand", HandName(m.hand)},
            {"trajectory", TrajectoryJson(m.trajectory)},
            {"t0_ms", m.t0_ms},
            {"clock_offset_ms", m.clock_offset_ms}};
  }
  json operator()(const msg::Clicker&) const { return {{"type", "clicker"}}; }
  json operator()(const msg::FrameAck& m) const {
    return {{"type", "frame_ack"},
            {"client_ms", m.client_ms},
            {"accepted", m.accepted},
            {"frame_id", m.frame_id ? json(*m.frame_id) : json(nullptr)},
            {"t", m.t},
            {"reason", m.reason}};
  }
  json operator()(const msg::SessionDone& m) const {
    return {{"type", "session_done"}, {"frames_accepted", m.frames_accepted}};
  }
  json operator()(const msg::ErrorMessage& m) const { return {{"type", "error"}, {"message", m.message}}; }
};

Message DecodeObject(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "hello") return msg::Hello{j.at("version").get<int>()};
  if (type == "clock_probe") return msg::ClockProbe{j.at("server_ms").get<std::int64_t>()};
  if (type == "clock_echo") {
    return msg::ClockEcho{j.at("server_ms").get<std::int64_t>(), j.at("client_ms").get<std::int64_t>()};
  }
  if (type == "session_start") {
    msg::SessionStart m;
    m.session_id = j.at("session_id").get<std::string>();
    m.subject_id = j.at("subject_id").get<std::string>();
    m.scene_id = j.at("scene_id").get<std::string>();
    m.sequences = j.at("sequences").get<int>();
    m.pending = j.at("pending").get<int>();
    m.width = j.at("width").get<int>();
    m.height = j.at("height").get<int>();
    m.clock_offset_ms = j.at("clock_offset_ms").get<std::int64_t>();
    return m;
  }
  if (type == "target") {
    msg::Target m;
    m.t = j.at("t").get<double>();
    m.bbox = BoxFrom(j.at("bbox"));
    m.gesture = ParseGesture(j.at("gesture").get<std::string>());
    m.hand = ParseHand(j.at("hand").get<std::string>());
    m.phase = ParsePhase(j.at("phase").get<std::string>());
    m.sequence_index = j.at("sequence_index").get<int>();
    return m;
  }
  if (type == "sequence_start") {
    msg::SequenceStart m;
    m.sequence_index = j.at("sequence_index").get<int>();
    m.gesture = ParseGesture(j.at("gesture").get<std::string>());
    m.hand = ParseHand(j.at("hand").get<std::string>());
    m.trajectory = TrajectoryFrom(j.at("trajectory"));
    m.t0_ms = j.at("t0_ms").get<std::int64_t>();
    m.clock_offset_ms = j.at("clock_offset_ms").get<std::int64_t>();
    return m;
  }
  if (type == "clicker") return msg::Clicker{};
  if (type == "frame_ack") {
    msg::FrameAck m;
    m.client_ms = j.at("client_ms").get<std::uint64_t>();
    m.accepted = j.at("accepted").get<bool>();
    if (!j.at("frame_id").is_null()) m.frame_id = j.at("frame_id").get<std::uint64_t>();
    m.t = j.at("t").get<double>();
    m.reason = j.at("reason").get<std::string>();
    return m;
  }
  if (type == "session_done") return msg::SessionDone{j.at("frames_accepted").get<std::int64_t>()};
  if (type == "error") return msg::ErrorMessage{j.at("message").get<std::string>()};
  throw Error(ErrorCode::kProtocol, "unknown message type '" + type + "'");
}

}  // namespace

std::string_view PhaseName(Phase p) {
  switch (p) {
    case Phase::kIdle: return "idle";
    case Phase::kRunning: return "running";
    case Phase::kDone: return "done";
  }
  return "?";
}

Phase ParsePhase(std::string_view name) {
  for (Phase p : {Phase::kIdle, Phase::kRunning, Phase::kDone}) {
    if (PhaseName(p) == name) return p;
  }
  throw Error(ErrorCode::kProtocol, "unknown phase '" + std::string(name) + "'");
}

std::string EncodeMessage(const Message& m) { return std::visit(Encoder{}, m).dump(); }

std::string_view MessageType(const Message& m) {
  static constexpr std::string_view kNames[] = {"hello",  "clock_probe",    "clock_echo", "session_start",
                                                "target", "sequence_start", "clicker",    "frame_ack",
                                                "session_done", "error"};
  return kNames[m.index()];
}

Message DecodeMessage(std::string_view text) {
  try {
    const json j = json::parse(text);
    if (!j.is_object()) throw Error(ErrorCode::kProtocol, "message is not an object");
    return DecodeObject(j);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kProtocol, std::string("malformed message: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kProtocol) throw;
    throw Error(ErrorCode::kProtocol, e.what());
  }
}

std::string EncodeFrame(const GrayImage& image, std::uint64_t client_ms) {
  std::string out;
  const auto bytes = ImageBytes(image);
  out.reserve(kFrameHeaderBytes + bytes.size());
  PutLe(out, kFrameMagic, 4);
  PutLe(out, static_cast<std::uint32_t>(Width(image)), 4);
  PutLe(out, static_cast<std::uint32_t>(Height(image)), 4);
  PutLe(out, 0, 4);
  PutLe(out, client_ms, 8);
  out.append(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  return out;
}

FramePacket DecodeFrame(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kFrameHeaderBytes) {
    throw Error(ErrorCode::kProtocol, fmt::format("frame payload of {} bytes is shorter than its header", bytes.size()));
  }
  const auto magic = static_cast<std::uint32_t>(GetLe(bytes, 0, 4));
  if (magic != kFrameMagic) throw Error(ErrorCode::kProtocol, fmt::format("bad frame magic 0x{:08x}", magic));
  const auto width = static_cast<std::uint32_t>(GetLe(bytes, 4, 4));
  const auto height = static_cast<std::uint32_t>(GetLe(bytes, 8, 4));
  if (width == 0 || height == 0 || width > kMaxFrameSide || height > kMaxFrameSide) {
    throw Error(ErrorCode::kProtocol, fmt::format("frame size {}x{} out of range", width, height));
  }
  const std::size_t pixels = static_cast<std::size_t>(width) * height;
  if (bytes.size() != kFrameHeaderBytes + pixels) {
    throw Error(ErrorCode::kProtocol,
                fmt::format("frame payload is {} bytes, expected {}", bytes.size(), kFrameHeaderBytes + pixels));
  }
  FramePacket packet;
  packet.client_ms = GetLe(bytes, 16, 8);
  packet.image = ImageFromBytes(bytes.subspan(kFrameHeaderBytes), static_cast<int>(width), static_cast<int>(height));
  return packet;
}

std::string SessionPlanToJson(const SessionPlan& plan) {
  json j;
  j["subject_id"] = plan.subject_id;
  j["scene_id"] = plan.scene_id;
  json seqs = json::array();
  for (const auto& s : plan.sequences) {
    seqs.push_back({{"sequence_index", s.sequence_index},
                    {"gesture", GestureName(s.gesture)},
                    {"hand", HandName(s.hand)},
                    {"trajectory", TrajectoryJson(s.trajectory)}});
  }
  j["sequences"] = seqs;
  return j.dump(2);
}

SessionPlan SessionPlanFromJson(std::string_view text) {
  SessionPlan plan;
  try {
    const json j = json::parse(text);
    plan.subject_id = j.at("subject_id").get<std::string>();
    plan.scene_id = j.at("scene_id").get<std::string>();
    for (const auto& s : j.at("sequences")) {
      SequenceSpec spec;
      spec.sequence_index = s.at("sequence_index").get<int>();
      spec.gesture = ParseGesture(s.at("gesture").get<std::string>());
      spec.hand = ParseHand(s.at("hand").get<std::string>());
      spec.trajectory = TrajectoryFrom(s.at("trajectory"));
      ValidateTrajectory(spec.trajectory);
      plan.sequences.push_back(spec);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfig, std::string("malformed session plan: ") + e.what());
  }
  if (plan.sequences.empty()) throw Error(ErrorCode::kConfig, "session plan has no sequences");
  for (std::size_t i = 0; i < plan.sequences.size(); ++i) {
    if (plan.sequences[i].sequence_index != static_cast<int>(i)) {
      throw Error(ErrorCode::kConfig, fmt::format("sequence {} carries index {}", i, plan.sequences[i].sequence_index));
    }
  }
  return plan;
}

}  // namespace gesturedet
