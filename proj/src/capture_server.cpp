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

#include "gesturedet/capture_server.hpp"

#include <deque>
#include <vector>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>
#include <spdlog/spdlog.h>

#include "gesturedet/error.hpp"

namespace gesturedet {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

struct CaptureServer::Impl {
  explicit Impl(CaptureServerOptions opts)
      : options(std::move(opts)),
        clock(options.clock ? options.clock : &owned_clock),
        service(*clock),
        acceptor(ioc) {
    if (options.plan.sequences.empty()) throw Error(ErrorCode::kConfig, "session plan has no sequences");
    if (options.target_period_ms < 1 || options.target_period_ms > 33) {
      throw Error(ErrorCode::kConfig, "target period must lie in [1, 33] ms to stream at 30 Hz or faster");
    }
    if (options.clock_probes < 1) throw Error(ErrorCode::kConfig, "at least one clock probe is required");
    boost::system::error_code ec;
    const auto address = asio::ip::make_address(options.address, ec);
    if (ec) throw Error(ErrorCode::kConfig, "bad listen address '" + options.address + "'");
    const tcp::endpoint endpoint(address, options.port);
    acceptor.open(endpoint.protocol(), ec);
    if (!ec) acceptor.set_option(asio::socket_base::reuse_address(true), ec);
    if (!ec) acceptor.bind(endpoint, ec);
    if (!ec) acceptor.listen(asio::socket_base::max_listen_connections, ec);
    if (ec) throw Error(ErrorCode::kConfig, "cannot listen on " + options.address + ":" +
                                                std::to_string(options.port) + ": " + ec.message());
    // Opening the store up front surfaces a locked store before any client connects.
    service.StartSession(options.plan, options.store_dir, options.width, options.height);
  }

  class Connection;

  void Accept();
  void ConnectionClosed();
  void Shutdown() {
    boost::system::error_code ec;
    acceptor.close(ec);
    ioc.stop();
  }

  CaptureServerOptions options;
  SteadyServerClock owned_clock;
  ServerClock* clock;
  CaptureService service;
  asio::io_context ioc;
  tcp::acceptor acceptor;
  bool connected = false;
  std::int64_t frames_accepted = 0;
};

class CaptureServer::Impl::Connection : public std::enable_shared_from_this<Connection> {
 public:
  Connection(Impl& server, tcp::socket socket)
      : server_(server), ws_(std::move(socket)), timer_(ws_.get_executor()) {}

  void Start() {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.read_message_max(64u << 20);
    ws_.async_accept([self = shared_from_this()](beast::error_code ec) {
      if (ec) return self->Close("handshake failed: " + ec.message());
      spdlog::info("client connected");
      self->Read();
    });
  }

 private:
  CaptureSession& session() { return *server_.service.active(); }

  void Read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return self->Close(ec == websocket::error::closed ? "client closed" : ec.message());
      const bool text = self->ws_.got_text();
      const auto data = self->buffer_.cdata();
      const std::span<const std::uint8_t> bytes(static_cast<const std::uint8_t*>(data.data()), data.size());
      try {
        if (text) {
          self->OnText(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
        } else {
          self->OnFrame(bytes);
        }
      } catch (const Error& e) {
        spdlog::warn("{}", e.what());
        self->Send(msg::ErrorMessage{e.what()});
      }
      self->buffer_.consume(self->buffer_.size());
      if (!self->closing_) self->Read();
    });
  }

  void OnText(std::string_view text) {
    const Message m = DecodeMessage(text);
    if (const auto* hello = std::get_if<msg::Hello>(&m)) {
      if (hello->version != kProtocolVersion) {
        Send(msg::ErrorMessage{"protocol version " + std::to_string(hello->version) + " is not supported, server speaks " +
                               std::to_string(kProtocolVersion)});
        closing_ = true;
        return;
      }
      probes_.clear();
      ready_ = false;
      Probe();
    } else if (const auto* echo = std::get_if<msg::ClockEcho>(&m)) {
      if (!probe_sent_ || echo->server_ms != *probe_sent_) throw Error(ErrorCode::kProtocol, "unexpected clock_echo");
      probes_.push_back({*probe_sent_, server_.clock->NowMs(), echo->client_ms});
      probe_sent_.reset();
      if (static_cast<int>(probes_.size()) < server_.options.clock_probes) return Probe();
      HandshakeDone();
    } else if (std::holds_alternative<msg::Clicker>(m)) {
      RequireReady();
      OnClicker();
    } else {
      throw Error(ErrorCode::kProtocol, "unexpected message '" + std::string(MessageType(m)) + "' from client");
    }
  }

  void Probe() {
    probe_sent_ = server_.clock->NowMs();
    Send(msg::ClockProbe{*probe_sent_});
  }

  void HandshakeDone() {
    CaptureSession& s = session();
    s.SetClockOffset(EstimateClockOffset(probes_));
    ready_ = true;
    msg::SessionStart start;
    start.session_id = s.session_id();
    start.subject_id = s.plan().subject_id;
    start.scene_id = s.plan().scene_id;
    start.sequences = static_cast<int>(s.plan().sequences.size());
    start.pending = s.pending();
    start.width = s.store().width();
    start.height = s.store().height();
    start.clock_offset_ms = s.clock_offset_ms();
    Send(start);
    if (s.complete()) {
      Send(msg::SessionDone{s.frames_accepted()});
      return;
    }
    Send(s.Target());
    if (s.phase() == Phase::kRunning) Stream();
  }

  void RequireReady() const {
    if (!ready_) throw Error(ErrorCode::kProtocol, "hello and clock handshake must come first");
  }

  void OnClicker() {
    CaptureSession& s = session();
    switch (s.Clicker()) {
      case ClickerResult::kIgnored:
        return;
      case ClickerResult::kSessionComplete:
        Send(msg::SessionDone{s.frames_accepted()});
        return;
      case ClickerResult::kStarted:
        break;
    }
    const SequenceSpec& seq = s.current();
    Send(msg::SequenceStart{seq.sequence_index, seq.gesture, seq.hand, seq.trajectory, s.t0_ms(), s.clock_offset_ms()});
    last_t_.reset();
    EmitRunningTarget();
    Stream();
  }

  void OnFrame(std::span<const std::uint8_t> bytes) {
    RequireReady();
    const FramePacket packet = DecodeFrame(bytes);
    CaptureSession& s = session();
    msg::FrameAck ack;
    ack.client_ms = packet.client_ms;
    bool finished = false;
    try {
      const IngestResult r = s.IngestFrame(packet.image, packet.client_ms);
      ack.accepted = r.accepted;
      ack.frame_id = r.frame_id;
      ack.t = r.t;
      ack.reason = r.reason;
      finished = r.sequence_finished;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNotRunning && e.code() != ErrorCode::kDimensionMismatch) throw;
      ack.reason = e.what();
    }
    if (ack.accepted) ++server_.frames_accepted;
    Send(ack);
    if (finished) AnnounceTransition();
  }

  void AnnounceTransition() {
    CaptureSession& s = session();
    Send(s.Target());
    if (s.complete()) Send(msg::SessionDone{s.frames_accepted()});
  }

  void EmitRunningTarget() {
    const auto target = session().RunningTarget();
    if (!target) return;
    if (last_t_ && !(target->t > *last_t_)) return;
    last_t_ = target->t;
    Send(*target);
  }

  void Stream() {
    if (streaming_) return;
    streaming_ = true;
    timer_.expires_after(std::chrono::milliseconds(server_.options.target_period_ms));
    timer_.async_wait([self = shared_from_this()](beast::error_code ec) {
      self->streaming_ = false;
      if (ec || self->closing_) return;
      CaptureSession& s = self->session();
      if (s.phase() != Phase::kRunning) return;
      if (s.Tick()) {
        self->AnnounceTransition();
        return;
      }
      self->EmitRunningTarget();
      self->Stream();
    });
  }

  void Send(const Message& m) {
    outbox_.push_back(EncodeMessage(m));
    if (outbox_.size() == 1) Flush();
  }

  void Flush() {
    ws_.text(true);
    ws_.async_write(asio::buffer(outbox_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return self->Close("write failed: " + ec.message());
      self->outbox_.pop_front();
      if (!self->outbox_.empty()) return self->Flush();
      if (self->closing_ && !self->close_sent_) {
        self->close_sent_ = true;
        self->ws_.async_close(websocket::close_code::policy_error,
                              [self](beast::error_code) { self->Close("closed by server"); });
      }
    });
  }

  void Close(const std::string& why) {
    if (closed_) return;
    closed_ = true;
    closing_ = true;
    timer_.cancel();
    spdlog::info("client disconnected: {}", why);
    server_.ConnectionClosed();
  }

  Impl& server_;
  websocket::stream<beast::tcp_stream> ws_;
  asio::steady_timer timer_;
  beast::flat_buffer buffer_;
  std::deque<std::string> outbox_;
  std::vector<ClockProbeSample> probes_;
  std::optional<std::int64_t> probe_sent_;
  std::optional<double> last_t_;
  bool ready_ = false;
  bool streaming_ = false;
  bool closing_ = false;
  bool close_sent_ = false;
  bool closed_ = false;
};

void CaptureServer::Impl::Accept() {
  acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
    if (ec) {
      if (ec != asio::error::operation_aborted) spdlog::warn("accept failed: {}", ec.message());
      return;
    }
    if (connected) {
      spdlog::warn("rejecting a second client while one is connected");
      boost::system::error_code ignored;
      socket.close(ignored);
      return Accept();
    }
    connected = true;
    boost::system::error_code ignored;
    socket.set_option(tcp::no_delay(true), ignored);
    std::make_shared<Connection>(*this, std::move(socket))->Start();
    Accept();
  });
}

void CaptureServer::Impl::ConnectionClosed() {
  connected = false;
  CaptureSession* s = service.active();
  if (options.exit_when_complete && s && s->complete()) {
    spdlog::info("session complete: {} frames", s->frames_accepted());
    Shutdown();
  }
}

CaptureServer::CaptureServer(CaptureServerOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {}

CaptureServer::~CaptureServer() = default;

std::uint16_t CaptureServer::port() const { return impl_->acceptor.local_endpoint().port(); }

void CaptureServer::Run() {
  impl_->Accept();
  impl_->ioc.run();
  impl_->service.EndSession();
}

void CaptureServer::Stop() {
  asio::post(impl_->ioc, [impl = impl_.get()] { impl->Shutdown(); });
}

std::int64_t CaptureServer::frames_accepted() const { return impl_->frames_accepted; }

}  // namespace gesturedet
