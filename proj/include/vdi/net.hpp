// Copyright 2026 The VDI Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include <boost/asio.hpp>

#include "vdi/stream.hpp"

namespace vdi {

/// Viewport and budget negotiated by the client's hello control frame.
struct SessionConfig {
  int width = 256;
  int height = 256;
  int n_sg = 12;

  nlohmann::json to_hello() const;
  /// Updates fields present in a hello message.
  void apply_hello(const nlohmann::json& j);
};

/// Length-prefixed frames over one TCP socket. All socket work runs on the
/// owning io_context thread; send() may be called from any thread.
class FramedConnection : public std::enable_shared_from_this<FramedConnection> {
 public:
  using FrameHandler = std::function<void(Frame&&)>;
  using CloseHandler = std::function<void(const boost::system::error_code&)>;

  FramedConnection(boost::asio::ip::tcp::socket socket, FrameHandler on_frame,
                   CloseHandler on_close);

  /// Starts the read loop; call once.
  void start();
  /// Queues a complete encoded frame; `done` runs on the io thread after the write.
  void send(std::vector<std::uint8_t> frame,
            std::function<void(const boost::system::error_code&)> done = {});
  /// Queues a frame and waits for it to be written. Returns false on error or timeout.
  bool send_and_wait(std::vector<std::uint8_t> frame, std::chrono::milliseconds timeout);
  void close();
  bool open() const { return open_.load(); }

 private:
  struct Pending {
    std::shared_ptr<std::vector<std::uint8_t>> bytes;
    std::function<void(const boost::system::error_code&)> done;
  };
  void read_more();
  void write_next();
  void fail(const boost::system::error_code& ec);

  boost::asio::ip::tcp::socket socket_;
  FrameHandler on_frame_;
  CloseHandler on_close_;
  FrameParser parser_;
  std::array<std::uint8_t, 64 * 1024> buf_{};
  std::deque<Pending> queue_;
  std::atomic<bool> open_{true};
};

/// Server endpoint: accepts one client at a time, feeds its poses to a
/// ServerPipeline and streams LZ4-compressed VDIs back.
class StreamServer {
 public:
  using Generator = std::function<std::vector<std::uint8_t>(const PoseMsg&, const SessionConfig&)>;
  using SentHook = std::function<void(const VdiPacket&, const GeneratedItem&)>;

  StreamServer(Generator generator, SessionConfig defaults, std::string host = "127.0.0.1",
               std::uint16_t port = 0,
               ServerPipeline::CompressFn compress = &ServerPipeline::lz4_stage);
  ~StreamServer();

  void start();
  void stop();
  std::uint16_t port() const { return port_; }
  ServerPipeline& pipeline() { return *pipeline_; }
  /// Called after each packet is written (or dropped without a client).
  void set_sent_hook(SentHook hook);

  std::uint64_t connections() const { return connections_.load(); }
  std::uint64_t packets_written() const { return written_.load(); }
  std::uint64_t bytes_written() const { return bytes_.load(); }
  std::uint64_t uncompressed_bytes() const { return raw_bytes_.load(); }

 private:
  void accept_next();
  void on_frame(Frame&& f);
  void send_packet(const VdiPacket& packet, const GeneratedItem& item);

  boost::asio::io_context io_;
  boost::asio::ip::tcp::acceptor acceptor_;
  std::thread io_thread_;
  std::unique_ptr<ServerPipeline> pipeline_;
  Generator generator_;
  std::mutex m_;
  SessionConfig config_;
  std::shared_ptr<FramedConnection> conn_;
  SentHook sent_hook_;
  std::uint16_t port_ = 0;
  std::atomic<std::uint64_t> connections_{0};
  std::atomic<std::uint64_t> written_{0};
  std::atomic<std::uint64_t> bytes_{0};
  std::atomic<std::uint64_t> raw_bytes_{0};
  bool started_ = false;
};

/// A VDI decoded on the client's network thread.
struct ReceivedVdi {
  Vdi vdi;
  AccelGrid grid;
  std::uint64_t seq = 0;
  std::uint64_t gen_pose_seq = 0;
  std::array<std::uint8_t, 32> sha256{};
  std::chrono::steady_clock::time_point received_at;
};

/// Client endpoint: sends hello and poses, receives VDIs into a double buffer.
class StreamClient {
 public:
  using SwapHook = std::function<void(const ReceivedVdi&)>;

  StreamClient(std::string host, std::uint16_t port, SessionConfig hello);
  ~StreamClient();

  /// Connects (blocking, with retries until the timeout) and sends the hello.
  void connect(std::chrono::milliseconds timeout = std::chrono::seconds(5));
  void close();
  bool connected() const;

  void send_pose(const PoseMsg& pose);
  void send_control(const nlohmann::json& j);

  /// Runs after each successful swap, on the network thread.
  void set_swap_hook(SwapHook hook);

  /// Decodes one frame as the network thread would; exposed for tests.
  /// Undecodable packets and packets not newer than the current one are dropped.
  void handle_frame(Frame&& f);

  const DoubleBuffer<ReceivedVdi>& buffer() const { return buffer_; }
  std::uint64_t packets_received() const { return received_.load(); }
  std::uint64_t packets_dropped() const { return dropped_.load(); }

 private:
  std::string host_;
  std::uint16_t port_;
  SessionConfig hello_;
  boost::asio::io_context io_;
  std::optional<boost::asio::executor_work_guard<boost::asio::io_context::executor_type>> work_;
  std::thread io_thread_;
  std::shared_ptr<FramedConnection> conn_;
  DoubleBuffer<ReceivedVdi> buffer_;
  std::mutex hook_m_;
  SwapHook swap_hook_;
  std::atomic<std::uint64_t> received_{0};
  std::atomic<std::uint64_t> dropped_{0};
  std::uint64_t last_seq_ = 0;  ///< network thread only; reset per connection
};

/// "host:port" -> pair; throws kInvalidArgument.
std::pair<std::string, std::uint16_t> parse_endpoint(const std::string& s);

}  // namespace vdi
