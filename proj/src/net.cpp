// Copyright 2026 The VDI Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "vdi/net.hpp"

#include <future>

#include "vdi/error.hpp"

namespace vdi {

namespace asio = boost::asio;
using asio::ip::tcp;
using boost::system::error_code;

nlohmann::json SessionConfig::to_hello() const {
  return {{"type", "hello"}, {"viewport", {width, height}}, {"n_sg", n_sg}};
}

void SessionConfig::apply_hello(const nlohmann::json& j) {
  if (j.contains("viewport")) {
    const auto v = j.at("viewport").get<std::vector<int>>();
    if (v.size() != 2 || v[0] <= 0 || v[1] <= 0 || v[0] > 8192 || v[1] > 8192) {
      throw Error(ErrorCode::kInvalidArgument, "hello viewport must be [w, h] within 1..8192");
    }
    width = v[0];
    height = v[1];
  }
  if (j.contains("n_sg")) {
    const int n = j.at("n_sg").get<int>();
    if (n < 1 || n > 65535) throw Error(ErrorCode::kInvalidArgument, "hello n_sg out of range");
    n_sg = n;
  }
}

FramedConnection::FramedConnection(tcp::socket socket, FrameHandler on_frame,
                                   CloseHandler on_close)
    : socket_(std::move(socket)), on_frame_(std::move(on_frame)), on_close_(std::move(on_close)) {
  error_code ec;
  socket_.set_option(tcp::no_delay(true), ec);
}

void FramedConnection::start() {
  asio::post(socket_.get_executor(), [self = shared_from_this()] { self->read_more(); });
}

void FramedConnection::read_more() {
  socket_.async_read_some(asio::buffer(buf_), [self = shared_from_this()](const error_code& ec,
                                                                          std::size_t n) {
    if (ec) {
      self->fail(ec);
      return;
    }
    try {
      self->parser_.feed(std::span(self->buf_.data(), n));
      while (auto f = self->parser_.next()) {
        if (self->on_frame_) self->on_frame_(std::move(*f));
      }
    } catch (const std::exception&) {
      self->fail(asio::error::invalid_argument);
      return;
    }
    self->read_more();
  });
}

void FramedConnection::send(std::vector<std::uint8_t> frame,
                            std::function<void(const error_code&)> done) {
  auto bytes = std::make_shared<std::vector<std::uint8_t>>(std::move(frame));
  asio::post(socket_.get_executor(),
             [self = shared_from_this(), bytes, done = std::move(done)]() mutable {
               if (!self->open_) {
                 if (done) done(asio::error::operation_aborted);
                 return;
               }
               self->queue_.push_back({bytes, std::move(done)});
               if (self->queue_.size() == 1) self->write_next();
             });
}

void FramedConnection::write_next() {
  asio::async_write(socket_, asio::buffer(*queue_.front().bytes),
                    [self = shared_from_this()](const error_code& ec, std::size_t) {
                      if (self->queue_.empty()) return;
                      auto done = std::move(self->queue_.front().done);
                      self->queue_.pop_front();
                      if (done) done(ec);
                      if (ec) {
                        self->fail(ec);
                      } else if (!self->queue_.empty()) {
                        self->write_next();
                      }
                    });
}

bool FramedConnection::send_and_wait(std::vector<std::uint8_t> frame,
                                     std::chrono::milliseconds timeout) {
  auto p = std::make_shared<std::promise<error_code>>();
  auto f = p->get_future();
  send(std::move(frame), [p](const error_code& ec) { p->set_value(ec); });
  if (f.wait_for(timeout) != std::future_status::ready) return false;
  return !f.get();
}

void FramedConnection::fail(const error_code& ec) {
  if (!open_.exchange(false)) return;
  error_code ignored;
  socket_.shutdown(tcp::socket::shutdown_both, ignored);
  socket_.close(ignored);
  while (!queue_.empty()) {
    auto done = std::move(queue_.front().done);
    queue_.pop_front();
    if (done) done(ec ? ec : asio::error::operation_aborted);
  }
  if (on_close_) on_close_(ec);
}

void FramedConnection::close() {
  asio::post(socket_.get_executor(),
             [self = shared_from_this()] { self->fail(asio::error::operation_aborted); });
}

StreamServer::StreamServer(Generator generator, SessionConfig defaults, std::string host,
                           std::uint16_t port, ServerPipeline::CompressFn compress)
    : acceptor_(io_), generator_(std::move(generator)), config_(defaults) {
  error_code ec;
  const auto addr = asio::ip::make_address(host, ec);
  if (ec) throw Error(ErrorCode::kInvalidArgument, "bad listen address '" + host + "'");
  const tcp::endpoint ep(addr, port);
  acceptor_.open(ep.protocol(), ec);
  if (!ec) acceptor_.set_option(tcp::acceptor::reuse_address(true), ec);
  if (!ec) acceptor_.bind(ep, ec);
  if (!ec) acceptor_.listen(asio::socket_base::max_listen_connections, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot listen on " + host + ":" + std::to_string(port) +
                                          ": " + ec.message());
  port_ = acceptor_.local_endpoint().port();

  pipeline_ = std::make_unique<ServerPipeline>(
      [this](const PoseMsg& pose) {
        SessionConfig cfg;
        {
          std::lock_guard lock(m_);
          cfg = config_;
        }
        return generator_(pose, cfg);
      },
      std::move(compress),
      [this](const VdiPacket& packet, const GeneratedItem& item) { send_packet(packet, item); });
}

StreamServer::~StreamServer() { stop(); }

void StreamServer::set_sent_hook(SentHook hook) {
  std::lock_guard lock(m_);
  sent_hook_ = std::move(hook);
}

void StreamServer::start() {
  if (started_) return;
  started_ = true;
  accept_next();
  io_thread_ = std::thread([this] { io_.run(); });
  pipeline_->start();
}

void StreamServer::stop() {
  if (!started_) return;
  started_ = false;
  pipeline_->stop();
  asio::post(io_, [this] {
    error_code ignored;
    acceptor_.close(ignored);
    std::lock_guard lock(m_);
    if (conn_) conn_->close();
  });
  // Give the close handlers a moment, then stop the loop.
  std::this_thread::sleep_for(std::chrono::milliseconds(10));
  io_.stop();
  if (io_thread_.joinable()) io_thread_.join();
}

void StreamServer::accept_next() {
  acceptor_.async_accept([this](const error_code& ec, tcp::socket socket) {
    if (ec) {
      if (ec == asio::error::operation_aborted || !acceptor_.is_open()) return;
      accept_next();
      return;
    }
    ++connections_;
    auto conn = std::make_shared<FramedConnection>(
        std::move(socket), [this](Frame&& f) { on_frame(std::move(f)); }, nullptr);
    std::shared_ptr<FramedConnection> old;
    {
      std::lock_guard lock(m_);
      old = std::exchange(conn_, conn);
    }
    // Newest client wins; a closed connection stays parked until replaced.
    if (old) old->close();
    conn->start();
    accept_next();
  });
}

void StreamServer::on_frame(Frame&& f) {
  switch (f.type) {
    case FrameType::kPose:
      pipeline_->mailbox().put(decode_pose(f.payload));
      break;
    case FrameType::kControl: {
      const auto j = decode_control(f.payload);
      const std::string type = j.value("type", "");
      if (type == "hello") {
        std::lock_guard lock(m_);
        config_.apply_hello(j);
      } else if (type == "data_changed") {
        pipeline_->notify_data_changed();
      }
      break;
    }
    case FrameType::kVdi:
      break;  // clients do not upload VDIs
  }
}

void StreamServer::send_packet(const VdiPacket& packet, const GeneratedItem& item) {
  std::shared_ptr<FramedConnection> conn;
  SentHook hook;
  {
    std::lock_guard lock(m_);
    conn = conn_;
    hook = sent_hook_;
  }
  if (conn && conn->open()) {
    auto frame = encode_frame(FrameType::kVdi, encode_vdi_packet(packet));
    const std::size_t size = frame.size();
    if (conn->send_and_wait(std::move(frame), std::chrono::seconds(60))) {
      ++written_;
      bytes_ += size;
      raw_bytes_ += packet.uncompressed_len;
    }
  }
  if (hook) hook(packet, item);
}

StreamClient::StreamClient(std::string host, std::uint16_t port, SessionConfig hello)
    : host_(std::move(host)), port_(port), hello_(hello) {}

StreamClient::~StreamClient() { close(); }

void StreamClient::connect(std::chrono::milliseconds timeout) {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  tcp::resolver resolver(io_);
  error_code ec;
  tcp::socket socket(io_);
  while (true) {
    const auto eps = resolver.resolve(host_, std::to_string(port_), ec);
    if (!ec) asio::connect(socket, eps, ec);
    if (!ec) break;
    if (std::chrono::steady_clock::now() >= deadline) {
      throw Error(ErrorCode::kIo, "cannot connect to " + host_ + ":" + std::to_string(port_) +
                                      ": " + ec.message());
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
  }
  last_seq_ = 0;  // packet numbering restarts with each server session
  conn_ = std::make_shared<FramedConnection>(
      std::move(socket), [this](Frame&& f) { handle_frame(std::move(f)); }, nullptr);
  conn_->start();
  work_.emplace(asio::make_work_guard(io_));
  io_thread_ = std::thread([this] { io_.run(); });
  send_control(hello_.to_hello());
}

bool StreamClient::connected() const { return conn_ && conn_->open(); }

void StreamClient::close() {
  if (conn_) conn_->close();
  work_.reset();
  if (io_thread_.joinable()) {
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
    io_.stop();
    io_thread_.join();
  }
  conn_.reset();
}

void StreamClient::send_pose(const PoseMsg& pose) {
  if (!conn_) throw Error(ErrorCode::kIo, "client not connected");
  conn_->send(encode_frame(FrameType::kPose, encode_pose(pose)));
}

void StreamClient::send_control(const nlohmann::json& j) {
  if (!conn_) throw Error(ErrorCode::kIo, "client not connected");
  conn_->send(encode_frame(FrameType::kControl, encode_control(j)));
}

void StreamClient::set_swap_hook(SwapHook hook) {
  std::lock_guard lock(hook_m_);
  swap_hook_ = std::move(hook);
}

void StreamClient::handle_frame(Frame&& f) {
  if (f.type != FrameType::kVdi) return;
  std::shared_ptr<ReceivedVdi> rv;
  try {
    const VdiPacket packet = decode_vdi_packet(f.payload);
    if (packet.seq <= last_seq_) {  // stale; never replace a newer VDI
      ++dropped_;
      return;
    }
    const auto bytes = unpack_vdi_packet(packet);
    DecodedVdi decoded = decode_vdi(bytes);
    rv = std::make_shared<ReceivedVdi>(ReceivedVdi{std::move(decoded.vdi), std::move(decoded.grid),
                                                   packet.seq, packet.gen_pose_seq, sha256(bytes),
                                                   std::chrono::steady_clock::now()});
  } catch (const Error&) {
    ++dropped_;
    return;
  }
  last_seq_ = rv->seq;
  buffer_.publish(rv);
  ++received_;
  SwapHook hook;
  {
    std::lock_guard lock(hook_m_);
    hook = swap_hook_;
  }
  if (hook) hook(*rv);
}

std::pair<std::string, std::uint16_t> parse_endpoint(const std::string& s) {
  const auto colon = s.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == s.size()) {
    throw Error(ErrorCode::kInvalidArgument, "endpoint must be host:port, got '" + s + "'");
  }
  int port = 0;
  try {
    port = std::stoi(s.substr(colon + 1));
  } catch (const std::exception&) {
    port = -1;
  }
  if (port < 0 || port > 65535) throw Error(ErrorCode::kInvalidArgument, "bad port in '" + s + "'");
  return {s.substr(0, colon), static_cast<std::uint16_t>(port)};
}

}  // namespace vdi
