// Copyright 2026 The VDI Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "vdi/viewer.hpp"

#include <deque>

#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "vdi/bytes.hpp"
#include "vdi/error.hpp"

namespace vdi {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using asio::ip::tcp;
using boost::system::error_code;

ViewerPose parse_viewer_pose(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    ViewerPose p;
    if (!j.at("seq").is_number_unsigned()) throw Error(ErrorCode::kParse, "pose seq must be unsigned");
    p.seq = j.at("seq").get<std::uint64_t>();
    const auto pos = j.at("position").get<std::vector<double>>();
    const auto q = j.at("orientation").get<std::vector<double>>();
    if (pos.size() != 3 || q.size() != 4) {
      throw Error(ErrorCode::kParse, "pose needs 3 position and 4 orientation components");
    }
    p.position = Vec3(pos[0], pos[1], pos[2]);
    Quat quat(q[3], q[0], q[1], q[2]);
    const double n = quat.norm();
    if (!std::isfinite(n) || n < 1e-9 || !p.position.allFinite()) {
      throw Error(ErrorCode::kParse, "pose is not finite or orientation is degenerate");
    }
    p.orientation = quat.normalized();
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("viewer pose: ") + e.what());
  }
}

nlohmann::json viewer_pose_to_json(const ViewerPose& pose) {
  const Quat& q = pose.orientation;
  return {{"seq", pose.seq},
          {"position", {pose.position.x(), pose.position.y(), pose.position.z()}},
          {"orientation", {q.x(), q.y(), q.z(), q.w()}}};
}

nlohmann::json hud_to_json(const ViewerHud& hud) {
  return {{"fps", hud.fps},
          {"mode", to_string(hud.mode)},
          {"vdi_age_ms", hud.vdi_age_ms},
          {"deviation_deg", hud.deviation_deg},
          {"new_vdi", hud.new_vdi}};
}

std::vector<std::uint8_t> encode_viewer_frame(const Image& img, RenderMode mode) {
  std::vector<std::uint8_t> out;
  ByteWriter w(out);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(img.width));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(img.height));
  w.put<std::uint8_t>(mode == RenderMode::kPreview ? 1 : 0);
  w.bytes(encode_png(img));
  return out;
}

ViewerFrame decode_viewer_frame(const std::vector<std::uint8_t>& bytes) {
  ByteReader r(bytes, ErrorCode::kTruncatedFrame);
  ViewerFrame f;
  f.width = static_cast<int>(r.get<std::uint32_t>());
  f.height = static_cast<int>(r.get<std::uint32_t>());
  const auto mode = r.get<std::uint8_t>();
  if (mode > 1) throw Error(ErrorCode::kParse, "viewer frame mode must be 0 or 1");
  f.mode = mode ? RenderMode::kPreview : RenderMode::kFull;
  f.image = decode_png(r.take(r.remaining()));
  if (f.image.width != f.width || f.image.height != f.height) {
    throw Error(ErrorCode::kDimensionMismatch, "viewer frame header disagrees with PNG size");
  }
  return f;
}

// ---- websocket session --------------------------------------------------------

class ViewerBridge::Session : public std::enable_shared_from_this<ViewerBridge::Session> {
 public:
  Session(tcp::socket socket, ViewerBridge* bridge) : ws_(std::move(socket)), bridge_(bridge) {}

  void accept(http::request<http::string_body> req) {
    ws_.async_accept(req, [self = shared_from_this()](const error_code& ec) {
      if (ec) {
        self->open_ = false;
        return;
      }
      self->bridge_->attach(self);
      self->read();
    });
  }

  // io thread only.
  void enqueue(bool binary, bool is_frame, std::shared_ptr<const std::vector<std::uint8_t>> data) {
    if (!open_) {
      if (is_frame) ++bridge_->frames_dropped_;
      return;
    }
    if (is_frame) {
      // The head of the queue may be mid-write; anything behind it is replaceable.
      for (std::size_t i = writing_ ? 1 : 0; i < queue_.size(); ++i) {
        if (queue_[i].is_frame) {
          queue_[i].data = std::move(data);
          ++bridge_->frames_dropped_;
          return;
        }
      }
    }
    queue_.push_back({binary, is_frame, std::move(data)});
    if (!writing_) write_next();
  }

  void close() {
    if (!open_.exchange(false)) return;
    ws_.async_close(websocket::close_code::normal, [self = shared_from_this()](const error_code&) {});
  }

  bool open() const { return open_.load(); }

 private:
  struct Out {
    bool binary;
    bool is_frame;
    std::shared_ptr<const std::vector<std::uint8_t>> data;
  };

  void read() {
    ws_.async_read(buf_, [self = shared_from_this()](const error_code& ec, std::size_t) {
      if (ec) {
        self->open_ = false;
        return;
      }
      if (self->ws_.got_text()) self->bridge_->on_pose_text(beast::buffers_to_string(self->buf_.data()));
      self->buf_.consume(self->buf_.size());
      self->read();
    });
  }

  void write_next() {
    writing_ = true;
    const Out& o = queue_.front();
    ws_.binary(o.binary);
    ws_.async_write(asio::buffer(*o.data), [self = shared_from_this()](const error_code& ec,
                                                                       std::size_t) {
      if (self->queue_.front().is_frame && !ec) ++self->bridge_->frames_sent_;
      self->queue_.pop_front();
      if (ec) {
        self->open_ = false;
        self->writing_ = false;
        return;
      }
      if (self->queue_.empty()) {
        self->writing_ = false;
      } else {
        self->write_next();
      }
    });
  }

  websocket::stream<tcp::socket> ws_;
  ViewerBridge* bridge_;
  beast::flat_buffer buf_;
  std::deque<Out> queue_;
  bool writing_ = false;
  std::atomic<bool> open_{true};
};

// ---- plain HTTP -----------------------------------------------------------------

namespace {

class HttpSession : public std::enable_shared_from_this<HttpSession> {
 public:
  HttpSession(tcp::socket socket, std::function<void(tcp::socket, http::request<http::string_body>)>
                                      upgrade)
      : socket_(std::move(socket)), upgrade_(std::move(upgrade)) {}

  void run() {
    http::async_read(socket_, buf_, req_, [self = shared_from_this()](const error_code& ec,
                                                                      std::size_t) {
      if (!ec) self->on_request();
    });
  }

 private:
  void on_request() {
    const std::string target(req_.target());
    if (websocket::is_upgrade(req_) && target == "/viewer") {
      upgrade_(std::move(socket_), std::move(req_));
      return;
    }
    auto res = std::make_shared<http::response<http::string_body>>();
    res->version(req_.version());
    res->keep_alive(false);
    res->set(http::field::server, "vdi-viewer");
    if (req_.method() == http::verb::get && (target == "/" || target == "/index.html")) {
      res->result(http::status::ok);
      res->set(http::field::content_type, "text/html; charset=utf-8");
      res->body() = viewer_page_html();
    } else {
      res->result(http::status::not_found);
      res->set(http::field::content_type, "text/plain");
      res->body() = "not found\n";
    }
    res->prepare_payload();
    http::async_write(socket_, *res, [self = shared_from_this(), res](const error_code&,
                                                                      std::size_t) {
      error_code ignored;
      self->socket_.shutdown(tcp::socket::shutdown_send, ignored);
    });
  }

  tcp::socket socket_;
  beast::flat_buffer buf_;
  http::request<http::string_body> req_;
  std::function<void(tcp::socket, http::request<http::string_body>)> upgrade_;
};

}  // namespace

// ---- bridge ------------------------------------------------------------------------

ViewerBridge::ViewerBridge(std::string host, std::uint16_t port) : acceptor_(io_) {
  error_code ec;
  const auto addr = asio::ip::make_address(host, ec);
  if (ec) throw Error(ErrorCode::kInvalidArgument, "bad viewer address '" + host + "'");
  const tcp::endpoint ep(addr, port);
  acceptor_.open(ep.protocol(), ec);
  if (!ec) acceptor_.set_option(tcp::acceptor::reuse_address(true), ec);
  if (!ec) acceptor_.bind(ep, ec);
  if (!ec) acceptor_.listen(asio::socket_base::max_listen_connections, ec);
  if (ec) {
    throw Error(ErrorCode::kIo, "cannot listen on " + host + ":" + std::to_string(port) + ": " +
                                    ec.message());
  }
  port_ = acceptor_.local_endpoint().port();
}

ViewerBridge::~ViewerBridge() { stop(); }

void ViewerBridge::start() {
  if (started_) return;
  started_ = true;
  accept_next();
  io_thread_ = std::thread([this] { io_.run(); });
}

void ViewerBridge::stop() {
  if (!started_) return;
  started_ = false;
  asio::post(io_, [this] {
    error_code ignored;
    acceptor_.close(ignored);
    std::shared_ptr<Session> s;
    {
      std::lock_guard lock(m_);
      s = session_;
    }
    if (s) s->close();
  });
  std::this_thread::sleep_for(std::chrono::milliseconds(20));
  io_.stop();
  if (io_thread_.joinable()) io_thread_.join();
  std::lock_guard lock(m_);
  session_.reset();
}

void ViewerBridge::set_hello(nlohmann::json hello) {
  std::lock_guard lock(m_);
  hello_ = std::move(hello);
}

void ViewerBridge::set_pose_handler(PoseHandler handler) {
  std::lock_guard lock(m_);
  pose_handler_ = std::move(handler);
}

bool ViewerBridge::has_viewer() const {
  std::lock_guard lock(m_);
  return session_ && session_->open();
}

void ViewerBridge::accept_next() {
  acceptor_.async_accept([this](const error_code& ec, tcp::socket socket) {
    if (ec) {
      if (acceptor_.is_open() && ec != asio::error::operation_aborted) accept_next();
      return;
    }
    std::make_shared<HttpSession>(std::move(socket), [this](tcp::socket s,
                                                            http::request<http::string_body> req) {
      std::make_shared<Session>(std::move(s), this)->accept(std::move(req));
    })->run();
    accept_next();
  });
}

void ViewerBridge::attach(std::shared_ptr<Session> s) {
  std::shared_ptr<Session> old;
  std::string hello;
  {
    std::lock_guard lock(m_);
    old = std::exchange(session_, s);
    if (!hello_.is_null()) hello = hello_.dump();
  }
  if (old) old->close();
  if (!hello.empty()) {
    s->enqueue(false, false,
               std::make_shared<const std::vector<std::uint8_t>>(hello.begin(), hello.end()));
  }
}

void ViewerBridge::on_pose_text(const std::string& text) {
  ViewerPose pose;
  try {
    pose = parse_viewer_pose(text);
  } catch (const Error&) {
    ++poses_dropped_;
    return;
  }
  PoseHandler handler;
  {
    std::lock_guard lock(m_);
    if (have_seq_ && pose.seq <= last_seq_) {
      ++poses_dropped_;
      return;
    }
    have_seq_ = true;
    last_seq_ = pose.seq;
    handler = pose_handler_;
  }
  ++poses_;
  if (handler) handler(pose);
}

void ViewerBridge::send_frame(const Image& img, RenderMode mode) {
  auto bytes = std::make_shared<const std::vector<std::uint8_t>>(encode_viewer_frame(img, mode));
  asio::post(io_, [this, bytes] {
    std::shared_ptr<Session> s;
    {
      std::lock_guard lock(m_);
      s = session_;
    }
    if (s) {
      s->enqueue(true, true, bytes);
    } else {
      ++frames_dropped_;
    }
  });
}

void ViewerBridge::send_hud(const ViewerHud& hud) {
  const std::string text = hud_to_json(hud).dump();
  auto bytes = std::make_shared<const std::vector<std::uint8_t>>(text.begin(), text.end());
  asio::post(io_, [this, bytes] {
    std::shared_ptr<Session> s;
    {
      std::lock_guard lock(m_);
      s = session_;
    }
    if (s) s->enqueue(false, false, bytes);
  });
}

}  // namespace vdi
