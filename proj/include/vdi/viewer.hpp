// Copyright 2026 The VDI Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <boost/asio.hpp>
#include <nlohmann/json.hpp>

#include "vdi/image.hpp"
#include "vdi/preview.hpp"
#include "vdi/types.hpp"

namespace vdi {

/// Pose sent by the browser: orbit camera position and orientation (x, y, z, w).
struct ViewerPose {
  std::uint64_t seq = 0;
  Vec3 position = Vec3::Zero();
  Quat orientation = Quat::Identity();
};

/// HUD telemetry pushed to the browser as JSON text.
struct ViewerHud {
  double fps = 0.0;
  RenderMode mode = RenderMode::kFull;
  double vdi_age_ms = 0.0;
  double deviation_deg = 0.0;
  bool new_vdi = false;
};

/// {seq, position:[x,y,z], orientation:[x,y,z,w]}; throws kParse.
ViewerPose parse_viewer_pose(const std::string& text);
nlohmann::json viewer_pose_to_json(const ViewerPose& pose);
nlohmann::json hud_to_json(const ViewerHud& hud);

/// Binary frame: u32 width, u32 height, u8 mode (0 full, 1 preview), PNG bytes.
std::vector<std::uint8_t> encode_viewer_frame(const Image& img, RenderMode mode);
struct ViewerFrame {
  int width = 0;
  int height = 0;
  RenderMode mode = RenderMode::kFull;
  Image image;
};
ViewerFrame decode_viewer_frame(const std::vector<std::uint8_t>& bytes);

/// The static page served at "/".
const std::string& viewer_page_html();

/// HTTP + websocket endpoint inside the rendering client. One io thread; the
/// newest browser connection wins. Pose messages with a seq not above the last
/// accepted one are dropped; a queued, unsent frame is replaced by a newer one.
class ViewerBridge {
 public:
  using PoseHandler = std::function<void(const ViewerPose&)>;

  explicit ViewerBridge(std::string host = "127.0.0.1", std::uint16_t port = 0);
  ~ViewerBridge();
  ViewerBridge(const ViewerBridge&) = delete;
  ViewerBridge& operator=(const ViewerBridge&) = delete;

  void start();
  void stop();
  std::uint16_t port() const { return port_; }

  /// Text message sent to each browser right after it connects (orbit center, radius).
  void set_hello(nlohmann::json hello);
  /// Runs on the io thread for every accepted pose.
  void set_pose_handler(PoseHandler handler);

  void send_frame(const Image& img, RenderMode mode);
  void send_hud(const ViewerHud& hud);

  bool has_viewer() const;
  std::uint64_t poses_received() const { return poses_.load(); }
  std::uint64_t poses_dropped() const { return poses_dropped_.load(); }
  std::uint64_t frames_sent() const { return frames_sent_.load(); }
  std::uint64_t frames_dropped() const { return frames_dropped_.load(); }

  class Session;

 private:
  friend class Session;
  void accept_next();
  void on_pose_text(const std::string& text);
  void attach(std::shared_ptr<Session> s);

  boost::asio::io_context io_;
  boost::asio::ip::tcp::acceptor acceptor_;
  std::thread io_thread_;
  std::uint16_t port_ = 0;
  bool started_ = false;

  mutable std::mutex m_;
  std::shared_ptr<Session> session_;
  PoseHandler pose_handler_;
  nlohmann::json hello_;
  std::uint64_t last_seq_ = 0;
  bool have_seq_ = false;

  std::atomic<std::uint64_t> poses_{0};
  std::atomic<std::uint64_t> poses_dropped_{0};
  std::atomic<std::uint64_t> frames_sent_{0};
  std::atomic<std::uint64_t> frames_dropped_{0};
};

}  // namespace vdi
