// Copyright 2026 The VDI Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <chrono>
#include <memory>
#include <optional>

#include "vdi/generate.hpp"
#include "vdi/net.hpp"
#include "vdi/preview.hpp"
#include "vdi/raycast.hpp"

namespace vdi {

/// Server-side generator: one VDI per pose at the negotiated viewport and budget,
/// returned as VDI file bytes.
StreamServer::Generator make_vdi_generator(std::shared_ptr<const Volume> volume,
                                           std::shared_ptr<const TransferFunction> tf,
                                           GenParams params);

/// What the client rendered for one frame.
struct FrameReport {
  std::uint64_t frame_index = 0;
  std::uint64_t pose_seq = 0;
  std::uint64_t vdi_seq = 0;
  std::uint64_t vdi_gen_pose_seq = 0;
  std::array<std::uint8_t, 32> vdi_sha256{};
  RenderMode mode = RenderMode::kFull;
  bool new_vdi = false;  ///< first frame on a freshly swapped VDI
  double frame_ms = 0.0;
  double d_i = 1.0;
  double deviation_deg = 0.0;
  double vdi_age_ms = 0.0;
};

/// Render stage of the client: reads the double buffer once per frame, so each
/// frame uses exactly one complete VDI, and switches between full and preview
/// rendering with the PI controller steering the preview resolution.
class ClientRenderer {
 public:
  ClientRenderer(const DoubleBuffer<ReceivedVdi>& buffer, PreviewParams params,
                 RenderOptions opts, PiController::Config pi = {});

  /// nullopt until the first VDI arrives.
  std::optional<std::pair<Image, FrameReport>> render(const Camera& cam, std::uint64_t pose_seq);

  RenderMode mode() const { return switch_.mode(); }
  double d_i() const { return pi_.d_i(); }

 private:
  const DoubleBuffer<ReceivedVdi>* buffer_;
  PreviewParams params_;
  RenderOptions opts_;
  PiController pi_;
  ModeSwitch switch_;
  bool have_last_ = false;
  std::uint64_t last_seq_ = 0;
  std::uint64_t frames_ = 0;
};

}  // namespace vdi
