// Copyright 2026 The VDI Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "vdi/remote.hpp"

namespace vdi {

StreamServer::Generator make_vdi_generator(std::shared_ptr<const Volume> volume,
                                           std::shared_ptr<const TransferFunction> tf,
                                           GenParams params) {
  return [volume, tf, params](const PoseMsg& pose, const SessionConfig& cfg) {
    GenParams p = params;
    p.n_sg = cfg.n_sg;
    if (p.delta >= p.n_sg) p.delta = -1;
    const Camera cam = pose.camera.with_viewport(cfg.width, cfg.height);
    const GeneratedVdi g = generate_vdi(*volume, *tf, cam, p);
    return encode_vdi(g.vdi, g.grid);
  };
}

ClientRenderer::ClientRenderer(const DoubleBuffer<ReceivedVdi>& buffer, PreviewParams params,
                               RenderOptions opts, PiController::Config pi)
    : buffer_(&buffer), params_(params), opts_(opts), pi_(pi, params.d_i) {
  params_.validate();
}

std::optional<std::pair<Image, FrameReport>> ClientRenderer::render(const Camera& cam,
                                                                    std::uint64_t pose_seq) {
  const auto held = buffer_->acquire();  // one VDI for the whole frame
  if (!held) return std::nullopt;

  FrameReport rep;
  rep.frame_index = frames_++;
  rep.pose_seq = pose_seq;
  rep.vdi_seq = held->seq;
  rep.vdi_gen_pose_seq = held->gen_pose_seq;
  rep.vdi_sha256 = held->sha256;
  if (!have_last_ || held->seq != last_seq_) {
    rep.new_vdi = true;
    have_last_ = true;
    last_seq_ = held->seq;
    switch_.on_new_vdi();
    pi_.reset(params_.d_i);
  }
  rep.deviation_deg = rad_to_deg(view_deviation(held->vdi.gen_camera(), cam));
  rep.vdi_age_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                             held->received_at)
                       .count();

  rep.mode = switch_.mode();
  rep.d_i = rep.mode == RenderMode::kPreview ? pi_.d_i() : 1.0;
  const auto t0 = std::chrono::steady_clock::now();
  Image img;
  if (rep.mode == RenderMode::kFull) {
    img = render_vdi(held->vdi, held->grid, cam, opts_);
  } else {
    PreviewParams p = params_;
    p.d_i = pi_.d_i();
    img = render_preview(held->vdi, held->grid, cam, p, opts_);
  }
  rep.frame_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  if (rep.mode == RenderMode::kPreview) pi_.update(rep.frame_ms, params_.target_fps);
  switch_.on_frame(1000.0 / std::max(rep.frame_ms, 1e-6), params_.target_fps);
  return std::make_pair(std::move(img), rep);
}

}  // namespace vdi
