// Copyright 2026 The VDI Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>

#include "vdi/camera.hpp"
#include "vdi/image.hpp"
#include "vdi/raycast.hpp"
#include "vdi/vdi.hpp"

namespace vdi {

struct PreviewParams {
  double d_i = 1.0;  ///< image-space resolution factor
  double d_r = 1.0;  ///< along-ray sampling rate
  double target_fps = 30.0;

  void validate() const;
};

/// round-half-up(d_r * isect_len * count); zero for empty cells.
inline std::int64_t samples_in_cell(double d_r, double isect_len, std::uint32_t count) {
  if (count == 0) return 0;
  return static_cast<std::int64_t>(std::floor(d_r * isect_len * count + 0.5));
}

struct PreviewStats {
  std::int64_t rays_hit = 0;
  std::int64_t cells_visited = 0;
  std::int64_t empty_cells = 0;
  std::int64_t samples = 0;
  std::int64_t samples_in_empty_cells = 0;  ///< must stay zero
  std::int64_t list_lookups = 0;
  std::int64_t list_lookups_in_empty_cells = 0;  ///< must stay zero
  std::int64_t samples_hit = 0;
  double ms = 0.0;

  PreviewStats& operator+=(const PreviewStats& o);
};

/// Grid cell crossed by a chord with its chord parameter range.
struct GridVisit {
  int gx = 0;
  int gy = 0;
  int gz = 0;
  double s_in = 0.0;
  double s_out = 0.0;
};

/// Walks the acceleration grid (uniform in NDC x/y, depth slabs in z) along a chord.
std::vector<GridVisit> grid_traverse(const NdcChord& chord, const AccelGrid& grid);

class PreviewRenderer {
 public:
  PreviewRenderer(const Vdi& vdi, const AccelGrid& grid);

  /// Budgeted point sampling of one ray (premultiplied result).
  Rgba trace(const Ray& ray, double d_r, double early_term_alpha, PreviewStats& stats) const;

  /// Low-resolution render at round(W * d_i) x round(H * d_i), W x H = cam viewport.
  Image render_low(const Camera& cam, const PreviewParams& params, const RenderOptions& opts,
                   PreviewStats* stats = nullptr) const;

  /// Low-resolution render upsampled bilinearly to the camera viewport.
  Image render(const Camera& cam, const PreviewParams& params, const RenderOptions& opts,
               PreviewStats* stats = nullptr) const;

 private:
  const Vdi* vdi_;
  const AccelGrid* grid_;
  VdiRenderer full_;  ///< shared projection and thickness helpers
};

Image render_preview(const Vdi& vdi, const AccelGrid& grid, const Camera& cam,
                     const PreviewParams& params, const RenderOptions& opts,
                     PreviewStats* stats = nullptr);

/// Low-res viewport size for a display size and factor; at least 1x1.
std::array<int, 2> preview_size(int width, int height, double d_i);

/// Proportional-integral controller on the image-space factor.
class PiController {
 public:
  struct Config {
    double kp = 4e-3;  ///< per ms of error
    double ki = 2e-4;
    double d_min = 0.1;
    double d_max = 1.0;
  };

  PiController() : PiController(Config{}) {}
  explicit PiController(Config cfg, double d_i = 1.0);

  /// Feeds one measured frame time; returns the new factor.
  double update(double measured_frame_ms, double target_fps);

  double d_i() const { return d_i_; }
  double integral() const { return integral_; }
  const Config& config() const { return cfg_; }
  void reset(double d_i);

 private:
  Config cfg_;
  double d_i_;
  double integral_ = 0.0;
};

enum class RenderMode { kFull, kPreview };

/// Full quality until `slow_frames` consecutive frames miss the target;
/// back to full quality when a new VDI arrives.
class ModeSwitch {
 public:
  explicit ModeSwitch(int slow_frames = 5) : slow_frames_(slow_frames) {}

  RenderMode on_frame(double measured_fps, double target_fps);
  RenderMode on_new_vdi();
  RenderMode mode() const { return mode_; }

 private:
  int slow_frames_;
  int slow_run_ = 0;
  RenderMode mode_ = RenderMode::kFull;
};

const char* to_string(RenderMode mode);

}  // namespace vdi
