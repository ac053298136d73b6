// Copyright 2026 The VDI Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "vdi/camera.hpp"
#include "vdi/image.hpp"
#include "vdi/vdi.hpp"

namespace vdi {

struct RenderOptions {
  bool use_ess = true;
  double early_term_alpha = 0.999;
  Rgba background{0.f, 0.f, 0.f, 1.f};

  void validate() const;
};

/// A novel ray's chord through the generation frustum and the volume, in the
/// generation camera's NDC. s in [0, 1] runs from a0 to a1.
struct NdcChord {
  Vec3 a0 = Vec3::Zero();
  Vec3 a1 = Vec3::Zero();
  double w0 = 1.0;  ///< clip w at a0
  double w1 = 1.0;  ///< clip w at a1
  double t0 = 0.0;  ///< world ray parameter at a0
  double t1 = 0.0;  ///< world ray parameter at a1

  Vec3 at(double s) const { return a0 + s * (a1 - a0); }
  double z(double s) const { return a0.z() + s * (a1.z() - a0.z()); }
  /// World ray parameter of chord position s (undoes the perspective divide).
  double world_t(double s) const {
    const double den = s * w0 + (1.0 - s) * w1;
    const double u = den != 0.0 ? s * w0 / den : s;
    return t0 + u * (t1 - t0);
  }
};

/// Clips a world ray to the volume box and the generation frustum and maps the
/// remaining interval to NDC; nullopt on a miss.
std::optional<NdcChord> project_ray_to_ndc(const Ray& ray, const NdcTransform& gen,
                                           const Aabb& volume_box);

/// One list cell crossed by a chord: s range and NDC depth at its ends.
struct CellVisit {
  int cx = 0;
  int cy = 0;
  double s_in = 0.0;
  double s_out = 0.0;
  double d_entry = 0.0;
  double d_exit = 0.0;
};

/// Incremental 2-D grid walk over the list grid (x steps before y on ties).
class DdaWalker {
 public:
  DdaWalker(const NdcChord& chord, int width, int height, double s_start = 0.0);

  bool done() const { return done_; }
  /// Current cell and the s range of the chord inside it.
  CellVisit current() const;
  void advance();
  /// Jumps to chord position s (> current s_in), re-seeding the walk.
  void restart(double s);

 private:
  void init(double s);

  const NdcChord* chord_;
  int width_;
  int height_;
  int cx_ = 0;
  int cy_ = 0;
  int step_x_ = 0;
  int step_y_ = 0;
  double s_cur_ = 0.0;
  double t_max_x_ = 0.0;
  double t_max_y_ = 0.0;
  double t_delta_x_ = 0.0;
  double t_delta_y_ = 0.0;
  bool done_ = false;
};

/// All cells of a chord in traversal order.
std::vector<CellVisit> dda_traverse(const NdcChord& chord, int width, int height);

/// Sorted, disjoint depth list seen in traversal order; the mirrored view
/// reverses the list and negates depths so that a ray moving towards smaller
/// NDC z can reuse the forward search.
struct ListView {
  std::span<const DepthPair> d;
  bool mirrored = false;

  int size() const { return static_cast<int>(d.size()); }
  float front(int k) const { return mirrored ? -d[d.size() - 1 - k].back : d[k].front; }
  float back(int k) const { return mirrored ? -d[d.size() - 1 - k].front : d[k].back; }
  /// Index into the underlying list.
  int source_index(int k) const { return mirrored ? size() - 1 - k : k; }
};

struct SearchResult {
  int index = -1;      ///< first intersected entry, -1 for none
  int insertion = 0;   ///< first entry with back >= d_entry (may equal size)
  bool found() const { return index >= 0; }
};

/// Seeded first-intersection search. p outside [0, size) means "no seed".
SearchResult find_first_supersegment(const ListView& list, float d_entry, float d_exit, int p);
SearchResult find_first_supersegment(std::span<const DepthPair> list, float d_entry, float d_exit,
                                     int p);

/// Exhaustive reference for the search.
int find_first_linear(std::span<const DepthPair> list, float d_entry, float d_exit);

/// Opacity over a length measured in units of the length it was defined for.
inline double opacity_correct(double alpha, double l) {
  if (alpha <= 0.0 || l <= 0.0) return 0.0;
  if (alpha >= 1.0) return 1.0;
  return 1.0 - std::pow(1.0 - alpha, l);
}

struct RenderStats {
  std::int64_t pixels = 0;
  std::int64_t rays_hit = 0;
  std::int64_t lists_visited = 0;
  std::int64_t supersegments_intersected = 0;
  std::int64_t ess_jumps = 0;
  double ms = 0.0;

  RenderStats& operator+=(const RenderStats& o);
};

/// Renders a VDI from a novel camera at that camera's viewport.
class VdiRenderer {
 public:
  VdiRenderer(const Vdi& vdi, const AccelGrid& grid);

  const Vdi& vdi() const { return *vdi_; }
  const AccelGrid& grid() const { return *grid_; }
  const NdcTransform& gen_transform() const { return gen_; }

  /// World length along the generation ray of list (cx, cy) between two NDC depths.
  double gen_thickness(int cx, int cy, float front, float back) const;

  /// Composites one novel ray; color is premultiplied, alpha accumulated.
  Rgba trace(const Ray& ray, const RenderOptions& opts, RenderStats& stats) const;

  Image render(const Camera& cam, const RenderOptions& opts, RenderStats* stats = nullptr) const;

 private:
  const Vdi* vdi_;
  const AccelGrid* grid_;
  NdcTransform gen_;
  std::vector<double> rlpd_x_;  ///< squared x terms of the per-list length factor
  std::vector<double> rlpd_y_;
};

Image render_vdi(const Vdi& vdi, const AccelGrid& grid, const Camera& cam,
                 const RenderOptions& opts, RenderStats* stats = nullptr);

/// Front-to-back composite of a list's stored supersegments (no length correction).
Rgba composite_list(const Vdi& vdi, std::size_t list, double early_term_alpha);

/// Premultiplied color + alpha over an opaque or translucent background.
Rgba over_background(const Rgba& premult, const Rgba& background);

}  // namespace vdi
