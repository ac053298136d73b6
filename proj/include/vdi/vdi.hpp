// Copyright 2026 The VDI Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <span>
#include <vector>

#include "vdi/camera.hpp"
#include "vdi/types.hpp"

namespace vdi {

/// NDC depth pair of one supersegment (front < back).
struct DepthPair {
  float front = 0.f;
  float back = 0.f;

  friend bool operator==(const DepthPair&, const DepthPair&) = default;
};

/// One depth interval of a generation ray with its composited, premultiplied color.
struct Supersegment {
  float front = 0.f;
  float back = 0.f;
  Rgba color;  ///< premultiplied rgb, opacity in a

  friend bool operator==(const Supersegment&, const Supersegment&) = default;
};

/// Volumetric depth image: one fixed-capacity list of supersegments per
/// generation pixel. Storage mirrors a two-texture layout (colors and depth
/// pairs) with an explicit count per list. Lists are indexed by NDC cell:
/// index = cy * width + cx with cy growing with NDC y.
class Vdi {
 public:
  Vdi(int width, int height, int n_sg, Camera gen_camera, Aabb volume_aabb);

  int width() const { return width_; }
  int height() const { return height_; }
  int n_sg() const { return n_sg_; }
  std::size_t list_count() const { return counts_.size(); }
  std::size_t list_index(int cx, int cy) const {
    return static_cast<std::size_t>(cy) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(cx);
  }

  const Camera& gen_camera() const { return gen_camera_; }
  const Aabb& volume_aabb() const { return volume_aabb_; }

  int count(std::size_t list) const { return counts_[list]; }
  std::span<const DepthPair> depths(std::size_t list) const {
    return {depths_.data() + list * static_cast<std::size_t>(n_sg_), counts_[list]};
  }
  std::span<const Rgba> colors(std::size_t list) const {
    return {colors_.data() + list * static_cast<std::size_t>(n_sg_), counts_[list]};
  }
  Supersegment segment(std::size_t list, int k) const;

  /// Replaces a list's contents; at most n_sg entries.
  void set_list(std::size_t list, std::span<const Supersegment> segments);

  const std::vector<std::uint16_t>& counts() const { return counts_; }
  std::size_t total_supersegments() const;

  /// Throws kInvariantViolation when a list is unsorted, overlapping, has a
  /// non-positive extent, depths outside [-1, 1], or non-premultiplied color.
  void validate() const;

  friend bool operator==(const Vdi& a, const Vdi& b);

 private:
  int width_;
  int height_;
  int n_sg_;
  Camera gen_camera_;
  Aabb volume_aabb_;
  std::vector<std::uint16_t> counts_;
  std::vector<DepthPair> depths_;
  std::vector<Rgba> colors_;
};

/// List cell of an NDC (x, y) position, clamped to the grid.
std::array<int, 2> list_cell_of(const Vec2& ndc_xy, int width, int height);

/// NDC coordinate of the i-th of n cell boundaries along one axis.
inline double cell_boundary_ndc(int i, int n) { return 2.0 * i / n - 1.0; }

/// Per-cell supersegment counts over a frustum-aligned grid: x and y split the
/// list grid evenly, z uses slabs of constant view-space depth between the
/// generation camera's near and far planes.
class AccelGrid {
 public:
  AccelGrid(std::array<int, 3> dims, const Camera& gen_camera);

  /// One cell per 16x16 lists and 32 depth slabs, at least one per axis.
  static std::array<int, 3> default_dims(int width, int height);

  const std::array<int, 3>& dims() const { return dims_; }
  std::size_t cell_count() const { return counts_.size(); }
  std::size_t index(int gx, int gy, int gz) const {
    return (static_cast<std::size_t>(gz) * dims_[1] + gy) * dims_[0] + gx;
  }
  std::uint32_t count(std::size_t cell) const { return counts_[cell]; }
  std::uint32_t count(int gx, int gy, int gz) const { return counts_[index(gx, gy, gz)]; }
  const std::vector<std::uint32_t>& counts() const { return counts_; }
  std::vector<std::uint32_t>& mutable_counts() { return counts_; }

  /// gz + 1 view-depth boundaries, uniform from near to far.
  const std::vector<double>& z_slabs() const { return z_slabs_; }
  /// The same boundaries as NDC z.
  const std::vector<double>& slab_ndc() const { return slab_ndc_; }

  /// Slab of an NDC depth with half-open slabs [z_k, z_k+1), clamped.
  int slab_of_ndc(double ndc_z) const;
  /// Grid cell of an NDC point, clamped.
  std::array<int, 3> cell_of(const Vec3& ndc) const;

  /// Grid columns covering list column cx (of a list grid `list_width` wide).
  std::array<int, 2> columns_for_list_x(int cx, int list_width) const {
    return cover(cx, list_width, dims_[0]);
  }
  std::array<int, 2> rows_for_list_y(int cy, int list_height) const {
    return cover(cy, list_height, dims_[1]);
  }

  /// Calls fn(cell index) for every cell a supersegment's footprint overlaps.
  template <class Fn>
  void for_each_footprint_cell(int cx, int cy, int list_width, int list_height, float front,
                               float back, Fn&& fn) const {
    const auto xs = columns_for_list_x(cx, list_width);
    const auto ys = rows_for_list_y(cy, list_height);
    const int z0 = slab_of_ndc(front);
    const int z1 = slab_of_ndc(back);
    for (int gz = z0; gz <= z1; ++gz)
      for (int gy = ys[0]; gy <= ys[1]; ++gy)
        for (int gx = xs[0]; gx <= xs[1]; ++gx) fn(index(gx, gy, gz));
  }

  /// Atomic increment of every footprint cell; safe from concurrent generators.
  void add_footprint(int cx, int cy, int list_width, int list_height, float front, float back);

  /// Rebuilds counts from scratch for a VDI.
  void recount(const Vdi& vdi);

  friend bool operator==(const AccelGrid& a, const AccelGrid& b) {
    return a.dims_ == b.dims_ && a.counts_ == b.counts_ && a.z_slabs_ == b.z_slabs_;
  }

 private:
  static std::array<int, 2> cover(int i, int n_fine, int n_coarse) {
    const long lo = static_cast<long>(i) * n_coarse / n_fine;
    const long hi = (static_cast<long>(i + 1) * n_coarse + n_fine - 1) / n_fine - 1;
    return {static_cast<int>(lo), static_cast<int>(std::max(lo, hi))};
  }

  std::array<int, 3> dims_;
  std::vector<std::uint32_t> counts_;
  std::vector<double> z_slabs_;
  std::vector<double> slab_ndc_;
};

/// Index of the grid cell holding an NDC point (x, y by NDC, z by view-depth slab).
std::size_t grid_cell_of(const Vec3& ndc, const AccelGrid& grid);

}  // namespace vdi
