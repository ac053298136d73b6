// Copyright 2026 The VDI Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "vdi/vdi.hpp"

#include <string>

#include "vdi/error.hpp"

namespace vdi {

Vdi::Vdi(int width, int height, int n_sg, Camera gen_camera, Aabb volume_aabb)
    : width_(width),
      height_(height),
      n_sg_(n_sg),
      gen_camera_(std::move(gen_camera)),
      volume_aabb_(std::move(volume_aabb)) {
  if (width_ <= 0 || height_ <= 0) throw Error(ErrorCode::kInvalidArgument, "VDI size must be positive");
  if (n_sg_ < 1 || n_sg_ > 65535) throw Error(ErrorCode::kInvalidArgument, "n_sg must be in [1, 65535]");
  gen_camera_.width = width_;
  gen_camera_.height = height_;
  const std::size_t lists = static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  counts_.assign(lists, 0);
  depths_.assign(lists * static_cast<std::size_t>(n_sg_), DepthPair{});
  colors_.assign(lists * static_cast<std::size_t>(n_sg_), Rgba{});
}

Supersegment Vdi::segment(std::size_t list, int k) const {
  const std::size_t i = list * static_cast<std::size_t>(n_sg_) + static_cast<std::size_t>(k);
  return {depths_[i].front, depths_[i].back, colors_[i]};
}

void Vdi::set_list(std::size_t list, std::span<const Supersegment> segments) {
  if (segments.size() > static_cast<std::size_t>(n_sg_)) {
    throw Error(ErrorCode::kInvariantViolation, "list exceeds n_sg");
  }
  const std::size_t base = list * static_cast<std::size_t>(n_sg_);
  for (std::size_t k = 0; k < segments.size(); ++k) {
    depths_[base + k] = {segments[k].front, segments[k].back};
    colors_[base + k] = segments[k].color;
  }
  for (std::size_t k = segments.size(); k < static_cast<std::size_t>(n_sg_); ++k) {
    depths_[base + k] = {};
    colors_[base + k] = {};
  }
  counts_[list] = static_cast<std::uint16_t>(segments.size());
}

std::size_t Vdi::total_supersegments() const {
  std::size_t n = 0;
  for (auto c : counts_) n += c;
  return n;
}

void Vdi::validate() const {
  auto fail = [](std::size_t list, int k, const char* what) {
    throw Error(ErrorCode::kInvariantViolation,
                "list " + std::to_string(list) + " entry " + std::to_string(k) + ": " + what);
  };
  for (std::size_t list = 0; list < counts_.size(); ++list) {
    if (counts_[list] > n_sg_) fail(list, counts_[list], "count exceeds n_sg");
    const auto d = depths(list);
    const auto c = colors(list);
    for (int k = 0; k < static_cast<int>(d.size()); ++k) {
      if (!(d[k].front < d[k].back)) fail(list, k, "front must be < back");
      if (!(d[k].front >= -1.f && d[k].back <= 1.f)) fail(list, k, "depth outside [-1, 1]");
      if (k + 1 < static_cast<int>(d.size()) && !(d[k].back <= d[k + 1].front)) {
        fail(list, k, "supersegments overlap or are unsorted");
      }
      const Rgba& col = c[k];
      if (!(col.a >= 0.f && col.a <= 1.f)) fail(list, k, "alpha outside [0, 1]");
      for (float v : {col.r, col.g, col.b}) {
        if (!(v >= 0.f && v <= col.a + 1e-6f)) fail(list, k, "color not premultiplied");
      }
    }
  }
}

bool operator==(const Vdi& a, const Vdi& b) {
  if (a.width_ != b.width_ || a.height_ != b.height_ || a.n_sg_ != b.n_sg_) return false;
  if (!(a.gen_camera_ == b.gen_camera_)) return false;
  if (a.volume_aabb_.min != b.volume_aabb_.min || a.volume_aabb_.max != b.volume_aabb_.max) {
    return false;
  }
  if (a.counts_ != b.counts_) return false;
  for (std::size_t list = 0; list < a.counts_.size(); ++list) {
    const auto da = a.depths(list);
    const auto db = b.depths(list);
    const auto ca = a.colors(list);
    const auto cb = b.colors(list);
    if (!std::equal(da.begin(), da.end(), db.begin())) return false;
    if (!std::equal(ca.begin(), ca.end(), cb.begin())) return false;
  }
  return true;
}

std::array<int, 2> list_cell_of(const Vec2& ndc_xy, int width, int height) {
  const int cx = static_cast<int>(std::floor((ndc_xy.x() + 1.0) * width / 2.0));
  const int cy = static_cast<int>(std::floor((ndc_xy.y() + 1.0) * height / 2.0));
  return {std::clamp(cx, 0, width - 1), std::clamp(cy, 0, height - 1)};
}

AccelGrid::AccelGrid(std::array<int, 3> dims, const Camera& gen_camera) : dims_(dims) {
  for (int d : dims_) {
    if (d < 1) throw Error(ErrorCode::kInvalidArgument, "grid dims must be >= 1");
  }
  counts_.assign(static_cast<std::size_t>(dims_[0]) * dims_[1] * dims_[2], 0);
  const NdcTransform xf(gen_camera);
  const double n = gen_camera.near_plane;
  const double f = gen_camera.far_plane;
  z_slabs_.resize(static_cast<std::size_t>(dims_[2]) + 1);
  slab_ndc_.resize(z_slabs_.size());
  for (int k = 0; k <= dims_[2]; ++k) {
    z_slabs_[k] = n + (f - n) * k / dims_[2];
  }
  z_slabs_.front() = n;
  z_slabs_.back() = f;
  for (std::size_t k = 0; k < z_slabs_.size(); ++k) slab_ndc_[k] = xf.ndc_z(z_slabs_[k]);
  slab_ndc_.front() = -1.0;
  slab_ndc_.back() = 1.0;
}

std::array<int, 3> AccelGrid::default_dims(int width, int height) {
  return {std::max(1, width / 16), std::max(1, height / 16), 32};
}

int AccelGrid::slab_of_ndc(double ndc_z) const {
  // First boundary strictly greater than z, minus one: half-open slabs.
  const auto it = std::upper_bound(slab_ndc_.begin(), slab_ndc_.end(), ndc_z);
  const int k = static_cast<int>(it - slab_ndc_.begin()) - 1;
  return std::clamp(k, 0, dims_[2] - 1);
}

std::array<int, 3> AccelGrid::cell_of(const Vec3& ndc) const {
  const auto xy = list_cell_of(ndc.head<2>(), dims_[0], dims_[1]);
  return {xy[0], xy[1], slab_of_ndc(ndc.z())};
}

void AccelGrid::add_footprint(int cx, int cy, int list_width, int list_height, float front,
                              float back) {
  for_each_footprint_cell(cx, cy, list_width, list_height, front, back, [this](std::size_t c) {
    std::atomic_ref<std::uint32_t>(counts_[c]).fetch_add(1, std::memory_order_relaxed);
  });
}

void AccelGrid::recount(const Vdi& vdi) {
  std::fill(counts_.begin(), counts_.end(), 0);
  for (int cy = 0; cy < vdi.height(); ++cy) {
    for (int cx = 0; cx < vdi.width(); ++cx) {
      for (const DepthPair& d : vdi.depths(vdi.list_index(cx, cy))) {
        for_each_footprint_cell(cx, cy, vdi.width(), vdi.height(), d.front, d.back,
                                [this](std::size_t c) { ++counts_[c]; });
      }
    }
  }
}

std::size_t grid_cell_of(const Vec3& ndc, const AccelGrid& grid) {
  const auto c = grid.cell_of(ndc);
  return grid.index(c[0], c[1], c[2]);
}

}  // namespace vdi
