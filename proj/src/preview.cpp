// Copyright 2026 The VDI Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "vdi/preview.hpp"

#include <chrono>
#include <limits>
#include <mutex>

#include <tbb/blocked_range2d.h>
#include <tbb/parallel_for.h>

#include "vdi/error.hpp"

namespace vdi {

void PreviewParams::validate() const {
  if (!(d_i > 0.0 && d_i <= 1.0)) throw Error(ErrorCode::kInvalidArgument, "d_i must be in (0, 1]");
  if (!(d_r > 0.0 && d_r <= 1.0)) throw Error(ErrorCode::kInvalidArgument, "d_r must be in (0, 1]");
  if (!(target_fps > 0.0)) throw Error(ErrorCode::kInvalidArgument, "target fps must be positive");
}

PreviewStats& PreviewStats::operator+=(const PreviewStats& o) {
  rays_hit += o.rays_hit;
  cells_visited += o.cells_visited;
  empty_cells += o.empty_cells;
  samples += o.samples;
  samples_in_empty_cells += o.samples_in_empty_cells;
  list_lookups += o.list_lookups;
  list_lookups_in_empty_cells += o.list_lookups_in_empty_cells;
  samples_hit += o.samples_hit;
  return *this;
}

std::vector<GridVisit> grid_traverse(const NdcChord& chord, const AccelGrid& grid) {
  const auto& dims = grid.dims();
  const auto& slabs = grid.slab_ndc();
  auto boundary = [&](int axis, int i) {
    return axis == 2 ? slabs[static_cast<std::size_t>(i)] : cell_boundary_ndc(i, dims[axis]);
  };
  const auto start = grid.cell_of(chord.a0);
  int cell[3] = {start[0], start[1], start[2]};
  double dir[3];
  for (int a = 0; a < 3; ++a) dir[a] = chord.a1[a] - chord.a0[a];

  std::vector<GridVisit> out;
  double s = 0.0;
  while (true) {
    double next[3];
    for (int a = 0; a < 3; ++a) {
      if (dir[a] > 0.0) {
        next[a] = (boundary(a, cell[a] + 1) - chord.a0[a]) / dir[a];
      } else if (dir[a] < 0.0) {
        next[a] = (boundary(a, cell[a]) - chord.a0[a]) / dir[a];
      } else {
        next[a] = std::numeric_limits<double>::infinity();
      }
    }
    int axis = 0;
    if (next[1] < next[axis]) axis = 1;
    if (next[2] < next[axis]) axis = 2;
    const double s_out = std::max(s, std::min(next[axis], 1.0));
    if (s_out > s) out.push_back({cell[0], cell[1], cell[2], s, s_out});
    if (next[axis] >= 1.0) break;
    cell[axis] += dir[axis] > 0.0 ? 1 : -1;
    if (cell[axis] < 0 || cell[axis] >= dims[axis]) break;
    s = s_out;
  }
  return out;
}

PreviewRenderer::PreviewRenderer(const Vdi& vdi, const AccelGrid& grid)
    : vdi_(&vdi), grid_(&grid), full_(vdi, grid) {}

Rgba PreviewRenderer::trace(const Ray& ray, double d_r, double early_term_alpha,
                            PreviewStats& stats) const {
  const auto chord = project_ray_to_ndc(ray, full_.gen_transform(), vdi_->volume_aabb());
  if (!chord) return {};
  ++stats.rays_hit;
  const Vdi& vdi = *vdi_;
  double cr = 0.0, cg = 0.0, cb = 0.0, acc = 0.0;
  int seed = -1;

  for (const GridVisit& v : grid_traverse(*chord, *grid_)) {
    ++stats.cells_visited;
    const std::uint32_t count = grid_->count(v.gx, v.gy, v.gz);
    if (count == 0) {
      ++stats.empty_cells;
      continue;
    }
    const double t_in = chord->world_t(v.s_in);
    const double t_out = chord->world_t(v.s_out);
    const double len = std::abs(t_out - t_in);
    const std::int64_t n = samples_in_cell(d_r, len, count);
    if (n == 0) continue;
    const double h = len / static_cast<double>(n);
    for (std::int64_t k = 0; k < n; ++k) {
      ++stats.samples;
      const double t = t_in + (static_cast<double>(k) + 0.5) * (t_out - t_in) / static_cast<double>(n);
      const double u = (t - chord->t0) / (chord->t1 - chord->t0);
      const double den = (1.0 - u) * chord->w0 + u * chord->w1;
      const double s = den != 0.0 ? u * chord->w1 / den : u;
      const Vec3 p = chord->at(s);
      // instrumentation: the sample's own grid cell must be occupied
      const auto gc = grid_->cell_of(p);
      const bool empty_here = grid_->count(gc[0], gc[1], gc[2]) == 0;
      if (empty_here) ++stats.samples_in_empty_cells;
      const auto c = list_cell_of(p.head<2>(), vdi.width(), vdi.height());
      const std::size_t list = vdi.list_index(c[0], c[1]);
      const auto depths = vdi.depths(list);
      ++stats.list_lookups;
      if (empty_here) ++stats.list_lookups_in_empty_cells;
      if (depths.empty()) continue;
      const auto z = static_cast<float>(p.z());
      const SearchResult r = find_first_supersegment(depths, z, z, seed);
      seed = r.insertion;
      if (!r.found()) continue;
      ++stats.samples_hit;
      const DepthPair& dp = depths[static_cast<std::size_t>(r.index)];
      const Rgba& col = vdi.colors(list)[static_cast<std::size_t>(r.index)];
      if (col.a <= 0.f) continue;
      const double thick = full_.gen_thickness(c[0], c[1], dp.front, dp.back);
      const double a = opacity_correct(col.a, thick > 0.0 ? h / thick : 1.0);
      const double scale = a / col.a;
      const double w = 1.0 - acc;
      cr += w * col.r * scale;
      cg += w * col.g * scale;
      cb += w * col.b * scale;
      acc += w * a;
      if (acc >= early_term_alpha) {
        return {static_cast<float>(cr), static_cast<float>(cg), static_cast<float>(cb),
                static_cast<float>(acc)};
      }
    }
  }
  return {static_cast<float>(cr), static_cast<float>(cg), static_cast<float>(cb),
          static_cast<float>(acc)};
}

std::array<int, 2> preview_size(int width, int height, double d_i) {
  return {std::max(1, static_cast<int>(std::lround(width * d_i))),
          std::max(1, static_cast<int>(std::lround(height * d_i)))};
}

Image PreviewRenderer::render_low(const Camera& cam, const PreviewParams& params,
                                  const RenderOptions& opts, PreviewStats* stats) const {
  params.validate();
  opts.validate();
  const auto t_start = std::chrono::steady_clock::now();
  const auto size = preview_size(cam.width, cam.height, params.d_i);
  const Camera low = cam.with_viewport(size[0], size[1]);
  const NdcTransform xf(low);
  Image img(size[0], size[1]);
  PreviewStats total;
  std::mutex m;
  tbb::parallel_for(tbb::blocked_range2d<int>(0, low.height, 16, 0, low.width, 16),
                    [&](const tbb::blocked_range2d<int>& tile) {
                      PreviewStats local;
                      for (int iy = tile.rows().begin(); iy != tile.rows().end(); ++iy) {
                        for (int ix = tile.cols().begin(); ix != tile.cols().end(); ++ix) {
                          const Rgba c = trace(generate_ray(xf, ix, iy), params.d_r,
                                               opts.early_term_alpha, local);
                          img.at(ix, iy) = over_background(c, opts.background);
                        }
                      }
                      std::lock_guard lock(m);
                      total += local;
                    });
  total.ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t_start).count();
  if (stats) *stats = total;
  return img;
}

Image PreviewRenderer::render(const Camera& cam, const PreviewParams& params,
                              const RenderOptions& opts, PreviewStats* stats) const {
  const auto t_start = std::chrono::steady_clock::now();
  Image out = resize_bilinear(render_low(cam, params, opts, stats), cam.width, cam.height);
  if (stats) {
    stats->ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t_start)
                    .count();
  }
  return out;
}

Image render_preview(const Vdi& vdi, const AccelGrid& grid, const Camera& cam,
                     const PreviewParams& params, const RenderOptions& opts, PreviewStats* stats) {
  return PreviewRenderer(vdi, grid).render(cam, params, opts, stats);
}

PiController::PiController(Config cfg, double d_i) : cfg_(cfg), d_i_(d_i) {
  if (!(cfg_.d_min > 0.0 && cfg_.d_min <= cfg_.d_max && cfg_.d_max <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "controller bounds must satisfy 0 < min <= max <= 1");
  }
  if (cfg_.kp < 0.0 || cfg_.ki < 0.0) throw Error(ErrorCode::kInvalidArgument, "negative gain");
  d_i_ = std::clamp(d_i_, cfg_.d_min, cfg_.d_max);
}

void PiController::reset(double d_i) {
  d_i_ = std::clamp(d_i, cfg_.d_min, cfg_.d_max);
  integral_ = 0.0;
}

double PiController::update(double measured_frame_ms, double target_fps) {
  if (!(measured_frame_ms > 0.0) || !(target_fps > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "frame time and target must be positive");
  }
  const double error = 1000.0 / target_fps - measured_frame_ms;
  integral_ += error;
  if (cfg_.ki > 0.0) {
    const double limit = (cfg_.d_max - cfg_.d_min) / cfg_.ki;
    integral_ = std::clamp(integral_, -limit, limit);
  }
  d_i_ = std::clamp(d_i_ + cfg_.kp * error + cfg_.ki * integral_, cfg_.d_min, cfg_.d_max);
  return d_i_;
}

RenderMode ModeSwitch::on_frame(double measured_fps, double target_fps) {
  if (mode_ == RenderMode::kFull) {
    slow_run_ = measured_fps < target_fps ? slow_run_ + 1 : 0;
    if (slow_run_ >= slow_frames_) mode_ = RenderMode::kPreview;
  }
  return mode_;
}

RenderMode ModeSwitch::on_new_vdi() {
  slow_run_ = 0;
  mode_ = RenderMode::kFull;
  return mode_;
}

const char* to_string(RenderMode mode) { return mode == RenderMode::kFull ? "full" : "preview"; }

}  // namespace vdi
