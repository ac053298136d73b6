// Copyright 2026 The VDI Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "vdi/raycast.hpp"

#include <chrono>
#include <limits>
#include <mutex>

#include <tbb/blocked_range2d.h>
#include <tbb/parallel_for.h>

#include "vdi/error.hpp"

namespace vdi {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

void RenderOptions::validate() const {
  if (!(early_term_alpha > 0.0 && early_term_alpha <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "early_term_alpha must be in (0, 1]");
  }
}

std::optional<NdcChord> project_ray_to_ndc(const Ray& ray, const NdcTransform& gen,
                                           const Aabb& volume_box) {
  const auto in_box = clip_ray(ray, volume_box);
  if (!in_box) return std::nullopt;
  Ray r = ray;
  r.t_near = in_box->lo;
  r.t_far = in_box->hi;
  const auto in_frustum = clip_ray_to_frustum(r, gen);
  if (!in_frustum || !(in_frustum->hi > in_frustum->lo)) return std::nullopt;

  NdcChord c;
  c.t0 = in_frustum->lo;
  c.t1 = in_frustum->hi;
  const Vec4 h0 = gen.to_clip(ray.at(c.t0));
  const Vec4 h1 = gen.to_clip(ray.at(c.t1));
  if (!(h0.w() > 0.0 && h1.w() > 0.0)) return std::nullopt;
  c.w0 = h0.w();
  c.w1 = h1.w();
  c.a0 = (h0.head<3>() / h0.w()).cwiseMax(-1.0).cwiseMin(1.0);
  c.a1 = (h1.head<3>() / h1.w()).cwiseMax(-1.0).cwiseMin(1.0);
  return c;
}

DdaWalker::DdaWalker(const NdcChord& chord, int width, int height, double s_start)
    : chord_(&chord), width_(width), height_(height) {
  init(s_start);
}

void DdaWalker::init(double s) {
  const NdcChord& c = *chord_;
  const double half_w = 0.5 * width_;
  const double half_h = 0.5 * height_;
  const double x = (c.a0.x() + 1.0) * half_w + s * (c.a1.x() - c.a0.x()) * half_w;
  const double y = (c.a0.y() + 1.0) * half_h + s * (c.a1.y() - c.a0.y()) * half_h;
  const double dx = (c.a1.x() - c.a0.x()) * half_w;  // cells per unit s
  const double dy = (c.a1.y() - c.a0.y()) * half_h;
  cx_ = std::clamp(static_cast<int>(std::floor(x)), 0, width_ - 1);
  cy_ = std::clamp(static_cast<int>(std::floor(y)), 0, height_ - 1);
  s_cur_ = s;
  done_ = !(s < 1.0);

  auto setup = [s](double pos, int cell, double d, int& step, double& t_max, double& t_delta) {
    if (d > 0.0) {
      step = 1;
      t_delta = 1.0 / d;
      t_max = s + (cell + 1 - pos) / d;
    } else if (d < 0.0) {
      step = -1;
      t_delta = -1.0 / d;
      t_max = s + (cell - pos) / d;
    } else {
      step = 0;
      t_delta = kInf;
      t_max = kInf;
    }
  };
  setup(x, cx_, dx, step_x_, t_max_x_, t_delta_x_);
  setup(y, cy_, dy, step_y_, t_max_y_, t_delta_y_);
}

CellVisit DdaWalker::current() const {
  const double s_out = std::max(s_cur_, std::min({t_max_x_, t_max_y_, 1.0}));
  return {cx_, cy_, s_cur_, s_out, chord_->z(s_cur_), chord_->z(s_out)};
}

void DdaWalker::advance() {
  if (done_) return;
  if (std::min(t_max_x_, t_max_y_) >= 1.0) {
    done_ = true;
    return;
  }
  if (t_max_x_ <= t_max_y_) {
    cx_ += step_x_;
    s_cur_ = t_max_x_;
    t_max_x_ += t_delta_x_;
    if (cx_ < 0 || cx_ >= width_) done_ = true;
  } else {
    cy_ += step_y_;
    s_cur_ = t_max_y_;
    t_max_y_ += t_delta_y_;
    if (cy_ < 0 || cy_ >= height_) done_ = true;
  }
}

void DdaWalker::restart(double s) { init(s); }

std::vector<CellVisit> dda_traverse(const NdcChord& chord, int width, int height) {
  std::vector<CellVisit> out;
  for (DdaWalker w(chord, width, height); !w.done(); w.advance()) out.push_back(w.current());
  return out;
}

namespace {

// First k in [lo, hi) with back(k) >= d, or hi.
int lower_bound_back(const ListView& list, double d, int lo, int hi) {
  while (lo < hi) {
    const int mid = lo + (hi - lo) / 2;
    if (static_cast<double>(list.back(mid)) >= d) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return lo;
}

}  // namespace

SearchResult find_first_supersegment(const ListView& list, float d_entry, float d_exit, int p) {
  const int n = list.size();
  const double de = d_entry;
  int j;
  if (p < 0 || p >= n) {
    j = lower_bound_back(list, de, 0, n);
  } else {
    const bool b1 = static_cast<double>(list.back(p)) >= de;
    const bool b0 = p > 0 && static_cast<double>(list.back(p - 1)) >= de;
    const int interval = int(b1) + int(b0);
    if (interval == 1) {
      j = p;
    } else if (interval == 0) {
      j = lower_bound_back(list, de, p + 1, n);
    } else {
      j = lower_bound_back(list, de, 0, p);
    }
  }
  SearchResult r;
  r.insertion = j;
  if (j < n && !(list.front(j) > d_exit)) r.index = j;
  return r;
}

SearchResult find_first_supersegment(std::span<const DepthPair> list, float d_entry, float d_exit,
                                     int p) {
  return find_first_supersegment(ListView{list, false}, d_entry, d_exit, p);
}

int find_first_linear(std::span<const DepthPair> list, float d_entry, float d_exit) {
  for (std::size_t k = 0; k < list.size(); ++k) {
    if (list[k].back >= d_entry && list[k].front <= d_exit) return static_cast<int>(k);
    if (list[k].front > d_exit) return -1;
  }
  return -1;
}

RenderStats& RenderStats::operator+=(const RenderStats& o) {
  pixels += o.pixels;
  rays_hit += o.rays_hit;
  lists_visited += o.lists_visited;
  supersegments_intersected += o.supersegments_intersected;
  ess_jumps += o.ess_jumps;
  return *this;
}

VdiRenderer::VdiRenderer(const Vdi& vdi, const AccelGrid& grid)
    : vdi_(&vdi), grid_(&grid), gen_(vdi.gen_camera()) {
  rlpd_x_.resize(static_cast<std::size_t>(vdi.width()));
  rlpd_y_.resize(static_cast<std::size_t>(vdi.height()));
  for (int cx = 0; cx < vdi.width(); ++cx) {
    const double x = cell_boundary_ndc(cx, vdi.width()) + 1.0 / vdi.width();
    const double f = gen_.ray_length_per_depth(x, 0.0);
    rlpd_x_[static_cast<std::size_t>(cx)] = f * f - 1.0;
  }
  for (int cy = 0; cy < vdi.height(); ++cy) {
    const double y = cell_boundary_ndc(cy, vdi.height()) + 1.0 / vdi.height();
    const double f = gen_.ray_length_per_depth(0.0, y);
    rlpd_y_[static_cast<std::size_t>(cy)] = f * f - 1.0;
  }
}

double VdiRenderer::gen_thickness(int cx, int cy, float front, float back) const {
  const double per_depth = std::sqrt(1.0 + rlpd_x_[static_cast<std::size_t>(cx)] +
                                     rlpd_y_[static_cast<std::size_t>(cy)]);
  return (gen_.view_depth(back) - gen_.view_depth(front)) * per_depth;
}

Rgba VdiRenderer::trace(const Ray& ray, const RenderOptions& opts, RenderStats& stats) const {
  const auto chord = project_ray_to_ndc(ray, gen_, vdi_->volume_aabb());
  if (!chord) return {};
  ++stats.rays_hit;

  const Vdi& vdi = *vdi_;
  const AccelGrid& grid = *grid_;
  const auto& gdims = grid.dims();
  const double dz = chord->a1.z() - chord->a0.z();
  const bool mirrored = dz < 0.0;
  const double sign = mirrored ? -1.0 : 1.0;

  double cr = 0.0, cg = 0.0, cb = 0.0, acc = 0.0;
  int seed = -1;
  DdaWalker walk(*chord, vdi.width(), vdi.height());

  // s-interval of the chord inside grid cell (gx, gy, gz).
  auto box_interval = [&](int gx, int gy, int gz) {
    double lo = 0.0, hi = 1.0;
    const double bmin[3] = {cell_boundary_ndc(gx, gdims[0]), cell_boundary_ndc(gy, gdims[1]),
                            grid.slab_ndc()[static_cast<std::size_t>(gz)]};
    const double bmax[3] = {cell_boundary_ndc(gx + 1, gdims[0]),
                            cell_boundary_ndc(gy + 1, gdims[1]),
                            grid.slab_ndc()[static_cast<std::size_t>(gz) + 1]};
    for (int a = 0; a < 3; ++a) {
      const double o = chord->a0[a];
      const double d = chord->a1[a] - o;
      if (d == 0.0) {
        if (o < bmin[a] || o > bmax[a]) return Interval{1.0, 0.0};
        continue;
      }
      double t0 = (bmin[a] - o) / d;
      double t1 = (bmax[a] - o) / d;
      if (t0 > t1) std::swap(t0, t1);
      lo = std::max(lo, t0);
      hi = std::min(hi, t1);
    }
    return Interval{lo, hi};
  };

  while (!walk.done()) {
    const CellVisit v = walk.current();

    if (opts.use_ess) {
      const Vec3 p = chord->at(0.5 * (v.s_in + v.s_out));
      const auto g = grid.cell_of(p);
      if (grid.count(g[0], g[1], g[2]) == 0) {
        const Interval box = box_interval(g[0], g[1], g[2]);
        const double target = box.hi - 1e-9;
        if (box.lo <= v.s_in + 1e-12 && target > v.s_out) {
          ++stats.ess_jumps;
          walk.restart(target);
          continue;
        }
      }
    }

    const std::size_t list = vdi.list_index(v.cx, v.cy);
    ++stats.lists_visited;
    const auto depths = vdi.depths(list);
    if (!depths.empty()) {
      const ListView lv{depths, mirrored};
      const auto d_entry = static_cast<float>(sign * v.d_entry);
      const auto d_exit = static_cast<float>(sign * v.d_exit);
      const SearchResult r = find_first_supersegment(lv, d_entry, d_exit, seed);
      seed = r.insertion;
      if (r.found()) {
        const auto colors = vdi.colors(list);
        for (int k = r.index; k < lv.size() && !(lv.front(k) > d_exit); ++k) {
          seed = k;
          const double zl = std::max<double>(lv.front(k), sign * v.d_entry);
          const double zh = std::min<double>(lv.back(k), sign * v.d_exit);
          if (!(zh > zl)) continue;
          double sa = v.s_in, sb = v.s_out;
          if (dz != 0.0) {
            sa = std::clamp((sign * zl - chord->a0.z()) / dz, v.s_in, v.s_out);
            sb = std::clamp((sign * zh - chord->a0.z()) / dz, v.s_in, v.s_out);
          }
          const double len = std::abs(chord->world_t(sb) - chord->world_t(sa));
          const int src = lv.source_index(k);
          const DepthPair& dp = depths[static_cast<std::size_t>(src)];
          const Rgba& col = colors[static_cast<std::size_t>(src)];
          if (col.a <= 0.f) continue;
          const double thick = gen_thickness(v.cx, v.cy, dp.front, dp.back);
          const double l = thick > 0.0 ? len / thick : 1.0;
          const double a = opacity_correct(col.a, l);
          const double scale = a / col.a;
          const double wgt = 1.0 - acc;
          cr += wgt * col.r * scale;
          cg += wgt * col.g * scale;
          cb += wgt * col.b * scale;
          acc += wgt * a;
          ++stats.supersegments_intersected;
          if (acc >= opts.early_term_alpha) {
            return {static_cast<float>(cr), static_cast<float>(cg), static_cast<float>(cb),
                    static_cast<float>(acc)};
          }
        }
      }
    }
    walk.advance();
  }
  return {static_cast<float>(cr), static_cast<float>(cg), static_cast<float>(cb),
          static_cast<float>(acc)};
}

Image VdiRenderer::render(const Camera& cam, const RenderOptions& opts, RenderStats* stats) const {
  opts.validate();
  const auto t_start = std::chrono::steady_clock::now();
  const NdcTransform xf(cam);
  Image img(cam.width, cam.height);
  RenderStats total;
  std::mutex m;
  tbb::parallel_for(tbb::blocked_range2d<int>(0, cam.height, 16, 0, cam.width, 16),
                    [&](const tbb::blocked_range2d<int>& tile) {
                      RenderStats local;
                      for (int iy = tile.rows().begin(); iy != tile.rows().end(); ++iy) {
                        for (int ix = tile.cols().begin(); ix != tile.cols().end(); ++ix) {
                          ++local.pixels;
                          const Rgba c = trace(generate_ray(xf, ix, iy), opts, local);
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

Image render_vdi(const Vdi& vdi, const AccelGrid& grid, const Camera& cam,
                 const RenderOptions& opts, RenderStats* stats) {
  return VdiRenderer(vdi, grid).render(cam, opts, stats);
}

Rgba composite_list(const Vdi& vdi, std::size_t list, double early_term_alpha) {
  double cr = 0.0, cg = 0.0, cb = 0.0, acc = 0.0;
  for (const Rgba& c : vdi.colors(list)) {
    const double w = 1.0 - acc;
    cr += w * c.r;
    cg += w * c.g;
    cb += w * c.b;
    acc += w * c.a;
    if (acc >= early_term_alpha) break;
  }
  return {static_cast<float>(cr), static_cast<float>(cg), static_cast<float>(cb),
          static_cast<float>(acc)};
}

Rgba over_background(const Rgba& c, const Rgba& bg) {
  const float w = (1.f - c.a) * bg.a;
  return {c.r + w * bg.r, c.g + w * bg.g, c.b + w * bg.b, c.a + w};
}

}  // namespace vdi
