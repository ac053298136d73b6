// Copyright 2026 The VDI Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "vdi/generate.hpp"

#include <chrono>
#include <cmath>
#include <mutex>

#include <tbb/blocked_range.h>
#include <tbb/parallel_for.h>

#include "vdi/error.hpp"

namespace vdi {

int GenParams::resolved_delta() const {
  if (delta >= 0) return delta;
  const int d = std::max(1, static_cast<int>(std::floor(0.15 * n_sg)));
  return std::min(d, n_sg - 1);
}

double GenParams::resolved_step(const Volume& volume) const {
  return step > 0.0 ? step : 0.5 * volume.min_spacing();
}

void GenParams::validate() const {
  if (n_sg < 1 || n_sg > 65535) throw Error(ErrorCode::kInvalidArgument, "n_sg must be in [1, 65535]");
  const int d = resolved_delta();
  if (d < 0 || d >= n_sg) throw Error(ErrorCode::kInvalidArgument, "delta must be in [0, n_sg)");
  if (!(epsilon > 0.0 && epsilon < 0.1)) throw Error(ErrorCode::kInvalidArgument, "epsilon must be small and positive");
  if (!(gamma_init > 0.0 && gamma_init <= kMaxGamma)) {
    throw Error(ErrorCode::kInvalidArgument, "gamma_init must be in (0, sqrt(3)]");
  }
  if (!(alpha_early > 0.0 && alpha_early <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "alpha_early must be in (0, 1]");
  }
}

bool terminate_check(const std::array<float, 3>& seg_premult, const Rgba& sample,
                     double alpha_prime, double gamma) {
  const double dr = seg_premult[0] - sample.r * alpha_prime;
  const double dg = seg_premult[1] - sample.g * alpha_prime;
  const double db = seg_premult[2] - sample.b * alpha_prime;
  return std::sqrt(dr * dr + dg * dg + db * db) >= gamma;
}

GenContext::GenContext(const Volume& volume, const TransferFunction& tf, const Camera& camera,
                       double step)
    : volume_(&volume), classifier_(volume, tf, step), transform_(camera) {}

std::optional<GenRay> GenContext::clip(const Ray& ray) const {
  const auto hit = clip_ray(ray, volume_->world_bounds());
  if (!hit || !(hit->hi > hit->lo)) return std::nullopt;
  const Camera& cam = camera();
  const Vec3 fwd = cam.forward();
  GenRay r;
  r.ray = ray;
  r.t0 = hit->lo;
  r.t1 = hit->hi;
  r.depth0 = fwd.dot(ray.origin - cam.position);
  r.depth_dt = fwd.dot(ray.dir);
  return r;
}

std::optional<GenRay> GenContext::pixel_ray(int ix, int iy) const {
  return clip(generate_ray(transform_, ix, iy));
}

std::int64_t GenContext::sample_count(const GenRay& r) const {
  if (!(r.t1 > r.t0)) return 0;
  return static_cast<std::int64_t>(std::ceil((r.t1 - r.t0) / step()));
}

StepSample GenContext::sample(const GenRay& r, double t) const {
  const Vec3 p = volume_->world_to_normalized(r.ray.at(t)).cwiseMax(0.0).cwiseMin(1.0);
  return classifier_.sample(p);
}

float GenContext::ndc_z(const GenRay& r, double t) const {
  return static_cast<float>(std::clamp(transform_.ndc_z(r.view_depth(t)), -1.0, 1.0));
}

namespace {

struct Accum {
  double c[3] = {0, 0, 0};
  double a = 0.0;
  int k = 0;
  double t_front = 0.0;
  double t_back = 0.0;

  void add(const StepSample& s, double t_end) {
    const double w = (1.0 - a) * s.alpha;
    c[0] += w * s.color.r;
    c[1] += w * s.color.g;
    c[2] += w * s.color.b;
    a += w;
    ++k;
    t_back = t_end;
  }
};

std::vector<Supersegment> to_segments(const std::vector<Accum>& acc, const GenRay& ray,
                                      const GenContext& ctx) {
  std::vector<Supersegment> out;
  out.reserve(acc.size());
  // Depths at the volume entry/exit round inward, so a renderer that clips to
  // the box in double precision never trims a stored boundary.
  const auto exact = [&](double t) {
    return std::clamp(ctx.transform().ndc_z(ray.view_depth(t)), -1.0, 1.0);
  };
  float floor = -1.f;
  for (const Accum& s : acc) {
    Supersegment seg;
    seg.front = std::max(ctx.ndc_z(ray, s.t_front), floor);
    seg.back = ctx.ndc_z(ray, s.t_back);
    if (s.t_front <= ray.t0 && seg.front < exact(s.t_front)) seg.front = std::nextafter(seg.front, 2.f);
    if (s.t_back >= ray.t1 && seg.back > exact(s.t_back)) seg.back = std::nextafter(seg.back, -2.f);
    // Depth quantization can collapse very thin segments.
    if (!(seg.back > seg.front)) seg.back = std::nextafter(seg.front, 2.f);
    floor = seg.back;
    const float a = static_cast<float>(std::clamp(s.a, 0.0, 1.0));
    seg.color = {std::min(static_cast<float>(s.c[0]), a), std::min(static_cast<float>(s.c[1]), a),
                 std::min(static_cast<float>(s.c[2]), a), a};
    out.push_back(seg);
  }
  return out;
}

}  // namespace

ListResult generate_list(const GenRay& ray, const GenContext& ctx, double gamma, int n_sg,
                         double alpha_early, BudgetMode mode) {
  ListResult result;
  const std::int64_t n = ctx.sample_count(ray);
  const double step = ctx.step();
  const StepClassifier& cls = ctx.classifier();

  std::vector<Accum> stored;
  Accum v;  // the unbounded segmentation, drives counting and the criterion
  bool open = false;
  double transmittance = 1.0;

  for (std::int64_t i = 0; i < n; ++i) {
    const double t = ray.t0 + static_cast<double>(i) * step;
    const double t_end = std::min(t + step, ray.t1);
    const StepSample s = ctx.sample(ray, t);
    if (s.alpha <= 0.f) {
      open = false;
      continue;
    }
    if (open) {
      const double alpha_prime = cls.alpha_over_steps(s.color.a, v.k);
      const std::array<float, 3> seg{static_cast<float>(v.c[0]), static_cast<float>(v.c[1]),
                                     static_cast<float>(v.c[2])};
      if (terminate_check(seg, s.color, alpha_prime, gamma)) open = false;
    }
    if (!open) {
      ++result.count;
      v = Accum{};
      v.t_front = t;
      open = true;
      if (result.count > n_sg && mode != BudgetMode::kUnbounded) {
        result.exceeded = true;
        if (mode == BudgetMode::kAbort) {
          result.segments = to_segments(stored, ray, ctx);
          return result;
        }
      } else {
        Accum fresh;
        fresh.t_front = t;
        stored.push_back(fresh);
      }
    }
    v.add(s, t_end);
    stored.back().add(s, t_end);
    transmittance *= 1.0 - s.alpha;
    if (1.0 - transmittance >= alpha_early) break;
  }
  result.segments = to_segments(stored, ray, ctx);
  return result;
}

GammaResult find_gamma(const GenRay& ray, const GenContext& ctx, const GenParams& params) {
  const int n_sg = params.n_sg;
  const int lower = n_sg - params.resolved_delta();
  GammaResult out;
  auto run = [&](double g) {
    ++out.passes;
    return generate_list(ray, ctx, g, n_sg, params.alpha_early, BudgetMode::kSmear);
  };
  auto finish = [&](double g, ListResult&& r, bool fit) {
    out.gamma = g;
    out.count = static_cast<int>(r.segments.size());
    out.segments = std::move(r.segments);
    out.fit = fit;
    return std::move(out);
  };

  ListResult r = run(params.gamma_init);
  if (r.count <= n_sg) return finish(params.gamma_init, std::move(r), true);

  double low = params.gamma_init;
  double high = kMaxGamma;
  std::optional<ListResult> at_high;  // list at `high` once one was evaluated
  double top_gamma = params.gamma_init;
  ListResult top = std::move(r);  // list at the highest gamma evaluated

  while (high - low >= params.epsilon) {
    const double g = 0.5 * (low + high);
    r = run(g);
    if (r.count > n_sg) {
      low = g;
      if (g > top_gamma) {
        top_gamma = g;
        top = std::move(r);
      }
    } else if (r.count < lower) {
      high = g;
      at_high = std::move(r);
    } else {
      return finish(g, std::move(r), true);
    }
  }
  if (at_high) return finish(high, std::move(*at_high), true);
  return finish(top_gamma, std::move(top), false);
}

GeneratedVdi generate_vdi(const Volume& volume, const TransferFunction& tf, const Camera& camera,
                          const GenParams& params) {
  params.validate();
  const auto t_start = std::chrono::steady_clock::now();
  const GenContext ctx(volume, tf, camera, params.resolved_step(volume));
  const int w = camera.width;
  const int h = camera.height;
  const auto dims = params.grid_dims[0] > 0 ? params.grid_dims : AccelGrid::default_dims(w, h);
  GeneratedVdi out{Vdi(w, h, params.n_sg, camera, volume.world_bounds()), AccelGrid(dims, camera),
                   GenStats{}};
  out.stats.pass_histogram.assign(24, 0);
  std::mutex stats_mutex;

  tbb::parallel_for(tbb::blocked_range<int>(0, h), [&](const tbb::blocked_range<int>& rows) {
    GenStats local;
    local.pass_histogram.assign(24, 0);
    for (int iy = rows.begin(); iy != rows.end(); ++iy) {
      const int cy = h - 1 - iy;
      for (int ix = 0; ix < w; ++ix) {
        ++local.rays;
        const auto ray = ctx.pixel_ray(ix, iy);
        if (!ray) {
          ++local.pass_histogram[0];
          continue;
        }
        ++local.rays_hit;
        GammaResult g = find_gamma(*ray, ctx, params);
        if (static_cast<int>(g.segments.size()) > params.n_sg) {
          throw Error(ErrorCode::kInvariantViolation, "list exceeds n_sg");
        }
        local.total_passes += g.passes;
        local.max_passes = std::max(local.max_passes, g.passes);
        ++local.pass_histogram[static_cast<std::size_t>(std::min(g.passes, 23))];
        local.supersegments += static_cast<std::int64_t>(g.segments.size());
        if (!g.fit) ++local.smeared_rays;
        const std::size_t list = out.vdi.list_index(ix, cy);
        out.vdi.set_list(list, g.segments);
        for (const Supersegment& s : g.segments) {
          out.grid.add_footprint(ix, cy, w, h, s.front, s.back);
        }
      }
    }
    std::lock_guard lock(stats_mutex);
    GenStats& s = out.stats;
    s.rays += local.rays;
    s.rays_hit += local.rays_hit;
    s.total_passes += local.total_passes;
    s.max_passes = std::max(s.max_passes, local.max_passes);
    s.supersegments += local.supersegments;
    s.smeared_rays += local.smeared_rays;
    for (std::size_t i = 0; i < s.pass_histogram.size(); ++i) {
      s.pass_histogram[i] += local.pass_histogram[i];
    }
  });
  out.stats.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t_start).count();
  return out;
}

}  // namespace vdi
