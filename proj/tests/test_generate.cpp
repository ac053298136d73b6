// Copyright 2026 The VDI Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "vdi/dvr.hpp"
#include "vdi/error.hpp"
#include "vdi/generate.hpp"

using namespace vdi;
using namespace vdi::test;

namespace {

GenRay center_ray(const GenContext& ctx, double x = 0.0, double y = 0.0) {
  Ray r;
  r.origin = Vec3(x, y, 3.0);
  r.dir = Vec3(0, 0, -1);
  const auto g = ctx.clip(r);
  REQUIRE(g.has_value());
  return *g;
}

Rgba composite(const std::vector<Supersegment>& segs) {
  double c[3] = {0, 0, 0}, a = 0;
  for (const auto& s : segs) {
    const double w = 1.0 - a;
    c[0] += w * s.color.r;
    c[1] += w * s.color.g;
    c[2] += w * s.color.b;
    a += w * s.color.a;
  }
  return {float(c[0]), float(c[1]), float(c[2]), float(a)};
}

double linf(const Rgba& x, const Rgba& y) {
  return std::max({std::abs(x.r - y.r), std::abs(x.g - y.g), std::abs(x.b - y.b),
                   std::abs(x.a - y.a)});
}

}  // namespace

TEST_CASE("terminate_check examples") {
  const std::array<float, 3> seg{0.2f, 0.4f, 0.6f};
  // sample color equal to the segment color
  CHECK_FALSE(terminate_check(seg, Rgba{0.2f, 0.4f, 0.6f, 1.f}, 1.0, 1e-5));
  // no distance in the unit cube reaches sqrt(3) + eps
  CHECK_FALSE(terminate_check({0.f, 0.f, 0.f}, Rgba{1.f, 1.f, 1.f, 1.f}, 1.0, kMaxGamma + 1e-6));
  CHECK(terminate_check({1.f, 0.f, 0.f}, Rgba{0.f, 1.f, 0.f, 1.f}, 1.0, 1.0));
  // alpha' scales the sample color
  CHECK_FALSE(terminate_check({0.f, 0.f, 0.f}, Rgba{1.f, 0.f, 0.f, 1.f}, 0.5, 0.6));
  CHECK(terminate_check({0.f, 0.f, 0.f}, Rgba{1.f, 0.f, 0.f, 1.f}, 0.5, 0.5));
}

TEST_CASE("GenParams defaults and validation") {
  GenParams p;
  CHECK(p.resolved_delta() == 1);  // floor(0.15 * 12)
  p.n_sg = 20;
  CHECK(p.resolved_delta() == 3);
  p.n_sg = 1;
  CHECK(p.resolved_delta() == 0);
  CHECK_NOTHROW(p.validate());
  p.n_sg = 0;
  CHECK_THROWS_AS(p.validate(), Error);
}

TEST_CASE("generate_list on an empty volume gives no supersegments") {
  const Volume vol = constant_volume(16, 0);
  const TransferFunction tf = step_tf({0, 0, 0, 0}, {1, 1, 1, 0.5f});
  const GenContext ctx(vol, tf, front_camera(8, 8), 0.5 * vol.min_spacing());
  const GenRay ray = center_ray(ctx);
  const auto r = generate_list(ray, ctx, 1e-5, 12, 0.999, BudgetMode::kUnbounded);
  CHECK(r.count == 0);
  CHECK(r.segments.empty());

  GenParams p;
  const auto g = find_gamma(ray, ctx, p);
  CHECK(g.passes == 1);
  CHECK(g.count == 0);
}

TEST_CASE("homogeneous slab yields one supersegment spanning the slab") {
  const Volume vol = constant_volume(32, 200);
  const TransferFunction tf = flat_tf({1.f, 0.5f, 0.25f, 0.02f});
  const GenContext ctx(vol, tf, front_camera(8, 8), 0.5 * vol.min_spacing());
  const GenRay ray = center_ray(ctx);
  const auto r = generate_list(ray, ctx, 1e-5, 12, 0.999, BudgetMode::kUnbounded);
  REQUIRE(r.count == 1);
  REQUIRE(r.segments.size() == 1);
  CHECK(r.segments[0].front == doctest::Approx(ctx.ndc_z(ray, ray.t0)).epsilon(1e-6));
  CHECK(r.segments[0].back == doctest::Approx(ctx.ndc_z(ray, ray.t1)).epsilon(1e-6));

  GenParams p;
  p.n_sg = 20;
  const auto g = find_gamma(ray, ctx, p);
  CHECK(g.passes == 1);
  CHECK(g.gamma == p.gamma_init);
  CHECK(g.count == 1);
}

TEST_CASE("two-material slab splits at the interface") {
  const int n = 32;
  // z index >= 16 (the half nearer a camera on +z) holds 0.25, the rest 0.75
  const Volume vol = volume_from(n, [](int, int, int z) -> std::uint16_t {
    return z >= 16 ? 64 : 191;
  });
  const TransferFunction tf = step_tf({1.f, 0.f, 0.f, 0.05f}, {0.f, 0.f, 1.f, 0.05f});
  const double step = 0.5 * vol.min_spacing();
  const GenContext ctx(vol, tf, front_camera(8, 8), step);
  const GenRay ray = center_ray(ctx);
  // a sample landing on the interface classifies to the ramp midpoint and
  // forms its own thin segment at tiny gamma
  CHECK(generate_list(ray, ctx, 1e-3, 12, 0.999, BudgetMode::kUnbounded).count == 3);
  const auto r = generate_list(ray, ctx, 0.05, 12, 0.999, BudgetMode::kUnbounded);
  REQUIRE(r.count == 2);
  // the voxel-center interface sits halfway between z index 15 and 16
  const double z_world = vol.world_bounds().min.z() + 15.5 * vol.spacing().z();
  const auto& tr = ctx.transform();
  const double boundary = tr.ndc_z(3.0 - z_world);
  const double tol = std::abs(tr.ndc_z(3.0 - z_world + step) - boundary) * 1.01;
  CHECK(std::abs(r.segments[0].back - boundary) <= tol);
  CHECK(std::abs(r.segments[1].front - boundary) <= tol);
  CHECK(r.segments[0].color.r > r.segments[0].color.b);
  CHECK(r.segments[1].color.b > r.segments[1].color.r);
}

TEST_CASE("transparent gaps close a supersegment") {
  const int n = 32;
  const Volume vol = volume_from(n, [](int, int, int z) -> std::uint16_t {
    return (z / 8) % 2 == 0 ? 255 : 0;
  });
  const TransferFunction tf = step_tf({0, 0, 0, 0}, {0.5f, 0.5f, 0.5f, 0.05f});
  const GenContext ctx(vol, tf, front_camera(8, 8), 0.5 * vol.min_spacing());
  const auto r = generate_list(center_ray(ctx), ctx, kMaxGamma, 12, 0.999, BudgetMode::kUnbounded);
  CHECK(r.count == 2);
}

TEST_CASE("find_gamma lands in the budget window on a banded volume") {
  const Volume vol = make_synthetic(Preset::kBands, 64);
  const TransferFunction tf = default_transfer_function(Preset::kBands);
  const GenContext ctx(vol, tf, front_camera(8, 8), 0.5 * vol.min_spacing());
  const GenRay ray = center_ray(ctx);
  GenParams p;
  p.n_sg = 20;
  p.delta = 3;
  const auto unbounded = generate_list(ray, ctx, p.gamma_init, 1000, 0.999, BudgetMode::kUnbounded);
  CHECK(unbounded.count > 20);
  const auto g = find_gamma(ray, ctx, p);
  CHECK(g.fit);
  CHECK(g.count >= 17);
  CHECK(g.count <= 20);
  CHECK(g.passes <= 22);
  CHECK(static_cast<int>(g.segments.size()) == g.count);
}

TEST_CASE("budget modes") {
  const Volume vol = make_synthetic(Preset::kBands, 64);
  const TransferFunction tf = default_transfer_function(Preset::kBands);
  const GenContext ctx(vol, tf, front_camera(8, 8), 0.5 * vol.min_spacing());
  const GenRay ray = center_ray(ctx);
  const auto full = generate_list(ray, ctx, 1e-5, 4, 0.999, BudgetMode::kUnbounded);
  REQUIRE(full.count > 4);
  const auto abort = generate_list(ray, ctx, 1e-5, 4, 0.999, BudgetMode::kAbort);
  CHECK(abort.exceeded);
  CHECK(abort.segments.size() == 4);
  const auto smear = generate_list(ray, ctx, 1e-5, 4, 0.999, BudgetMode::kSmear);
  CHECK(smear.exceeded);
  CHECK(smear.count == full.count);
  CHECK(smear.segments.size() == 4);
  for (int k = 0; k < 3; ++k) CHECK(smear.segments[k] == full.segments[k]);
  CHECK(smear.segments[3].back == full.segments.back().back);
  // smearing keeps the composite
  CHECK(linf(composite(smear.segments), composite(full.segments)) < 1e-5);
}

TEST_CASE("property: supersegment count is non-increasing in gamma") {
  Rng rng(7);
  for (Preset preset : {Preset::kBands, Preset::kEngineoid}) {
    const Volume vol = make_synthetic(preset, 48);
    const TransferFunction tf = default_transfer_function(preset);
    const Camera cam = default_camera(vol, 32, 32);
    const GenContext ctx(vol, tf, cam, 0.5 * vol.min_spacing());
    std::vector<double> ladder;
    for (int i = 0; i < 16; ++i) ladder.push_back(1e-5 * std::pow(kMaxGamma / 1e-5, i / 15.0));
    int checked = 0;
    for (int trial = 0; trial < 60; ++trial) {
      const auto ray = ctx.pixel_ray(rng.below(32), rng.below(32));
      if (!ray) continue;
      int prev = std::numeric_limits<int>::max();
      for (double g : ladder) {
        const int c = generate_list(*ray, ctx, g, 1, 0.999, BudgetMode::kUnbounded).count;
        CHECK(c <= prev);
        prev = c;
      }
      ++checked;
    }
    CHECK(checked > 20);
  }
}

TEST_CASE("property: compositing a ray's supersegments reproduces DVR") {
  Rng rng(11);
  for (Preset preset : {Preset::kSphere, Preset::kBands, Preset::kEngineoid}) {
    const Volume vol = make_synthetic(preset, 48);
    const TransferFunction tf = default_transfer_function(preset);
    const Camera cam = default_camera(vol, 32, 32);
    const GenContext ctx(vol, tf, cam, 0.5 * vol.min_spacing());
    GenParams p;
    p.n_sg = 8;
    for (int trial = 0; trial < 80; ++trial) {
      const auto ray = ctx.pixel_ray(rng.below(32), rng.below(32));
      if (!ray) continue;
      const auto g = find_gamma(*ray, ctx, p);
      CHECK(linf(composite(g.segments), dvr_ray(*ray, ctx, p.alpha_early)) < 1e-5);
    }
  }
}

TEST_CASE("generate_vdi: empty volume") {
  const Volume vol = constant_volume(16, 0);
  const TransferFunction tf = step_tf({0, 0, 0, 0}, {1, 1, 1, 1});
  const auto out = generate_vdi(vol, tf, front_camera(24, 16), GenParams{});
  CHECK(out.vdi.total_supersegments() == 0);
  for (auto c : out.grid.counts()) CHECK(c == 0);
  CHECK(out.stats.rays == 24 * 16);
  CHECK(out.stats.max_passes == 1);
}

TEST_CASE("generate_vdi: sphere footprint matches the analytic silhouette") {
  const int n = 48;
  const Volume vol = make_synthetic(Preset::kSphere, n);
  const TransferFunction tf = default_transfer_function(Preset::kSphere);
  const int w = 48, h = 48;
  const Camera cam = front_camera(w, h, 2.5);
  const auto out = generate_vdi(vol, tf, cam, GenParams{});
  const double radius = 0.35 * n / (n - 1);
  auto analytic = [&](int ix, int iy) {
    const Ray r = generate_ray(cam, ix, iy);
    const Vec3 d = r.dir.normalized();
    const Vec3 oc = r.origin;
    const double b = oc.dot(d);
    return oc.squaredNorm() - b * b <= radius * radius;
  };
  int mismatched = 0, hits = 0;
  for (int iy = 0; iy < h; ++iy)
    for (int ix = 0; ix < w; ++ix) {
      const bool got = out.vdi.count(out.vdi.list_index(ix, h - 1 - iy)) > 0;
      const bool want = analytic(ix, iy);
      hits += want;
      if (got == want) continue;
      // allow a one-pixel band around the silhouette
      bool edge = false;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          const int x = ix + dx, y = iy + dy;
          if (x >= 0 && y >= 0 && x < w && y < h && analytic(x, y) != want) edge = true;
        }
      if (!edge) ++mismatched;
    }
  CHECK(hits > 100);
  CHECK(mismatched == 0);
}

TEST_CASE("generate_vdi: budget, pass bound and grid consistency") {
  const Volume vol = make_synthetic(Preset::kBands, 48);
  const TransferFunction tf = default_transfer_function(Preset::kBands);
  const Camera cam = default_camera(vol, 40, 30);
  GenParams p;
  p.n_sg = 10;
  const auto out = generate_vdi(vol, tf, cam, p);
  CHECK_NOTHROW(out.vdi.validate());
  for (std::size_t l = 0; l < out.vdi.list_count(); ++l) CHECK(out.vdi.count(l) <= 10);
  CHECK(out.stats.max_passes <= 22);
  CHECK(out.stats.rays_hit > 0);
  std::int64_t hist_total = 0;
  for (auto v : out.stats.pass_histogram) hist_total += v;
  CHECK(hist_total == out.stats.rays);
  CHECK(out.stats.supersegments == static_cast<std::int64_t>(out.vdi.total_supersegments()));
  CHECK(out.grid == grid_for(out.vdi, out.grid.dims()));
}

TEST_CASE("generate_vdi is deterministic across runs") {
  const Volume vol = make_synthetic(Preset::kEngineoid, 32);
  const TransferFunction tf = default_transfer_function(Preset::kEngineoid);
  const Camera cam = default_camera(vol, 24, 24);
  const auto a = generate_vdi(vol, tf, cam, GenParams{});
  const auto b = generate_vdi(vol, tf, cam, GenParams{});
  CHECK(a.vdi == b.vdi);
  CHECK(a.grid == b.grid);
}

TEST_CASE("property: stored depths at the volume entry and exit round inward") {
  Rng rng(23);
  const Volume vol = make_synthetic(Preset::kBands, 64);
  const TransferFunction tf = default_transfer_function(Preset::kBands);
  const Camera cam = default_camera(vol, 96, 96);
  const GenContext ctx(vol, tf, cam, 0.5 * vol.min_spacing());
  const NdcTransform& xf = ctx.transform();
  GenParams p;
  int checked = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const auto ray = ctx.pixel_ray(rng.below(96), rng.below(96));
    if (!ray) continue;
    const auto g = find_gamma(*ray, ctx, p);
    if (g.segments.empty()) continue;
    const double z0 = xf.ndc_z(ray->view_depth(ray->t0));
    const double z1 = xf.ndc_z(ray->view_depth(ray->t1));
    CHECK(g.segments.front().front >= z0);
    CHECK(g.segments.back().back <= z1);
    ++checked;
  }
  CHECK(checked > 100);
}
