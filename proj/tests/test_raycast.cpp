// Copyright 2026 The VDI Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <set>

#include "support.hpp"
#include "vdi/error.hpp"
#include "vdi/generate.hpp"
#include "vdi/raycast.hpp"

using namespace vdi;
using namespace vdi::test;

namespace {

std::vector<DepthPair> pairs(std::initializer_list<std::pair<float, float>> l) {
  std::vector<DepthPair> out;
  for (auto [f, b] : l) out.push_back({f, b});
  return out;
}

NdcChord chord_2d(double x0, double y0, double x1, double y1, double z0 = -0.5, double z1 = 0.5) {
  NdcChord c;
  c.a0 = Vec3(x0, y0, z0);
  c.a1 = Vec3(x1, y1, z1);
  return c;
}

struct Fixture {
  Volume vol;
  TransferFunction tf;
  GeneratedVdi gen;
};

Fixture make_fixture(Preset preset, int n, int w, int h, int n_sg = 10) {
  Volume vol = make_synthetic(preset, n);
  TransferFunction tf = default_transfer_function(preset);
  GenParams p;
  p.n_sg = n_sg;
  auto gen = generate_vdi(vol, tf, default_camera(vol, w, h), p);
  return {std::move(vol), std::move(tf), std::move(gen)};
}

}  // namespace

TEST_CASE("project_ray_to_ndc") {
  const Camera cam = front_camera(16, 16);
  const NdcTransform xf(cam);
  const Aabb box{Vec3::Constant(-0.5), Vec3::Constant(0.5)};

  SUBCASE("a generation ray projects to a single NDC column") {
    const Ray r = generate_ray(cam, 5, 9);
    const auto c = project_ray_to_ndc(r, xf, box);
    REQUIRE(c.has_value());
    CHECK(c->a0.x() == doctest::Approx(c->a1.x()).epsilon(1e-9));
    CHECK(c->a0.y() == doctest::Approx(c->a1.y()).epsilon(1e-9));
    CHECK(c->a1.z() > c->a0.z());
    // chord ends sit on the box faces at z = +-0.5
    CHECK(xf.view_depth(c->a0.z()) == doctest::Approx(3.0 - 0.5).epsilon(1e-6));
    CHECK(c->world_t(0.0) == doctest::Approx(c->t0));
    CHECK(c->world_t(1.0) == doctest::Approx(c->t1));
  }
  SUBCASE("world_t inverts the perspective divide") {
    Ray r;
    r.origin = Vec3(-2.0, 0.1, 0.2);
    r.dir = Vec3(1, 0.05, -0.1).normalized();
    const auto c = project_ray_to_ndc(r, xf, box);
    REQUIRE(c.has_value());
    for (double s : {0.0, 0.2, 0.5, 0.9, 1.0}) {
      const Vec3 ndc = xf.to_ndc(r.at(c->world_t(s)));
      CHECK((ndc - c->at(s)).norm() < 1e-6);
    }
  }
  SUBCASE("a ray missing the box has no chord") {
    Ray r;
    r.origin = Vec3(2, 2, 2);
    r.dir = Vec3(1, 0, 0);
    CHECK_FALSE(project_ray_to_ndc(r, xf, box).has_value());
  }
}

TEST_CASE("DDA traversal") {
  SUBCASE("a single column") {
    const auto v = dda_traverse(chord_2d(0.1, 0.1, 0.1, 0.1), 8, 8);
    REQUIRE(v.size() == 1);
    CHECK(v[0].cx == 4);
    CHECK(v[0].cy == 4);
    CHECK(v[0].s_in == 0.0);
    CHECK(v[0].s_out == 1.0);
    CHECK(v[0].d_entry == doctest::Approx(-0.5));
    CHECK(v[0].d_exit == doctest::Approx(0.5));
  }
  SUBCASE("a corner crossing steps x before y") {
    // from the center of cell (0,0) to the center of cell (1,1) of a 2x2 grid
    const auto v = dda_traverse(chord_2d(-0.5, -0.5, 0.5, 0.5), 2, 2);
    REQUIRE(v.size() == 3);
    CHECK((v[0].cx == 0 && v[0].cy == 0));
    CHECK((v[1].cx == 1 && v[1].cy == 0));
    CHECK((v[2].cx == 1 && v[2].cy == 1));
    CHECK(v[1].s_in == v[1].s_out);  // zero-length visit at the corner
  }
  SUBCASE("property: visits are contiguous and cover every sampled point") {
    Rng rng(3);
    for (int trial = 0; trial < 300; ++trial) {
      const int w = 1 + rng.below(40), h = 1 + rng.below(40);
      const NdcChord c = chord_2d(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1),
                                  rng.uniform(-1, 1));
      const auto v = dda_traverse(c, w, h);
      REQUIRE(!v.empty());
      CHECK(v.front().s_in == 0.0);
      CHECK(v.back().s_out == 1.0);
      for (std::size_t i = 1; i < v.size(); ++i) {
        CHECK(v[i].s_in == v[i - 1].s_out);
        CHECK(std::abs(v[i].cx - v[i - 1].cx) + std::abs(v[i].cy - v[i - 1].cy) == 1);
      }
      for (int k = 0; k <= 200; ++k) {
        const double s = k / 200.0;
        const Vec3 p = c.at(s);
        const int cx = std::clamp(int(std::floor((p.x() + 1) * 0.5 * w)), 0, w - 1);
        const int cy = std::clamp(int(std::floor((p.y() + 1) * 0.5 * h)), 0, h - 1);
        bool covered = false;
        for (const auto& cv : v) {
          if (cv.cx == cx && cv.cy == cy && cv.s_in - 1e-9 <= s && s <= cv.s_out + 1e-9) {
            covered = true;
          }
        }
        // points within rounding of a cell boundary may be attributed to the neighbor
        const double fx = (p.x() + 1) * 0.5 * w, fy = (p.y() + 1) * 0.5 * h;
        const bool near_edge = std::abs(fx - std::round(fx)) < 1e-7 ||
                               std::abs(fy - std::round(fy)) < 1e-7;
        CHECK((covered || near_edge));
      }
    }
  }
  SUBCASE("restart resumes the walk at the given position") {
    const NdcChord c = chord_2d(-0.9, -0.7, 0.8, 0.6);
    const auto all = dda_traverse(c, 10, 10);
    DdaWalker w(c, 10, 10);
    w.restart(all[4].s_in + 1e-6);
    CHECK(w.current().cx == all[4].cx);
    CHECK(w.current().cy == all[4].cy);
    w.restart(1.0);
    CHECK(w.done());
  }
}

TEST_CASE("find_first_supersegment examples") {
  const auto l = pairs({{-0.5f, -0.3f}, {-0.1f, 0.2f}, {0.4f, 0.6f}});
  for (int p = -1; p <= 3; ++p) {
    CAPTURE(p);
    auto r = find_first_supersegment(l, 0.25f, 0.35f, p);  // gap between entries
    CHECK_FALSE(r.found());
    CHECK(r.insertion == 2);
    r = find_first_supersegment(l, 0.1f, 0.45f, p);
    CHECK(r.index == 1);
    r = find_first_supersegment(l, -1.f, -0.9f, p);  // before everything
    CHECK_FALSE(r.found());
    CHECK(r.insertion == 0);
    r = find_first_supersegment(l, 0.7f, 0.9f, p);  // past everything
    CHECK_FALSE(r.found());
    CHECK(r.insertion == 3);
    r = find_first_supersegment(l, 0.2f, 0.3f, p);  // touching a back boundary
    CHECK(r.index == 1);
    r = find_first_supersegment(l, 0.3f, 0.4f, p);  // touching a front boundary
    CHECK(r.index == 2);
    r = find_first_supersegment(l, -0.6f, 0.5f, p);  // spanning several
    CHECK(r.index == 0);
  }
  CHECK_FALSE(find_first_supersegment(std::span<const DepthPair>{}, -1.f, 1.f, -1).found());
}

TEST_CASE("property: seeded search agrees with a linear scan") {
  Rng rng(99);
  for (int trial = 0; trial < 20000; ++trial) {
    const auto segs = random_list(rng, rng.below(14), rng.coin(0.5));
    std::vector<DepthPair> l;
    for (const auto& s : segs) l.push_back({s.front, s.back});
    const int n = static_cast<int>(l.size());
    float a = static_cast<float>(rng.uniform(-1.1, 1.1));
    float b = static_cast<float>(rng.uniform(-1.1, 1.1));
    // adversarial queries on stored boundaries
    if (n > 0 && rng.coin(0.3)) a = rng.coin() ? l[rng.below(n)].back : l[rng.below(n)].front;
    if (n > 0 && rng.coin(0.3)) b = rng.coin() ? l[rng.below(n)].front : l[rng.below(n)].back;
    if (a > b) std::swap(a, b);
    const int p = rng.below(n + 2) - 1;
    const int want = find_first_linear(l, a, b);
    CAPTURE(trial);
    CHECK(find_first_supersegment(l, a, b, p).index == want);

    // mirrored view against the explicitly mirrored list
    std::vector<DepthPair> m;
    for (int k = n - 1; k >= 0; --k) m.push_back({-l[k].back, -l[k].front});
    const ListView mv{l, true};
    const SearchResult r = find_first_supersegment(mv, a, b, p);
    CHECK(r.index == find_first_linear(m, a, b));
    if (r.found()) CHECK(mv.source_index(r.index) == n - 1 - r.index);
  }
}

TEST_CASE("opacity_correct") {
  CHECK(opacity_correct(0.3, 1.0) == doctest::Approx(0.3));
  CHECK(opacity_correct(0.3, 0.0) == 0.0);
  CHECK(opacity_correct(0.0, 2.0) == 0.0);
  CHECK(opacity_correct(1.0, 0.25) == 1.0);
  CHECK(opacity_correct(0.5, 2.0) == doctest::Approx(0.75));
  Rng rng(4);
  for (int i = 0; i < 1000; ++i) {
    const double a = rng.uniform(0.0, 0.999), l1 = rng.uniform(0, 3), l2 = rng.uniform(0, 3);
    const double split = 1.0 - (1.0 - opacity_correct(a, l1)) * (1.0 - opacity_correct(a, l2));
    CHECK(split == doctest::Approx(opacity_correct(a, l1 + l2)).epsilon(1e-9));
  }
}

TEST_CASE("identity view reproduces per-list compositing") {
  for (Preset preset : {Preset::kSphere, Preset::kEngineoid}) {
    const Fixture f = make_fixture(preset, 48, 40, 32);
    const Vdi& vdi = f.gen.vdi;
    RenderOptions opts;
    opts.background = {0.1f, 0.2f, 0.3f, 1.f};
    const Image img = render_vdi(vdi, f.gen.grid, vdi.gen_camera(), opts);
    double worst = 0.0;
    for (int iy = 0; iy < vdi.height(); ++iy)
      for (int ix = 0; ix < vdi.width(); ++ix) {
        const Rgba want = over_background(
            composite_list(vdi, vdi.list_index(ix, vdi.height() - 1 - iy), opts.early_term_alpha),
            opts.background);
        const Rgba got = img.at(ix, iy);
        worst = std::max({worst, double(std::abs(got.r - want.r)), double(std::abs(got.g - want.g)),
                          double(std::abs(got.b - want.b)), double(std::abs(got.a - want.a))});
      }
    CHECK(worst <= 1e-5);
  }
}

TEST_CASE("empty-space skipping does not change the image") {
  const Fixture f = make_fixture(Preset::kEngineoid, 48, 48, 48);
  const Vdi& vdi = f.gen.vdi;
  RenderOptions on, off;
  off.use_ess = false;
  for (double deg : {0.0, 7.0, 25.0, 60.0}) {
    const Camera cam = orbit(vdi.gen_camera(), Vec3::Zero(), deg_to_rad(deg));
    RenderStats s_on, s_off;
    const Image a = render_vdi(vdi, f.gen.grid, cam, on, &s_on);
    const Image b = render_vdi(vdi, f.gen.grid, cam, off, &s_off);
    CAPTURE(deg);
    CHECK(max_abs_diff(a, b) <= 1e-6);
    CHECK(s_off.ess_jumps == 0);
    CHECK(s_on.lists_visited <= s_off.lists_visited);
    CHECK(s_on.supersegments_intersected == s_off.supersegments_intersected);
  }
}

TEST_CASE("an empty VDI renders the background") {
  const Camera cam = front_camera(16, 12);
  const Vdi vdi(16, 12, 4, cam, Aabb{Vec3::Constant(-0.5), Vec3::Constant(0.5)});
  const AccelGrid grid = grid_for(vdi);
  RenderOptions opts;
  opts.background = {0.25f, 0.5f, 0.75f, 1.f};
  RenderStats stats;
  const Image img = render_vdi(vdi, grid, orbit(cam, Vec3::Zero(), 0.3), opts, &stats);
  for (const Rgba& p : img.pixels) CHECK(p == opts.background);
  CHECK(stats.pixels == 16 * 12);
  CHECK(stats.supersegments_intersected == 0);
}

TEST_CASE("early termination bounds the error by the remaining transmittance") {
  const Fixture f = make_fixture(Preset::kBands, 48, 32, 32);
  const VdiRenderer r(f.gen.vdi, f.gen.grid);
  const Camera cam = orbit(f.gen.vdi.gen_camera(), Vec3::Zero(), deg_to_rad(15));
  const NdcTransform xf(cam);
  RenderOptions full, early;
  full.early_term_alpha = 1.0;
  early.early_term_alpha = 0.8;
  RenderStats sf, se;
  for (int iy = 0; iy < 32; ++iy)
    for (int ix = 0; ix < 32; ++ix) {
      const Ray ray = generate_ray(xf, ix, iy);
      const Rgba a = r.trace(ray, full, sf);
      const Rgba b = r.trace(ray, early, se);
      const double bound = 1.0 - b.a + 1e-6;
      CHECK(std::abs(a.r - b.r) <= bound);
      CHECK(std::abs(a.a - b.a) <= bound);
      if (b.a < 0.8f) CHECK(a == b);
    }
  CHECK(se.supersegments_intersected <= sf.supersegments_intersected);
}

TEST_CASE("render options validation and counters") {
  RenderOptions o;
  o.early_term_alpha = 0.0;
  CHECK_THROWS_AS(o.validate(), Error);
  o.early_term_alpha = 1.5;
  CHECK_THROWS_AS(o.validate(), Error);

  const Fixture f = make_fixture(Preset::kSphere, 32, 24, 24);
  RenderStats s;
  render_vdi(f.gen.vdi, f.gen.grid, f.gen.vdi.gen_camera(), RenderOptions{}, &s);
  CHECK(s.pixels == 24 * 24);
  CHECK(s.rays_hit <= s.pixels);
  CHECK(s.rays_hit > 0);
  CHECK(s.supersegments_intersected > 0);
  CHECK(s.ms >= 0.0);
}
