// Copyright 2026 The VDI Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "support.hpp"
#include "vdi/camera.hpp"
#include "vdi/error.hpp"

using namespace vdi;
using namespace vdi::test;

namespace {

Camera random_camera(Rng& rng, int w = 64, int h = 48) {
  Camera c;
  c.position = rng.vec3(-5, 5);
  c.orientation = rng.quat();
  c.fov_y = deg_to_rad(rng.uniform(20, 90));
  c.near_plane = rng.uniform(0.05, 0.5);
  c.far_plane = c.near_plane + rng.uniform(2, 50);
  c.width = w;
  c.height = h;
  return c;
}

// A point strictly inside the frustum, given by NDC-ish fractions and depth.
Vec3 frustum_point(const Camera& c, Rng& rng) {
  const double depth = rng.uniform(c.near_plane, c.far_plane);
  const double ty = std::tan(c.fov_y / 2);
  const double x = rng.uniform(-0.99, 0.99) * ty * c.aspect() * depth;
  const double y = rng.uniform(-0.99, 0.99) * ty * depth;
  return c.position + c.orientation * Vec3(x, y, -depth);
}

}  // namespace

TEST_CASE("near and far plane centers map to NDC z -1 and +1") {
  const Camera c = front_camera(64, 64, 3.0, 10.0);
  const Vec3 n = world_to_ndc(c, Vec3(0, 0, 3.0 - 0.1));
  const Vec3 f = world_to_ndc(c, Vec3(0, 0, 3.0 - 10.0));
  CHECK(n.x() == doctest::Approx(0.0));
  CHECK(n.y() == doctest::Approx(0.0));
  CHECK(n.z() == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(f.z() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("points on the eye plane are degenerate") {
  const Camera c = front_camera(64, 64);
  try {
    world_to_ndc(c, Vec3(1.0, 0.5, 3.0));
    FAIL("expected DegenerateW");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDegenerateW);
  }
}

TEST_CASE("world to NDC round trip inside the frustum") {
  Rng rng(1234);
  int checked = 0;
  for (int i = 0; i < 100; ++i) {
    const Camera c = random_camera(rng);
    for (int j = 0; j < 100; ++j) {
      const Vec3 p = frustum_point(c, rng);
      const Vec3 q = ndc_to_world(c, world_to_ndc(c, p));
      const double scale = std::max(1.0, (p - c.position).norm());
      CHECK((q - p).norm() / scale < 1e-5);
      ++checked;
    }
  }
  CHECK(checked == 10000);
}

TEST_CASE("view matrix is rigid") {
  Rng rng(5);
  for (int i = 0; i < 50; ++i) {
    const Camera c = random_camera(rng);
    const Eigen::Matrix3d r = c.view_matrix().topLeftCorner<3, 3>();
    CHECK((r * r.transpose() - Eigen::Matrix3d::Identity()).norm() < 1e-12);
    CHECK(r.determinant() == doctest::Approx(1.0));
  }
}

TEST_CASE("NDC z increases with view depth along frustum rays") {
  Rng rng(77);
  for (int i = 0; i < 200; ++i) {
    const Camera c = random_camera(rng);
    const int ix = rng.below(c.width), iy = rng.below(c.height);
    const Ray r = generate_ray(c, ix, iy);
    double prev = -2.0;
    for (int k = 0; k <= 50; ++k) {
      const double t = r.t_near + (r.t_far - r.t_near) * k / 50.0;
      const double z = world_to_ndc(c, r.at(t)).z();
      CHECK(z > prev);
      prev = z;
    }
  }
}

TEST_CASE("center pixel of an odd viewport looks down the view axis") {
  Camera c = front_camera(63, 31);
  c.orientation = Quat(Eigen::AngleAxisd(0.4, Vec3(1, 2, 3).normalized()));
  const Ray r = generate_ray(c, 31, 15);
  CHECK((r.dir - c.forward()).norm() < 1e-12);
  CHECK(r.dir.norm() == doctest::Approx(1.0));
}

TEST_CASE("corner rays are symmetric about the view axis") {
  const Camera c = front_camera(40, 30);
  const Ray tl = generate_ray(c, 0, 0);
  const Ray br = generate_ray(c, 39, 29);
  const Ray tr = generate_ray(c, 39, 0);
  const Ray bl = generate_ray(c, 0, 29);
  CHECK(tl.dir.x() == doctest::Approx(-br.dir.x()));
  CHECK(tl.dir.y() == doctest::Approx(-br.dir.y()));
  CHECK(tr.dir.x() == doctest::Approx(-bl.dir.x()));
  CHECK(tl.dir.z() == doctest::Approx(br.dir.z()));
  CHECK(tl.dir.y() > 0);  // rows run top to bottom
}

TEST_CASE("pixel rays stay inside their pixel's NDC footprint") {
  Rng rng(8);
  const Camera c = random_camera(rng, 8, 8);
  const NdcTransform xf(c);
  for (int iy = 0; iy < 8; ++iy) {
    for (int ix = 0; ix < 8; ++ix) {
      const Ray r = generate_ray(c, ix, iy);
      const double x0 = -1 + 2.0 * ix / 8, x1 = x0 + 2.0 / 8;
      const double y1 = 1 - 2.0 * iy / 8, y0 = y1 - 2.0 / 8;
      for (int k = 0; k <= 20; ++k) {
        const double t = r.t_near + (r.t_far - r.t_near) * k / 20.0;
        const Vec3 n = xf.to_ndc(r.at(t));
        CHECK(n.x() > x0);
        CHECK(n.x() < x1);
        CHECK(n.y() > y0);
        CHECK(n.y() < y1);
      }
    }
  }
}

TEST_CASE("clip_ray hand geometry") {
  const Aabb box{Vec3(0, 0, 0), Vec3(1, 1, 1)};
  Ray r;
  r.origin = Vec3(-1, 0.5, 0.5);
  r.dir = Vec3(1, 0, 0);
  const auto hit = clip_ray(r, box);
  REQUIRE(hit);
  CHECK(hit->lo == doctest::Approx(1.0));
  CHECK(hit->hi == doctest::Approx(2.0));

  Ray p;
  p.origin = Vec3(-1, 2.0, 0.5);
  p.dir = Vec3(1, 0, 0);
  CHECK_FALSE(clip_ray(p, box));
}

TEST_CASE("clip_ray agrees with dense occupancy sampling") {
  Rng rng(99);
  int agree = 0;
  for (int i = 0; i < 1000; ++i) {
    const Vec3 a = rng.vec3(-1, 1), b = rng.vec3(-1, 1);
    const Aabb box{a.cwiseMin(b), a.cwiseMax(b)};
    Ray r;
    r.origin = rng.vec3(-3, 3);
    r.dir = rng.vec3(-1, 1).normalized();
    r.t_near = 0.0;
    r.t_far = 8.0;
    const auto hit = clip_ray(r, box);
    bool sampled = false;
    double lo = 1e9, hi = -1e9;
    for (double t = 0.0; t <= 8.0; t += 1e-3) {
      if (box.contains(r.at(t))) {
        sampled = true;
        lo = std::min(lo, t);
        hi = std::max(hi, t);
      }
    }
    if (sampled) {
      // Sampling can only miss a sliver thinner than the step.
      if (hit && std::abs(hit->lo - lo) <= 1.1e-3 && std::abs(hit->hi - hi) <= 1.1e-3) ++agree;
    } else if (!hit || hit->length() < 1e-3) {
      ++agree;
    }
  }
  CHECK(agree == 1000);
}

TEST_CASE("camera json and path round trip") {
  const auto dir = scratch_dir("cam_json");
  Rng rng(4);
  std::vector<Camera> path;
  for (int i = 0; i < 5; ++i) path.push_back(random_camera(rng));
  save_camera(dir / "c.json", path[0]);
  CHECK(load_camera(dir / "c.json") == path[0]);
  save_camera_path(dir / "p.json", path);
  const auto back = load_camera_path(dir / "p.json");
  REQUIRE(back.size() == path.size());
  for (std::size_t i = 0; i < path.size(); ++i) CHECK(back[i] == path[i]);
}

TEST_CASE("orbit keeps the camera facing the center") {
  const Camera c = Camera::look_at(Vec3(1, 0.5, 2), Vec3::Zero(), Vec3::UnitY(), 0.7, 0.1, 20, 32, 32);
  for (double deg : {5.0, 10.0, 20.0, 40.0, 90.0}) {
    const Camera o = orbit(c, Vec3::Zero(), deg_to_rad(deg));
    CHECK(rad_to_deg(view_deviation(c, o)) == doctest::Approx(deg).epsilon(1e-6));
    const Vec3 to_center = (-o.position).normalized();
    CHECK((to_center - o.forward()).norm() < 1e-9);
  }
}
