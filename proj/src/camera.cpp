// Copyright 2026 The VDI Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "vdi/camera.hpp"

#include <fstream>

#include "vdi/error.hpp"

namespace vdi {

namespace fs = std::filesystem;
using nlohmann::json;

Mat4 Camera::view_matrix() const {
  const Eigen::Matrix3d r = orientation.normalized().toRotationMatrix().transpose();
  Mat4 v = Mat4::Identity();
  v.topLeftCorner<3, 3>() = r;
  v.topRightCorner<3, 1>() = -r * position;
  return v;
}

Mat4 Camera::projection_matrix() const {
  const double f = 1.0 / std::tan(0.5 * fov_y);
  const double n = near_plane;
  const double fa = far_plane;
  Mat4 p = Mat4::Zero();
  p(0, 0) = f / aspect();
  p(1, 1) = f;
  p(2, 2) = -(fa + n) / (fa - n);
  p(2, 3) = -2.0 * fa * n / (fa - n);
  p(3, 2) = -1.0;
  return p;
}

Camera Camera::with_viewport(int w, int h) const {
  Camera c = *this;
  c.width = w;
  c.height = h;
  return c;
}

Camera Camera::look_at(const Vec3& eye, const Vec3& target, const Vec3& up, double fov_y,
                       double near_plane, double far_plane, int width, int height) {
  const Vec3 back = (eye - target).normalized();
  Vec3 right = up.cross(back);
  if (right.squaredNorm() < 1e-20) right = Vec3::UnitX().cross(back);
  right.normalize();
  const Vec3 true_up = back.cross(right);
  Eigen::Matrix3d r;
  r.col(0) = right;
  r.col(1) = true_up;
  r.col(2) = back;
  Camera c;
  c.position = eye;
  c.orientation = Quat(r).normalized();
  c.fov_y = fov_y;
  c.near_plane = near_plane;
  c.far_plane = far_plane;
  c.width = width;
  c.height = height;
  return c;
}

bool operator==(const Camera& a, const Camera& b) {
  return a.position == b.position && a.orientation.coeffs() == b.orientation.coeffs() &&
         a.fov_y == b.fov_y && a.near_plane == b.near_plane && a.far_plane == b.far_plane &&
         a.width == b.width && a.height == b.height;
}

NdcTransform::NdcTransform(const Camera& camera)
    : camera_(camera), near_(camera.near_plane), far_(camera.far_plane) {
  if (!(camera.near_plane > 0.0 && camera.far_plane > camera.near_plane)) {
    throw Error(ErrorCode::kInvalidArgument, "camera needs 0 < near < far");
  }
  if (camera.width <= 0 || camera.height <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "camera viewport must be positive");
  }
  view_projection_ = camera.projection_matrix() * camera.view_matrix();
  inverse_ = view_projection_.inverse();
  tan_half_y_ = std::tan(0.5 * camera.fov_y);
  tan_half_x_ = tan_half_y_ * camera.aspect();
}

Vec3 NdcTransform::to_ndc(const Vec3& world) const {
  const Vec4 c = to_clip(world);
  if (std::abs(c.w()) < 1e-12) {
    throw Error(ErrorCode::kDegenerateW, "point lies on the camera plane");
  }
  return c.head<3>() / c.w();
}

Vec3 NdcTransform::to_world(const Vec3& ndc) const {
  const Vec4 h = inverse_ * ndc.homogeneous();
  return h.head<3>() / h.w();
}

Vec3 world_to_ndc(const Camera& camera, const Vec3& world) {
  return NdcTransform(camera).to_ndc(world);
}

Vec3 ndc_to_world(const Camera& camera, const Vec3& ndc) {
  return NdcTransform(camera).to_world(ndc);
}

Vec2 pixel_center_ndc(int width, int height, int ix, int iy) {
  return {2.0 * (ix + 0.5) / width - 1.0, 1.0 - 2.0 * (iy + 0.5) / height};
}

Ray generate_ray(const NdcTransform& transform, int ix, int iy) {
  const Camera& cam = transform.camera();
  const Vec2 xy = pixel_center_ndc(cam.width, cam.height, ix, iy);
  const Vec3 on_near = transform.to_world({xy.x(), xy.y(), -1.0});
  const Vec3 on_far = transform.to_world({xy.x(), xy.y(), 1.0});
  Ray ray;
  ray.origin = on_near;
  const Vec3 d = on_far - on_near;
  ray.t_far = d.norm();
  ray.dir = d / ray.t_far;
  ray.t_near = 0.0;
  return ray;
}

Ray generate_ray(const Camera& camera, int ix, int iy) {
  return generate_ray(NdcTransform(camera), ix, iy);
}

std::optional<Interval> clip_ray(const Ray& ray, const Aabb& box) {
  double lo = ray.t_near;
  double hi = ray.t_far;
  for (int axis = 0; axis < 3; ++axis) {
    const double o = ray.origin[axis];
    const double d = ray.dir[axis];
    if (d == 0.0) {
      if (o < box.min[axis] || o > box.max[axis]) return std::nullopt;
      continue;
    }
    double t0 = (box.min[axis] - o) / d;
    double t1 = (box.max[axis] - o) / d;
    if (t0 > t1) std::swap(t0, t1);
    lo = std::max(lo, t0);
    hi = std::min(hi, t1);
    if (lo > hi) return std::nullopt;
  }
  return Interval{lo, hi};
}

std::optional<Interval> clip_ray_to_frustum(const Ray& ray, const NdcTransform& transform) {
  // clip(t) = c0 + t * c1; inside iff |x|, |y|, |z| <= w. Each bound is linear in t.
  const Vec4 c0 = transform.to_clip(ray.origin);
  const Vec4 c1 = transform.view_projection() * Vec4(ray.dir.x(), ray.dir.y(), ray.dir.z(), 0.0);
  double lo = ray.t_near;
  double hi = ray.t_far;
  for (int axis = 0; axis < 3; ++axis) {
    for (double sign : {1.0, -1.0}) {
      // w - sign * coord >= 0
      const double a = c0.w() - sign * c0[axis];
      const double b = c1.w() - sign * c1[axis];
      if (b == 0.0) {
        if (a < 0.0) return std::nullopt;
        continue;
      }
      const double t = -a / b;
      if (b > 0.0) {
        lo = std::max(lo, t);
      } else {
        hi = std::min(hi, t);
      }
      if (lo > hi) return std::nullopt;
    }
  }
  return Interval{lo, hi};
}

json camera_to_json(const Camera& c) {
  return {{"position", {c.position.x(), c.position.y(), c.position.z()}},
          {"orientation",
           {c.orientation.x(), c.orientation.y(), c.orientation.z(), c.orientation.w()}},
          {"fov_y", c.fov_y},
          {"near", c.near_plane},
          {"far", c.far_plane},
          {"viewport", {c.width, c.height}}};
}

Camera camera_from_json(const json& j) {
  Camera c;
  try {
    const auto p = j.at("position").get<std::vector<double>>();
    if (p.size() != 3) throw Error(ErrorCode::kParse, "camera position needs 3 entries");
    c.position = Vec3(p[0], p[1], p[2]);
    c.fov_y = j.value("fov_y", c.fov_y);
    c.near_plane = j.value("near", c.near_plane);
    c.far_plane = j.value("far", c.far_plane);
    if (j.contains("viewport")) {
      const auto v = j.at("viewport").get<std::vector<int>>();
      if (v.size() != 2) throw Error(ErrorCode::kParse, "viewport needs [w, h]");
      c.width = v[0];
      c.height = v[1];
    }
    if (j.contains("orientation")) {
      const auto q = j.at("orientation").get<std::vector<double>>();
      if (q.size() != 4) throw Error(ErrorCode::kParse, "orientation needs [qx, qy, qz, qw]");
      c.orientation = Quat(q[3], q[0], q[1], q[2]);
      if (!(c.orientation.norm() > 1e-12)) throw Error(ErrorCode::kParse, "orientation is zero");
      // Leave unit input untouched so files round-trip bit-exactly.
      if (std::abs(c.orientation.norm() - 1.0) > 1e-12) c.orientation.normalize();
    } else if (j.contains("target")) {
      const auto t = j.at("target").get<std::vector<double>>();
      const auto up = j.value("up", std::vector<double>{0.0, 1.0, 0.0});
      c = Camera::look_at(c.position, Vec3(t.at(0), t.at(1), t.at(2)),
                          Vec3(up.at(0), up.at(1), up.at(2)), c.fov_y, c.near_plane, c.far_plane,
                          c.width, c.height);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("camera: ") + e.what());
  }
  NdcTransform check(c);
  (void)check;
  return c;
}

namespace {

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, path.string() + ": " + e.what());
  }
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace

Camera load_camera(const fs::path& path) { return camera_from_json(read_json(path)); }

void save_camera(const fs::path& path, const Camera& camera) {
  write_json(path, camera_to_json(camera));
}

std::vector<Camera> load_camera_path(const fs::path& path) {
  const json j = read_json(path);
  const json& list = j.is_object() ? j.at("cameras") : j;
  if (!list.is_array()) throw Error(ErrorCode::kParse, "camera path must be a list");
  std::vector<Camera> out;
  for (const auto& item : list) out.push_back(camera_from_json(item));
  return out;
}

void save_camera_path(const fs::path& path, const std::vector<Camera>& cameras) {
  json list = json::array();
  for (const auto& c : cameras) list.push_back(camera_to_json(c));
  write_json(path, list);
}

Camera orbit(const Camera& camera, const Vec3& center, double angle_rad) {
  const Eigen::AngleAxisd rot(angle_rad, camera.up());
  Camera c = camera;
  c.position = center + rot * (camera.position - center);
  c.orientation = (Quat(rot) * camera.orientation).normalized();
  return c;
}

double view_deviation(const Camera& a, const Camera& b) {
  const double d = std::clamp(a.forward().dot(b.forward()), -1.0, 1.0);
  return std::acos(d);
}

}  // namespace vdi
