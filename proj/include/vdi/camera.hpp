// Copyright 2026 The VDI Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <limits>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "vdi/types.hpp"

namespace vdi {

/// Perspective pinhole camera. View space is right-handed with the camera
/// looking down -z; NDC is [-1,1]^3 with z = -1 on the near plane.
struct Camera {
  Vec3 position = Vec3::Zero();
  Quat orientation = Quat::Identity();
  double fov_y = deg_to_rad(40.0);
  double near_plane = 0.1;
  double far_plane = 100.0;
  int width = 256;
  int height = 256;

  double aspect() const { return static_cast<double>(width) / height; }
  Vec3 forward() const { return orientation * Vec3(0, 0, -1); }
  Vec3 up() const { return orientation * Vec3(0, 1, 0); }
  Vec3 right() const { return orientation * Vec3(1, 0, 0); }

  Mat4 view_matrix() const;
  Mat4 projection_matrix() const;

  /// Same pose and projection, different viewport.
  Camera with_viewport(int w, int h) const;

  static Camera look_at(const Vec3& eye, const Vec3& target, const Vec3& up, double fov_y,
                        double near_plane, double far_plane, int width, int height);

  /// The default clip range for a scene of the given diagonal: 0.1 and 10x the diagonal.
  static double default_far(double scene_diagonal) { return 10.0 * scene_diagonal; }

  friend bool operator==(const Camera& a, const Camera& b);
};

/// Cached world <-> clip transforms of one camera.
class NdcTransform {
 public:
  explicit NdcTransform(const Camera& camera);

  const Camera& camera() const { return camera_; }
  const Mat4& view_projection() const { return view_projection_; }
  const Mat4& inverse_view_projection() const { return inverse_; }

  Vec4 to_clip(const Vec3& world) const { return view_projection_ * world.homogeneous(); }
  /// Throws kDegenerateW when |w| < 1e-12.
  Vec3 to_ndc(const Vec3& world) const;
  Vec3 to_world(const Vec3& ndc) const;

  /// Positive distance in front of the camera for an NDC depth, and back.
  double view_depth(double ndc_z) const {
    return 2.0 * far_ * near_ / ((far_ + near_) - ndc_z * (far_ - near_));
  }
  double ndc_z(double view_depth) const {
    return (far_ + near_) / (far_ - near_) - 2.0 * far_ * near_ / ((far_ - near_) * view_depth);
  }

  /// Distance along the ray through an NDC (x, y) per unit of view depth.
  double ray_length_per_depth(double ndc_x, double ndc_y) const {
    const double vx = ndc_x * tan_half_x_;
    const double vy = ndc_y * tan_half_y_;
    return std::sqrt(vx * vx + vy * vy + 1.0);
  }

 private:
  Camera camera_;
  Mat4 view_projection_;
  Mat4 inverse_;
  double near_;
  double far_;
  double tan_half_x_;
  double tan_half_y_;
};

Vec3 world_to_ndc(const Camera& camera, const Vec3& world);
Vec3 ndc_to_world(const Camera& camera, const Vec3& ndc);

/// NDC (x, y) of a pixel center; pixel rows run top to bottom.
Vec2 pixel_center_ndc(int width, int height, int ix, int iy);

struct Ray {
  Vec3 origin = Vec3::Zero();
  Vec3 dir = Vec3(0, 0, -1);
  double t_near = 0.0;
  double t_far = std::numeric_limits<double>::infinity();

  Vec3 at(double t) const { return origin + t * dir; }
};

/// Ray through a pixel center, starting on the near plane and ending on the far plane.
Ray generate_ray(const Camera& camera, int ix, int iy);
Ray generate_ray(const NdcTransform& transform, int ix, int iy);

/// Slab test against an AABB, restricted to [ray.t_near, ray.t_far].
std::optional<Interval> clip_ray(const Ray& ray, const Aabb& box);

/// Restricts the ray to the inside of a camera's view frustum (clip-space test).
std::optional<Interval> clip_ray_to_frustum(const Ray& ray, const NdcTransform& transform);

nlohmann::json camera_to_json(const Camera& camera);
Camera camera_from_json(const nlohmann::json& j);
Camera load_camera(const std::filesystem::path& path);
void save_camera(const std::filesystem::path& path, const Camera& camera);

/// Camera path: an ordered list of poses (same schema as a single camera).
std::vector<Camera> load_camera_path(const std::filesystem::path& path);
void save_camera_path(const std::filesystem::path& path, const std::vector<Camera>& cameras);

/// Camera rotated about `center` around the camera's up axis, still facing the center.
Camera orbit(const Camera& camera, const Vec3& center, double angle_rad);

/// Angle between two cameras' view directions.
double view_deviation(const Camera& a, const Camera& b);

}  // namespace vdi
