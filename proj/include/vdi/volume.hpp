// Copyright 2026 The VDI Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "vdi/types.hpp"

namespace vdi {

enum class VoxelType { kU8, kU16 };

int bytes_per_voxel(VoxelType type);
const char* to_string(VoxelType type);
VoxelType parse_voxel_type(const std::string& name);

/// Sidecar description of a headerless raw brick.
struct VolumeMeta {
  std::array<int, 3> dims{0, 0, 0};
  VoxelType voxel_type = VoxelType::kU8;
  Vec3 spacing = Vec3::Ones();
  /// Path of the raw brick; empty means "next to the sidecar, same stem, .raw".
  std::filesystem::path raw_file;

  void validate() const;
};

VolumeMeta read_volume_meta(const std::filesystem::path& json_path);
void write_volume_meta(const std::filesystem::path& json_path, const VolumeMeta& meta);

/// Dense scalar grid, x-fastest. Raw integers are kept as stored and
/// normalized by the voxel type's maximum when sampled.
class Volume {
 public:
  Volume(std::array<int, 3> dims, VoxelType type, Vec3 spacing, std::vector<std::uint16_t> data);

  const std::array<int, 3>& dims() const { return dims_; }
  VoxelType voxel_type() const { return type_; }
  const Vec3& spacing() const { return spacing_; }
  const std::vector<std::uint16_t>& data() const { return data_; }
  std::pair<std::uint16_t, std::uint16_t> value_range() const { return range_; }

  std::uint16_t at(int x, int y, int z) const {
    return data_[static_cast<std::size_t>(x) +
                 static_cast<std::size_t>(dims_[0]) *
                     (static_cast<std::size_t>(y) + static_cast<std::size_t>(dims_[1]) * z)];
  }

  /// 255 or 65535.
  double type_max() const { return type_ == VoxelType::kU8 ? 255.0 : 65535.0; }
  double min_spacing() const { return spacing_.minCoeff(); }

  /// World bounds: voxel centers span the box, which is centered on the origin.
  Aabb world_bounds() const;
  Vec3 world_to_normalized(const Vec3& world) const;

  /// Trilinear interpolation of normalized scalars at normalized coords in [0,1]^3.
  /// Out-of-range coordinates are a caller error.
  float sample_scalar(const Vec3& p) const;

 private:
  std::array<int, 3> dims_;
  VoxelType type_;
  Vec3 spacing_;
  std::vector<std::uint16_t> data_;
  std::pair<std::uint16_t, std::uint16_t> range_{0, 0};
  Vec3 half_extent_;
};

/// Reads a little-endian raw brick; the file length must match the metadata.
Volume load_raw_volume(const std::filesystem::path& raw_path, const VolumeMeta& meta);
/// Reads the sidecar, then the brick it points at.
Volume load_volume(const std::filesystem::path& json_path);
void write_raw_volume(const std::filesystem::path& raw_path, const Volume& volume);

struct ControlPoint {
  double scalar = 0.0;
  Rgba color;
};

/// Piecewise-linear transfer function baked into a lookup table.
class TransferFunction {
 public:
  explicit TransferFunction(std::vector<ControlPoint> points, int resolution = 1024);

  /// Classification of a normalized scalar; linear between LUT entries.
  Rgba classify(float scalar) const {
    const float x = std::clamp(scalar, 0.f, 1.f) * static_cast<float>(resolution_ - 1);
    const int i = std::min(static_cast<int>(x), resolution_ - 2);
    const float f = x - static_cast<float>(i);
    const Rgba& lo = lut_[static_cast<std::size_t>(i)];
    const Rgba& hi = lut_[static_cast<std::size_t>(i) + 1];
    return {lo.r + f * (hi.r - lo.r), lo.g + f * (hi.g - lo.g), lo.b + f * (hi.b - lo.b),
            lo.a + f * (hi.a - lo.a)};
  }

  const std::vector<ControlPoint>& control_points() const { return points_; }
  const std::vector<Rgba>& lut() const { return lut_; }
  int resolution() const { return resolution_; }

  static TransferFunction from_json(const nlohmann::json& j);
  static TransferFunction load(const std::filesystem::path& path);
  nlohmann::json to_json() const;
  void save(const std::filesystem::path& path) const;

 private:
  std::vector<ControlPoint> points_;
  int resolution_;
  std::vector<Rgba> lut_;
};

/// Post-classified sample: interpolate the scalar, then classify it.
inline Rgba sample_classified(const Volume& volume, const TransferFunction& tf, const Vec3& p) {
  return tf.classify(volume.sample_scalar(p));
}

/// A classified sample with its opacity rescaled to a sampling step.
struct StepSample {
  Rgba color;         ///< straight color, TF opacity in color.a
  float alpha = 0.f;  ///< opacity of one step
};

/// Classifies samples for a fixed step length. Transfer-function opacities are
/// defined per reference length (the smallest voxel spacing); a step of length
/// s therefore uses 1 - (1 - a)^(s / reference).
class StepClassifier {
 public:
  StepClassifier(const Volume& volume, const TransferFunction& tf, double step);

  StepSample sample(const Vec3& normalized) const {
    StepSample s;
    s.color = tf_->classify(volume_->sample_scalar(normalized));
    s.alpha = adjust(s.color.a, exponent_);
    return s;
  }

  /// Opacity of the material in `a` over `steps` sampling steps.
  float alpha_over_steps(float a, double steps) const { return adjust(a, exponent_ * steps); }

  double step() const { return step_; }
  double exponent() const { return exponent_; }
  const Volume& volume() const { return *volume_; }

  static float adjust(float a, double exponent) {
    if (a <= 0.f) return 0.f;
    if (a >= 1.f) return 1.f;
    return static_cast<float>(1.0 - std::pow(1.0 - static_cast<double>(a), exponent));
  }

 private:
  const Volume* volume_;
  const TransferFunction* tf_;
  double step_;
  double exponent_;
};

}  // namespace vdi
