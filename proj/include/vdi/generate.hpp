// Copyright 2026 The VDI Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "vdi/camera.hpp"
#include "vdi/vdi.hpp"
#include "vdi/volume.hpp"

namespace vdi {

inline const double kMaxGamma = std::sqrt(3.0);

struct GenParams {
  int n_sg = 12;
  int delta = -1;            ///< < 0: floor(0.15 * n_sg), at least 1, below n_sg
  double epsilon = 1e-6;     ///< bisection bracket cutoff
  double gamma_init = 1e-5;  ///< first-pass threshold
  double step = 0.0;         ///< world units; <= 0: half the smallest voxel spacing
  double alpha_early = 0.999;
  std::array<int, 3> grid_dims{0, 0, 0};  ///< zeros: AccelGrid::default_dims

  int resolved_delta() const;
  double resolved_step(const Volume& volume) const;
  void validate() const;
};

/// True when a sample must start a new supersegment: the distance between the
/// supersegment's premultiplied color and the sample's color premultiplied by
/// `alpha_prime` is at least gamma.
bool terminate_check(const std::array<float, 3>& seg_premult, const Rgba& sample,
                     double alpha_prime, double gamma);

/// What generate_list does once the budget would be passed.
enum class BudgetMode {
  kAbort,      ///< stop at the (n_sg+1)-th supersegment, exceeded = true
  kSmear,      ///< keep counting; the last stored supersegment absorbs the remainder
  kUnbounded,  ///< store everything
};

struct ListResult {
  int count = 0;  ///< supersegments at this gamma (exact unless aborted)
  std::vector<Supersegment> segments;
  bool exceeded = false;
};

/// A generation ray restricted to the volume, with its NDC depth mapping.
struct GenRay {
  Ray ray;
  double t0 = 0.0;
  double t1 = 0.0;
  double depth0 = 0.0;    ///< view depth at t = 0
  double depth_dt = 1.0;  ///< view depth per unit t

  double view_depth(double t) const { return depth0 + depth_dt * t; }
};

/// Shared, immutable state for sampling rays of one volume from one camera.
class GenContext {
 public:
  GenContext(const Volume& volume, const TransferFunction& tf, const Camera& camera,
             double step);

  const Volume& volume() const { return *volume_; }
  const StepClassifier& classifier() const { return classifier_; }
  const NdcTransform& transform() const { return transform_; }
  const Camera& camera() const { return transform_.camera(); }
  double step() const { return classifier_.step(); }

  /// Ray through pixel (ix, iy) clipped to the volume; nullopt on a miss.
  std::optional<GenRay> pixel_ray(int ix, int iy) const;
  /// Arbitrary ray clipped to the volume (depths still measured for this context's camera).
  std::optional<GenRay> clip(const Ray& ray) const;

  /// Samples at t0 + k*step, k < ceil((t1 - t0) / step).
  std::int64_t sample_count(const GenRay& r) const;
  StepSample sample(const GenRay& r, double t) const;
  float ndc_z(const GenRay& r, double t) const;

 private:
  const Volume* volume_;
  StepClassifier classifier_;
  NdcTransform transform_;
};

ListResult generate_list(const GenRay& ray, const GenContext& ctx, double gamma, int n_sg,
                         double alpha_early, BudgetMode mode);

struct GammaResult {
  double gamma = 0.0;
  int count = 0;
  int passes = 0;
  std::vector<Supersegment> segments;
  bool fit = true;  ///< false when no gamma met the budget and the list was smeared
};

/// Per-ray bisection on gamma so that the list lands in [n_sg - delta, n_sg].
GammaResult find_gamma(const GenRay& ray, const GenContext& ctx, const GenParams& params);

struct GenStats {
  double wall_ms = 0.0;
  std::int64_t rays = 0;
  std::int64_t rays_hit = 0;
  std::int64_t total_passes = 0;
  int max_passes = 0;
  std::int64_t supersegments = 0;
  std::int64_t smeared_rays = 0;
  std::vector<std::int64_t> pass_histogram;  ///< index = passes
};

struct GeneratedVdi {
  Vdi vdi;
  AccelGrid grid;
  GenStats stats;
};

/// One find_gamma per viewport pixel, parallel over rows.
GeneratedVdi generate_vdi(const Volume& volume, const TransferFunction& tf, const Camera& camera,
                          const GenParams& params);

}  // namespace vdi
