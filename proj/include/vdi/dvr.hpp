// Copyright 2026 The VDI Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "vdi/camera.hpp"
#include "vdi/generate.hpp"
#include "vdi/image.hpp"
#include "vdi/volume.hpp"

namespace vdi {

struct DvrOptions {
  double step = 0.0;  ///< world units; <= 0: half the smallest voxel spacing
  double early_term_alpha = 0.999;
  Rgba background{0.f, 0.f, 0.f, 1.f};
};

/// Emission-absorption composite of one clipped ray (premultiplied).
Rgba dvr_ray(const GenRay& ray, const GenContext& ctx, double early_term_alpha);

/// Ground-truth raycaster sharing the generation sampler.
Image render_dvr(const Volume& volume, const TransferFunction& tf, const Camera& cam,
                 const DvrOptions& opts = {});

}  // namespace vdi
