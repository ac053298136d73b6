// Copyright 2026 The VDI Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "vdi/dvr.hpp"

#include <tbb/blocked_range2d.h>
#include <tbb/parallel_for.h>

#include "vdi/raycast.hpp"

namespace vdi {

Rgba dvr_ray(const GenRay& ray, const GenContext& ctx, double early_term_alpha) {
  double cr = 0.0, cg = 0.0, cb = 0.0, acc = 0.0;
  const std::int64_t n = ctx.sample_count(ray);
  for (std::int64_t i = 0; i < n; ++i) {
    const double t = ray.t0 + static_cast<double>(i) * ctx.step();
    const StepSample s = ctx.sample(ray, t);
    if (s.alpha <= 0.f) continue;
    const double w = (1.0 - acc) * s.alpha;
    cr += w * s.color.r;
    cg += w * s.color.g;
    cb += w * s.color.b;
    acc += w;
    if (acc >= early_term_alpha) break;
  }
  return {static_cast<float>(cr), static_cast<float>(cg), static_cast<float>(cb),
          static_cast<float>(acc)};
}

Image render_dvr(const Volume& volume, const TransferFunction& tf, const Camera& cam,
                 const DvrOptions& opts) {
  const double step = opts.step > 0.0 ? opts.step : 0.5 * volume.min_spacing();
  const GenContext ctx(volume, tf, cam, step);
  Image img(cam.width, cam.height);
  tbb::parallel_for(tbb::blocked_range2d<int>(0, cam.height, 16, 0, cam.width, 16),
                    [&](const tbb::blocked_range2d<int>& tile) {
                      for (int iy = tile.rows().begin(); iy != tile.rows().end(); ++iy) {
                        for (int ix = tile.cols().begin(); ix != tile.cols().end(); ++ix) {
                          Rgba c{};
                          if (const auto ray = ctx.pixel_ray(ix, iy)) {
                            c = dvr_ray(*ray, ctx, opts.early_term_alpha);
                          }
                          img.at(ix, iy) = over_background(c, opts.background);
                        }
                      }
                    });
  return img;
}

}  // namespace vdi
