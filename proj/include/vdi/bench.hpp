// Copyright 2026 The VDI Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <vector>

#include "vdi/dvr.hpp"
#include "vdi/raycast.hpp"
#include "vdi/volume.hpp"

namespace vdi {

/// One novel view rendered from a VDI and compared with ground truth.
struct BenchRow {
  int frame_index = 0;
  double angle_deg = 0.0;  ///< view deviation from the generation camera
  double frame_ms = 0.0;
  double ssim = 0.0;
  double psnr = 0.0;
  std::int64_t lists_visited = 0;
  std::int64_t supersegments_intersected = 0;
  std::int64_t ess_jumps = 0;
  double dvr_ms = 0.0;
};

/// Cameras orbiting the generation camera about `center` by each angle (degrees).
std::vector<Camera> deviation_sweep(const Camera& gen_camera, const Vec3& center,
                                    const std::vector<double>& angles_deg);

/// Renders every camera from the VDI and with DVR; rows in input order.
std::vector<BenchRow> run_bench(const Volume& volume, const TransferFunction& tf, const Vdi& vdi,
                                const AccelGrid& grid, const std::vector<Camera>& path,
                                const RenderOptions& opts, const DvrOptions& dvr_opts = {});

/// Header: frame_index,angle_deg,frame_ms,ssim,psnr,lists_visited,
/// supersegments_intersected,ess_jumps,dvr_ms
void write_bench_csv(const std::filesystem::path& path, const std::vector<BenchRow>& rows);

}  // namespace vdi
