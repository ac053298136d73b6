// Copyright 2026 The VDI Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "vdi/bench.hpp"

#include <chrono>
#include <fstream>
#include <iomanip>

#include "vdi/error.hpp"
#include "vdi/metrics.hpp"

namespace vdi {

std::vector<Camera> deviation_sweep(const Camera& gen_camera, const Vec3& center,
                                    const std::vector<double>& angles_deg) {
  std::vector<Camera> out;
  out.reserve(angles_deg.size());
  for (double a : angles_deg) out.push_back(orbit(gen_camera, center, deg_to_rad(a)));
  return out;
}

std::vector<BenchRow> run_bench(const Volume& volume, const TransferFunction& tf, const Vdi& vdi,
                                const AccelGrid& grid, const std::vector<Camera>& path,
                                const RenderOptions& opts, const DvrOptions& dvr_opts) {
  const VdiRenderer renderer(vdi, grid);
  DvrOptions dopts = dvr_opts;
  dopts.background = opts.background;
  std::vector<BenchRow> rows;
  rows.reserve(path.size());
  for (std::size_t i = 0; i < path.size(); ++i) {
    BenchRow row;
    row.frame_index = static_cast<int>(i);
    row.angle_deg = rad_to_deg(view_deviation(vdi.gen_camera(), path[i]));
    RenderStats stats;
    const Image img = renderer.render(path[i], opts, &stats);
    row.frame_ms = stats.ms;
    row.lists_visited = stats.lists_visited;
    row.supersegments_intersected = stats.supersegments_intersected;
    row.ess_jumps = stats.ess_jumps;
    const auto t0 = std::chrono::steady_clock::now();
    const Image truth = render_dvr(volume, tf, path[i], dopts);
    row.dvr_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                     .count();
    row.ssim = ssim(img, truth);
    row.psnr = psnr(img, truth);
    rows.push_back(row);
  }
  return rows;
}

void write_bench_csv(const std::filesystem::path& path, const std::vector<BenchRow>& rows) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << "frame_index,angle_deg,frame_ms,ssim,psnr,lists_visited,supersegments_intersected,"
         "ess_jumps,dvr_ms\n";
  out << std::setprecision(9);
  for (const auto& r : rows) {
    out << r.frame_index << ',' << r.angle_deg << ',' << r.frame_ms << ',' << r.ssim << ','
        << r.psnr << ',' << r.lists_visited << ',' << r.supersegments_intersected << ','
        << r.ess_jumps << ',' << r.dvr_ms << '\n';
  }
  if (!out) throw Error(ErrorCode::kIo, "short write to " + path.string());
}

}  // namespace vdi
