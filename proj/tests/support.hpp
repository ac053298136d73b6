// Copyright 2026 The VDI Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

// Shared fixtures for the unit, property and acceptance tests.

#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "vdi/camera.hpp"
#include "vdi/synth.hpp"
#include "vdi/vdi.hpp"
#include "vdi/volume.hpp"

namespace vdi::test {

/// splitmix64-backed generator with the helpers tests need.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() { return splitmix64(state_); }
  double uniform() { return unit_double(next()); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int below(int n) { return static_cast<int>(next() % static_cast<std::uint64_t>(n)); }
  bool coin(double p = 0.5) { return uniform() < p; }
  Vec3 vec3(double lo, double hi) { return {uniform(lo, hi), uniform(lo, hi), uniform(lo, hi)}; }
  Quat quat() {
    Quat q(uniform(-1, 1), uniform(-1, 1), uniform(-1, 1), uniform(-1, 1));
    if (q.norm() < 1e-3) return Quat::Identity();
    return q.normalized();
  }

 private:
  std::uint64_t state_;
};

/// Camera at distance `dist` on +z looking at the origin.
inline Camera front_camera(int w, int h, double dist = 3.0, double far_plane = 10.0) {
  return Camera::look_at(Vec3(0, 0, dist), Vec3::Zero(), Vec3::UnitY(), deg_to_rad(40.0), 0.1,
                         far_plane, w, h);
}

inline Volume constant_volume(int n, std::uint16_t value, VoxelType type = VoxelType::kU8) {
  const std::size_t count = static_cast<std::size_t>(n) * n * n;
  return Volume({n, n, n}, type, Vec3::Constant(1.0 / (n - 1)),
                std::vector<std::uint16_t>(count, value));
}

/// Volume whose voxel value depends on its (x, y, z) index.
inline Volume volume_from(int n, const std::function<std::uint16_t(int, int, int)>& f,
                          VoxelType type = VoxelType::kU8) {
  std::vector<std::uint16_t> data(static_cast<std::size_t>(n) * n * n);
  for (int z = 0; z < n; ++z)
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x) data[(static_cast<std::size_t>(z) * n + y) * n + x] = f(x, y, z);
  return Volume({n, n, n}, type, Vec3::Constant(1.0 / (n - 1)), std::move(data));
}

/// Transfer function with a single constant color over the whole range.
inline TransferFunction flat_tf(Rgba c) { return TransferFunction({{0.0, c}, {1.0, c}}); }

/// Two colors split at scalar 0.5 with a very narrow ramp.
inline TransferFunction step_tf(Rgba lo, Rgba hi) {
  return TransferFunction({{0.0, lo}, {0.4999, lo}, {0.5001, hi}, {1.0, hi}}, 4096);
}

/// Sorted, disjoint random list of up to n entries in [-1, 1]. Optionally
/// shares boundaries (back[k] == front[k+1]) to hit tie cases.
inline std::vector<Supersegment> random_list(Rng& rng, int n, bool touching = false) {
  std::vector<float> cuts;
  const int k = n;
  for (int i = 0; i < 2 * k; ++i) cuts.push_back(static_cast<float>(rng.uniform(-1.0, 1.0)));
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  std::vector<Supersegment> out;
  for (std::size_t i = 0; i + 1 < cuts.size(); i += 2) {
    Supersegment s;
    s.front = cuts[i];
    s.back = cuts[i + 1];
    if (touching && !out.empty() && rng.coin(0.5) && out.back().back < s.front) {
      s.front = out.back().back;
    }
    const float a = static_cast<float>(rng.uniform());
    s.color = {static_cast<float>(rng.uniform() * a), static_cast<float>(rng.uniform() * a),
               static_cast<float>(rng.uniform() * a), a};
    out.push_back(s);
  }
  return out;
}

/// Random valid VDI: each list holds 0..n_sg entries (some lists empty).
inline Vdi random_vdi(Rng& rng, int w, int h, int n_sg, const Camera& cam, double empty_p = 0.3) {
  Vdi vdi(w, h, n_sg, cam, Aabb{Vec3::Constant(-0.5), Vec3::Constant(0.5)});
  for (std::size_t l = 0; l < vdi.list_count(); ++l) {
    if (rng.coin(empty_p)) continue;
    vdi.set_list(l, random_list(rng, 1 + rng.below(n_sg), rng.coin(0.3)));
  }
  return vdi;
}

inline AccelGrid grid_for(const Vdi& vdi, std::array<int, 3> dims = {0, 0, 0}) {
  if (dims[0] == 0) dims = AccelGrid::default_dims(vdi.width(), vdi.height());
  AccelGrid g(dims, vdi.gen_camera());
  g.recount(vdi);
  return g;
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("vdi_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace vdi::test
