// Copyright 2026 The VDI Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "vdi/synth.hpp"

#include <cmath>

#include "vdi/error.hpp"

namespace vdi {

Preset parse_preset(const std::string& name) {
  if (name == "sphere") return Preset::kSphere;
  if (name == "bands") return Preset::kBands;
  if (name == "engineoid") return Preset::kEngineoid;
  throw Error(ErrorCode::kInvalidArgument, "unknown preset '" + name + "'");
}

const char* to_string(Preset preset) {
  switch (preset) {
    case Preset::kSphere: return "sphere";
    case Preset::kBands: return "bands";
    case Preset::kEngineoid: return "engineoid";
  }
  return "?";
}

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

double unit_double(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

namespace {

// Smooth lattice noise: random values on a coarse grid, trilinearly blended.
class ValueNoise {
 public:
  ValueNoise(int cells, std::uint64_t seed) : n_(cells + 1), v_(static_cast<std::size_t>(n_) * n_ * n_) {
    std::uint64_t s = seed;
    for (double& x : v_) x = unit_double(splitmix64(s));
  }
  double operator()(double x, double y, double z) const {  // coords in [0, 1]
    const double fx = x * (n_ - 1), fy = y * (n_ - 1), fz = z * (n_ - 1);
    const int x0 = std::min(static_cast<int>(fx), n_ - 2);
    const int y0 = std::min(static_cast<int>(fy), n_ - 2);
    const int z0 = std::min(static_cast<int>(fz), n_ - 2);
    const double tx = smooth(fx - x0), ty = smooth(fy - y0), tz = smooth(fz - z0);
    auto at = [&](int i, int j, int k) {
      return v_[(static_cast<std::size_t>(k) * n_ + j) * n_ + i];
    };
    auto lerp = [](double a, double b, double t) { return a + t * (b - a); };
    return lerp(lerp(lerp(at(x0, y0, z0), at(x0 + 1, y0, z0), tx),
                     lerp(at(x0, y0 + 1, z0), at(x0 + 1, y0 + 1, z0), tx), ty),
                lerp(lerp(at(x0, y0, z0 + 1), at(x0 + 1, y0, z0 + 1), tx),
                     lerp(at(x0, y0 + 1, z0 + 1), at(x0 + 1, y0 + 1, z0 + 1), tx), ty),
                tz);
  }

 private:
  static double smooth(double t) { return t * t * (3.0 - 2.0 * t); }
  int n_;
  std::vector<double> v_;
};

}  // namespace

Volume make_synthetic(Preset preset, int n, VoxelType type, std::uint64_t seed) {
  if (n < 2) throw Error(ErrorCode::kInvalidArgument, "synthetic volume needs n >= 2");
  const double vmax = type == VoxelType::kU8 ? 255.0 : 65535.0;
  const std::size_t total = static_cast<std::size_t>(n) * n * n;
  std::vector<std::uint16_t> data(total, 0);
  const double c = 0.5 * (n - 1);

  auto quant = [vmax](double v) {
    return static_cast<std::uint16_t>(std::lround(std::clamp(v, 0.0, 1.0) * vmax));
  };

  switch (preset) {
    case Preset::kSphere: {
      const double r = 0.35 * n;
      for (int z = 0; z < n; ++z)
        for (int y = 0; y < n; ++y)
          for (int x = 0; x < n; ++x) {
            const double d2 = (x - c) * (x - c) + (y - c) * (y - c) + (z - c) * (z - c);
            if (d2 <= r * r) data[(static_cast<std::size_t>(z) * n + y) * n + x] = quant(1.0);
          }
      break;
    }
    case Preset::kBands: {
      constexpr int kBands = 64;
      for (int z = 0; z < n; ++z) {
        const int band = std::min(kBands - 1, z * kBands / n);
        const int level = (band * 37) % kBands;  // neighbors get distant levels
        const std::uint16_t v = quant((level + 1.0) / (kBands + 1.0));
        for (int y = 0; y < n; ++y)
          for (int x = 0; x < n; ++x) data[(static_cast<std::size_t>(z) * n + y) * n + x] = v;
      }
      break;
    }
    case Preset::kEngineoid: {
      const ValueNoise coarse(4, seed);
      const ValueNoise fine(11, seed ^ 0x5bd1e995ull);
      for (int z = 0; z < n; ++z)
        for (int y = 0; y < n; ++y)
          for (int x = 0; x < n; ++x) {
            const double px = double(x) / (n - 1), py = double(y) / (n - 1), pz = double(z) / (n - 1);
            const double rr = std::hypot(px - 0.5, py - 0.5);
            double v = 0.65 * coarse(px, py, pz) + 0.35 * fine(px, py, pz);
            // Cylinder casing with an inner shaft.
            if (rr > 0.45) v *= 0.0;
            else if (rr > 0.38) v = std::max(v, 0.85);
            else if (rr < 0.08) v = std::max(v, 0.95);
            data[(static_cast<std::size_t>(z) * n + y) * n + x] = quant(v < 0.45 ? 0.0 : v);
          }
      break;
    }
  }
  const double sp = 1.0 / (n - 1);
  return Volume({n, n, n}, type, Vec3(sp, sp, sp), std::move(data));
}

TransferFunction default_transfer_function(Preset preset) {
  switch (preset) {
    case Preset::kSphere:
      return TransferFunction({{0.0, {0.f, 0.f, 0.f, 0.f}},
                               {0.5, {0.f, 0.f, 0.f, 0.f}},
                               {1.0, {0.95f, 0.55f, 0.2f, 0.02f}}});
    case Preset::kBands: {
      std::vector<ControlPoint> pts{{0.0, {0.f, 0.f, 0.f, 0.f}}};
      // Hue wheel over the band levels, low opacity so rays cross every band.
      for (int i = 1; i <= 6; ++i) {
        const double s = i / 6.0;
        const double h = 6.0 * s;
        const float r = static_cast<float>(std::clamp(std::abs(h - 3.0) - 1.0, 0.0, 1.0));
        const float g = static_cast<float>(std::clamp(2.0 - std::abs(h - 2.0), 0.0, 1.0));
        const float b = static_cast<float>(std::clamp(2.0 - std::abs(h - 4.0), 0.0, 1.0));
        pts.push_back({s, {r, g, b, 0.012f}});
      }
      return TransferFunction(std::move(pts));
    }
    case Preset::kEngineoid:
      return TransferFunction({{0.0, {0.f, 0.f, 0.f, 0.f}},
                               {0.45, {0.f, 0.f, 0.f, 0.f}},
                               {0.55, {0.2f, 0.4f, 0.9f, 0.02f}},
                               {0.8, {0.9f, 0.8f, 0.3f, 0.05f}},
                               {1.0, {1.f, 0.3f, 0.2f, 0.3f}}});
  }
  throw Error(ErrorCode::kInvalidArgument, "preset");
}

Camera default_camera(const Volume& volume, int width, int height, double azimuth_rad,
                      double elevation_rad, double distance_factor) {
  const Aabb box = volume.world_bounds();
  const double dist = distance_factor * box.diagonal();
  const Vec3 dir(std::sin(azimuth_rad) * std::cos(elevation_rad), std::sin(elevation_rad),
                 std::cos(azimuth_rad) * std::cos(elevation_rad));
  return Camera::look_at(box.center() + dist * dir, box.center(), Vec3::UnitY(), deg_to_rad(40.0),
                         0.1, Camera::default_far(box.diagonal()), width, height);
}

}  // namespace vdi
