// Copyright 2026 The VDI Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>

#include "vdi/camera.hpp"
#include "vdi/volume.hpp"

namespace vdi {

enum class Preset { kSphere, kBands, kEngineoid };

Preset parse_preset(const std::string& name);
const char* to_string(Preset preset);

/// Deterministic cube volume of n^3 voxels spanning a unit world cube.
///  sphere:    type max inside radius 0.35 n around the center, 0 outside
///  bands:     64 slabs along z with distinct (permuted) levels
///  engineoid: seeded smooth value noise carved into shells and struts
Volume make_synthetic(Preset preset, int n, VoxelType type = VoxelType::kU8,
                      std::uint64_t seed = 1);

/// Transfer function matched to a preset.
TransferFunction default_transfer_function(Preset preset);

/// Camera orbiting the volume center at `distance_factor` x the box diagonal,
/// rotated by `azimuth_rad` about the world y axis from the +z side and
/// tilted up by `elevation_rad`.
Camera default_camera(const Volume& volume, int width, int height, double azimuth_rad = 0.35,
                      double elevation_rad = 0.25, double distance_factor = 1.5);

/// Uniform double in [0, 1) from a 64-bit generator state (portable).
std::uint64_t splitmix64(std::uint64_t& state);
double unit_double(std::uint64_t bits);

}  // namespace vdi
