// Copyright 2026 The VDI Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "vdi/vdi.hpp"

namespace vdi {

inline constexpr std::uint32_t kVdiFormatVersion = 1;

/// Bit-exact little-endian serialization of a VDI and its grid.
std::vector<std::uint8_t> encode_vdi(const Vdi& vdi, const AccelGrid& grid);

struct DecodedVdi {
  Vdi vdi;
  AccelGrid grid;
};

/// Throws kBadMagic, kVersionMismatch, kTruncatedStream or kInvariantViolation.
DecodedVdi decode_vdi(std::span<const std::uint8_t> bytes);

void save_vdi(const std::filesystem::path& path, const Vdi& vdi, const AccelGrid& grid);
DecodedVdi load_vdi(const std::filesystem::path& path);

/// Size in bytes of the encoded form.
std::size_t encoded_vdi_size(const Vdi& vdi, const AccelGrid& grid);

}  // namespace vdi
