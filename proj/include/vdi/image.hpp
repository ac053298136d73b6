// Copyright 2026 The VDI Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "vdi/types.hpp"

namespace vdi {

/// RGBA float image, rows top to bottom.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<Rgba> pixels;

  Image() = default;
  Image(int w, int h, Rgba fill = {});

  Rgba& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
  const Rgba& at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }

  friend bool operator==(const Image&, const Image&) = default;
};

/// Largest per-channel absolute difference; throws kDimensionMismatch.
double max_abs_diff(const Image& a, const Image& b);

/// 8-bit RGBA, row-major, rounded and clamped.
std::vector<std::uint8_t> to_rgba8(const Image& img);
Image from_rgba8(int width, int height, const std::vector<std::uint8_t>& rgba);

void write_png(const std::filesystem::path& path, const Image& img);
std::vector<std::uint8_t> encode_png(const Image& img);
Image read_png(const std::filesystem::path& path);
Image decode_png(std::span<const std::uint8_t> bytes);
/// Binary PPM (P6); alpha is dropped.
void write_ppm(const std::filesystem::path& path, const Image& img);

/// Writes PNG or PPM by extension (.ppm means PPM, anything else PNG).
void write_image(const std::filesystem::path& path, const Image& img);

/// Bilinear resampling to a new size (pixel-center aligned). Same size is a copy.
Image resize_bilinear(const Image& img, int width, int height);

}  // namespace vdi
