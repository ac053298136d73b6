// Copyright 2026 The VDI Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "vdi/image.hpp"

#include <cmath>
#include <fstream>

#include <png.h>

#include "vdi/error.hpp"

namespace vdi {

Image::Image(int w, int h, Rgba fill)
    : width(w), height(h), pixels(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill) {
  if (w < 0 || h < 0) throw Error(ErrorCode::kInvalidArgument, "negative image size");
}

double max_abs_diff(const Image& a, const Image& b) {
  if (a.width != b.width || a.height != b.height) {
    throw Error(ErrorCode::kDimensionMismatch, "images differ in size");
  }
  double m = 0.0;
  for (std::size_t i = 0; i < a.pixels.size(); ++i) {
    const Rgba& p = a.pixels[i];
    const Rgba& q = b.pixels[i];
    m = std::max({m, std::abs(double(p.r) - q.r), std::abs(double(p.g) - q.g),
                  std::abs(double(p.b) - q.b), std::abs(double(p.a) - q.a)});
  }
  return m;
}

std::vector<std::uint8_t> to_rgba8(const Image& img) {
  std::vector<std::uint8_t> out;
  out.reserve(img.pixels.size() * 4);
  auto q = [](float v) {
    return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.f, 1.f) * 255.f));
  };
  for (const Rgba& p : img.pixels) {
    out.push_back(q(p.r));
    out.push_back(q(p.g));
    out.push_back(q(p.b));
    out.push_back(q(p.a));
  }
  return out;
}

Image from_rgba8(int width, int height, const std::vector<std::uint8_t>& rgba) {
  if (rgba.size() != static_cast<std::size_t>(width) * height * 4) {
    throw Error(ErrorCode::kSizeMismatch, "rgba buffer size mismatch");
  }
  Image img(width, height);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    img.pixels[i] = {rgba[4 * i] / 255.f, rgba[4 * i + 1] / 255.f, rgba[4 * i + 2] / 255.f,
                     rgba[4 * i + 3] / 255.f};
  }
  return img;
}

namespace {

png_image make_png_header(const Image& img) {
  png_image p{};
  p.version = PNG_IMAGE_VERSION;
  p.width = static_cast<png_uint_32>(img.width);
  p.height = static_cast<png_uint_32>(img.height);
  p.format = PNG_FORMAT_RGBA;
  return p;
}

}  // namespace

void write_png(const std::filesystem::path& path, const Image& img) {
  const auto bytes = encode_png(img);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "short write to " + path.string());
}

std::vector<std::uint8_t> encode_png(const Image& img) {
  const auto rgba = to_rgba8(img);
  png_image p = make_png_header(img);
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&p, nullptr, &size, 0, rgba.data(), 0, nullptr)) {
    throw Error(ErrorCode::kIo, std::string("png: ") + p.message);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&p, out.data(), &size, 0, rgba.data(), 0, nullptr)) {
    throw Error(ErrorCode::kIo, std::string("png: ") + p.message);
  }
  out.resize(size);
  return out;
}

Image read_png(const std::filesystem::path& path) {
  png_image p{};
  p.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&p, path.string().c_str())) {
    throw Error(ErrorCode::kIo, "png " + path.string() + ": " + p.message);
  }
  p.format = PNG_FORMAT_RGBA;
  std::vector<std::uint8_t> rgba(PNG_IMAGE_SIZE(p));
  if (!png_image_finish_read(&p, nullptr, rgba.data(), 0, nullptr)) {
    throw Error(ErrorCode::kIo, "png " + path.string() + ": " + p.message);
  }
  return from_rgba8(static_cast<int>(p.width), static_cast<int>(p.height), rgba);
}

Image decode_png(std::span<const std::uint8_t> bytes) {
  png_image p{};
  p.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&p, bytes.data(), bytes.size())) {
    throw Error(ErrorCode::kParse, std::string("png: ") + p.message);
  }
  p.format = PNG_FORMAT_RGBA;
  std::vector<std::uint8_t> rgba(PNG_IMAGE_SIZE(p));
  if (!png_image_finish_read(&p, nullptr, rgba.data(), 0, nullptr)) {
    throw Error(ErrorCode::kParse, std::string("png: ") + p.message);
  }
  return from_rgba8(static_cast<int>(p.width), static_cast<int>(p.height), rgba);
}

void write_ppm(const std::filesystem::path& path, const Image& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << "P6\n" << img.width << ' ' << img.height << "\n255\n";
  const auto rgba = to_rgba8(img);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    out.write(reinterpret_cast<const char*>(&rgba[4 * i]), 3);
  }
  if (!out) throw Error(ErrorCode::kIo, "short write to " + path.string());
}

void write_image(const std::filesystem::path& path, const Image& img) {
  if (path.extension() == ".ppm") {
    write_ppm(path, img);
  } else {
    write_png(path, img);
  }
}

Image resize_bilinear(const Image& img, int width, int height) {
  if (width == img.width && height == img.height) return img;
  if (img.width == 0 || img.height == 0) return Image(width, height);
  Image out(width, height);
  const double sx = static_cast<double>(img.width) / width;
  const double sy = static_cast<double>(img.height) / height;
  for (int y = 0; y < height; ++y) {
    const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, img.height - 1.0);
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, img.height - 1);
    const float ty = static_cast<float>(fy - y0);
    for (int x = 0; x < width; ++x) {
      const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, img.width - 1.0);
      const int x0 = static_cast<int>(fx);
      const int x1 = std::min(x0 + 1, img.width - 1);
      const float tx = static_cast<float>(fx - x0);
      auto lerp = [](const Rgba& a, const Rgba& b, float t) {
        return Rgba{a.r + t * (b.r - a.r), a.g + t * (b.g - a.g), a.b + t * (b.b - a.b),
                    a.a + t * (b.a - a.a)};
      };
      out.at(x, y) = lerp(lerp(img.at(x0, y0), img.at(x1, y0), tx),
                          lerp(img.at(x0, y1), img.at(x1, y1), tx), ty);
    }
  }
  return out;
}

}  // namespace vdi
