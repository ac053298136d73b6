// Copyright 2026 The VDI Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "vdi/metrics.hpp"

#include <array>
#include <cmath>
#include <limits>

#include "vdi/error.hpp"

namespace vdi {

namespace {

constexpr int kRadius = 5;
constexpr double kSigma = 1.5;
constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;

std::array<double, 2 * kRadius + 1> gaussian_kernel() {
  std::array<double, 2 * kRadius + 1> k{};
  double sum = 0.0;
  for (int i = -kRadius; i <= kRadius; ++i) {
    k[static_cast<std::size_t>(i + kRadius)] = std::exp(-0.5 * i * i / (kSigma * kSigma));
    sum += k[static_cast<std::size_t>(i + kRadius)];
  }
  for (double& v : k) v /= sum;
  return k;
}

// Separable valid-mode filter: output is (w - 2r) x (h - 2r).
std::vector<double> filter_valid(const std::vector<double>& img, int w, int h) {
  static const auto k = gaussian_kernel();
  const int ow = w - 2 * kRadius;
  const int oh = h - 2 * kRadius;
  std::vector<double> tmp(static_cast<std::size_t>(ow) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int i = 0; i <= 2 * kRadius; ++i) {
        s += k[static_cast<std::size_t>(i)] * img[static_cast<std::size_t>(y) * w + x + i];
      }
      tmp[static_cast<std::size_t>(y) * ow + x] = s;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(ow) * oh);
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int i = 0; i <= 2 * kRadius; ++i) {
        s += k[static_cast<std::size_t>(i)] * tmp[static_cast<std::size_t>(y + i) * ow + x];
      }
      out[static_cast<std::size_t>(y) * ow + x] = s;
    }
  }
  return out;
}

double ssim_term(double mx, double my, double vx, double vy, double cxy) {
  return ((2.0 * mx * my + kC1) * (2.0 * cxy + kC2)) /
         ((mx * mx + my * my + kC1) * (vx + vy + kC2));
}

void check_same_size(const Image& a, const Image& b) {
  if (a.width != b.width || a.height != b.height) {
    throw Error(ErrorCode::kDimensionMismatch, "images differ in size");
  }
}

}  // namespace

std::vector<double> luma(const Image& img) {
  std::vector<double> y(img.pixels.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    const Rgba& p = img.pixels[i];
    y[i] = 0.2126 * p.r + 0.7152 * p.g + 0.0722 * p.b;
  }
  return y;
}

double ssim_luma(const std::vector<double>& a, const std::vector<double>& b, int w, int h) {
  const std::size_t n = static_cast<std::size_t>(w) * h;
  if (a.size() != n || b.size() != n) throw Error(ErrorCode::kDimensionMismatch, "luma size");
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "empty image");

  if (w <= 2 * kRadius || h <= 2 * kRadius) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
      mx += a[i];
      my += b[i];
    }
    mx /= n;
    my /= n;
    double vx = 0, vy = 0, cxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
      vx += (a[i] - mx) * (a[i] - mx);
      vy += (b[i] - my) * (b[i] - my);
      cxy += (a[i] - mx) * (b[i] - my);
    }
    return ssim_term(mx, my, vx / n, vy / n, cxy / n);
  }

  std::vector<double> aa(n), bb(n), ab(n);
  for (std::size_t i = 0; i < n; ++i) {
    aa[i] = a[i] * a[i];
    bb[i] = b[i] * b[i];
    ab[i] = a[i] * b[i];
  }
  const auto ma = filter_valid(a, w, h);
  const auto mb = filter_valid(b, w, h);
  const auto maa = filter_valid(aa, w, h);
  const auto mbb = filter_valid(bb, w, h);
  const auto mab = filter_valid(ab, w, h);
  double sum = 0.0;
  for (std::size_t i = 0; i < ma.size(); ++i) {
    const double vx = maa[i] - ma[i] * ma[i];
    const double vy = mbb[i] - mb[i] * mb[i];
    const double cxy = mab[i] - ma[i] * mb[i];
    sum += ssim_term(ma[i], mb[i], vx, vy, cxy);
  }
  return sum / static_cast<double>(ma.size());
}

double ssim(const Image& a, const Image& b) {
  check_same_size(a, b);
  return ssim_luma(luma(a), luma(b), a.width, a.height);
}

double psnr(const Image& a, const Image& b) {
  check_same_size(a, b);
  if (a.pixels.empty()) throw Error(ErrorCode::kInvalidArgument, "empty image");
  double se = 0.0;
  for (std::size_t i = 0; i < a.pixels.size(); ++i) {
    const Rgba& p = a.pixels[i];
    const Rgba& q = b.pixels[i];
    const double d[4] = {double(p.r) - q.r, double(p.g) - q.g, double(p.b) - q.b,
                         double(p.a) - q.a};
    for (double v : d) se += v * v;
  }
  const double mse = se / (4.0 * static_cast<double>(a.pixels.size()));
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(1.0 / mse);
}

}  // namespace vdi
