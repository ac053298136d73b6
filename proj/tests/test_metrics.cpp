// Copyright 2026 The VDI Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <limits>

#include "support.hpp"
#include "vdi/error.hpp"
#include "vdi/metrics.hpp"

using namespace vdi;
using namespace vdi::test;

namespace {

// Same image streams as tests/oracles/metrics_oracle.py.
Image noise_image(int w, int h, std::uint64_t seed) {
  Image img(w, h);
  std::uint64_t s = seed;
  for (auto& p : img.pixels) {
    p.r = static_cast<float>(unit_double(splitmix64(s)));
    p.g = static_cast<float>(unit_double(splitmix64(s)));
    p.b = static_cast<float>(unit_double(splitmix64(s)));
    p.a = static_cast<float>(unit_double(splitmix64(s)));
  }
  return img;
}

Image perturb(const Image& in, std::uint64_t seed, double amp) {
  Image out = in;
  std::uint64_t s = seed;
  auto f = [&](float v) {
    const double d = static_cast<double>(v) + amp * (unit_double(splitmix64(s)) - 0.5);
    return static_cast<float>(std::clamp(d, 0.0, 1.0));
  };
  for (auto& p : out.pixels) {
    p.r = f(p.r);
    p.g = f(p.g);
    p.b = f(p.b);
    p.a = f(p.a);
  }
  return out;
}

Image wave_image(int w, int h) {
  Image img(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const auto v = static_cast<float>(0.5 + 0.4 * std::sin(0.3 * x) * std::cos(0.2 * y));
      img.at(x, y) = {v, v, v, 1.f};
    }
  return img;
}

}  // namespace

TEST_CASE("SSIM and PSNR match the frozen scikit-image values") {
  struct Case {
    const char* name;
    Image a, b;
    double ssim, psnr;
  };
  const Image n1 = noise_image(32, 24, 11);
  const Image w1 = wave_image(40, 40);
  const Image n2 = noise_image(8, 8, 5);
  const Case cases[] = {
      {"noise_32x24", n1, perturb(n1, 12, 0.2), 0.9802512359609068, 25.133394819297795},
      {"wave_40x40", w1, perturb(w1, 7, 0.05), 0.993938760198052, 37.483822696769394},
      {"noise_8x8", n2, perturb(n2, 6, 0.3), 0.9681904747656268, 21.561199912545174},
  };
  for (const Case& c : cases) {
    CAPTURE(c.name);
    CHECK(ssim(c.a, c.b) == doctest::Approx(c.ssim).epsilon(1e-9));
    CHECK(psnr(c.a, c.b) == doctest::Approx(c.psnr).epsilon(1e-9));
  }
}

TEST_CASE("metric identities and bounds") {
  const Image a = noise_image(24, 20, 3);
  CHECK(ssim(a, a) == doctest::Approx(1.0));
  CHECK(std::isinf(psnr(a, a)));
  CHECK(psnr(a, a) > 0);

  const Image black(20, 20, {0, 0, 0, 1});
  const Image white(20, 20, {1, 1, 1, 1});
  CHECK(ssim(black, white) < 0.05);

  // uniform 0.1 error on every channel: MSE 0.01 -> 20 dB
  const Image g1(16, 16, {0.2f, 0.2f, 0.2f, 0.2f});
  const Image g2(16, 16, {0.3f, 0.3f, 0.3f, 0.3f});
  CHECK(psnr(g1, g2) == doctest::Approx(20.0).epsilon(1e-5));

  const Image b = perturb(a, 9, 0.3);
  CHECK(ssim(a, b) == doctest::Approx(ssim(b, a)).epsilon(1e-12));
  CHECK(psnr(a, b) == doctest::Approx(psnr(b, a)).epsilon(1e-12));
  CHECK(ssim(a, b) < 1.0);
}

TEST_CASE("more noise lowers both metrics") {
  const Image a = wave_image(32, 32);
  double prev_s = 1.0 + 1e-12, prev_p = std::numeric_limits<double>::infinity();
  for (double amp : {0.02, 0.1, 0.3, 0.6}) {
    const Image b = perturb(a, 21, amp);
    const double s = ssim(a, b), p = psnr(a, b);
    CHECK(s < prev_s);
    CHECK(p < prev_p);
    prev_s = s;
    prev_p = p;
  }
}

TEST_CASE("luma weights") {
  Image img(1, 1, {1.f, 0.f, 0.f, 1.f});
  CHECK(luma(img)[0] == doctest::Approx(0.2126));
  img.at(0, 0) = {0.f, 1.f, 0.f, 1.f};
  CHECK(luma(img)[0] == doctest::Approx(0.7152));
  img.at(0, 0) = {0.f, 0.f, 1.f, 0.f};
  CHECK(luma(img)[0] == doctest::Approx(0.0722));
}

TEST_CASE("metrics reject mismatched sizes") {
  const Image a(8, 8), b(8, 9);
  auto code = [](auto&& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kInvalidArgument;
  };
  CHECK(code([&] { ssim(a, b); }) == ErrorCode::kDimensionMismatch);
  CHECK(code([&] { psnr(a, b); }) == ErrorCode::kDimensionMismatch);
  CHECK(code([&] { max_abs_diff(a, b); }) == ErrorCode::kDimensionMismatch);
}
