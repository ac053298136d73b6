// Copyright 2026 The VDI Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "vdi/image.hpp"

namespace vdi {

/// BT.709 luma of each pixel, row-major.
std::vector<double> luma(const Image& img);

/// Mean SSIM on luma: 11x11 Gaussian window (sigma 1.5), valid windows only,
/// k1 = 0.01, k2 = 0.03, data range 1, population (biased) moments.
/// Images smaller than the window fall back to a single global window.
double ssim(const Image& a, const Image& b);
double ssim_luma(const std::vector<double>& a, const std::vector<double>& b, int width,
                 int height);

/// 10 log10(1 / MSE) over all four channels; +inf for identical images.
double psnr(const Image& a, const Image& b);

}  // namespace vdi
