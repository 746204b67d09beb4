// Copyright 2026 The FairLens Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "check_result.hpp"
#include "fairlens/anonymizer/blur.hpp"

namespace fairlens::testing {

using fairlens::anonymizer::PixelRect;
using fairlens::anonymizer::RasterImage;
using fairlens::anonymizer::kernel_radius;

inline RasterImage random_image(std::mt19937_64& rng, int w, int h, int channels) {
  RasterImage img = RasterImage::filled(w, h, channels);
  std::uniform_int_distribution<int> byte(0, 255);
  for (auto& v : img.data) v = static_cast<std::uint8_t>(byte(rng));
  return img;
}

inline BoundingBox random_box(std::mt19937_64& rng, int w, int h, int max_side) {
  std::uniform_real_distribution<double> fx(0, w - 1), fy(0, h - 1), side(0.5, max_side);
  const double x = fx(rng), y = fy(rng);
  return {x, y, x + side(rng), y + side(rng)};
}

// Direct 2-D convolution with the outer-product kernel, clamped to the region.
inline RasterImage naive_blur(const RasterImage& img, const PixelRect& r, double sigma) {
  const int radius = kernel_radius(sigma);
  std::vector<double> g(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0;
  for (int i = -radius; i <= radius; ++i) {
    g[static_cast<std::size_t>(i + radius)] = std::exp(-(i * i) / (2 * sigma * sigma));
    sum += g[static_cast<std::size_t>(i + radius)];
  }
  RasterImage out = img;
  for (int c = 0; c < std::min(img.channels, 3); ++c) {
    for (int y = r.y0; y < r.y1; ++y) {
      for (int x = r.x0; x < r.x1; ++x) {
        double acc = 0;
        for (int dy = -radius; dy <= radius; ++dy) {
          for (int dx = -radius; dx <= radius; ++dx) {
            const int sx = std::clamp(x + dx, r.x0, r.x1 - 1);
            const int sy = std::clamp(y + dy, r.y0, r.y1 - 1);
            acc += g[static_cast<std::size_t>(dx + radius)] * g[static_cast<std::size_t>(dy + radius)] *
                   img.at(sx, sy, c);
          }
        }
        out.at(x, y, c) = static_cast<std::uint8_t>(std::clamp(std::round(acc / (sum * sum)), 0.0, 255.0));
      }
    }
  }
  return out;
}

inline int max_channel_difference(const RasterImage& a, const RasterImage& b) {
  int worst = 0;
  for (std::size_t i = 0; i < a.data.size(); ++i) worst = std::max(worst, std::abs(a.data[i] - b.data[i]));
  return worst;
}

inline CheckResult kernel_sum_check(int trials, std::uint64_t seed) {
  using namespace fairlens::anonymizer;
  CheckResult result;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> sig(1e-3, 50.0);
  double worst = 0;
  for (int trial = 0; trial < trials; ++trial) {
    const double sigma = trial == 0 ? 50.0 : sig(rng);
    const int r = kernel_radius(sigma);
    auto k = gaussian_kernel(sigma, r);
    if (k.size() != static_cast<std::size_t>(2 * r + 1)) {
      result.fail("kernel length is not 2r+1 for sigma " + std::to_string(sigma));
      continue;
    }
    double sum = 0;
    for (double v : k) sum += v;
    worst = std::max(worst, std::abs(sum - 1.0));
    for (int i = 1; i <= r; ++i) {
      if (k[static_cast<std::size_t>(r - i)] != k[static_cast<std::size_t>(r + i)]) {
        result.fail("kernel not symmetric for sigma " + std::to_string(sigma));
      }
    }
  }
  if (worst > 1e-12) result.fail("kernel sum deviates from 1 by " + sci(worst));
  result.note(std::to_string(trials) + " kernels, max |sum-1| " + sci(worst));
  return result;
}

inline CheckResult blur_oracle_check(int trials, std::uint64_t seed) {
  using namespace fairlens::anonymizer;
  CheckResult result;
  std::mt19937_64 rng(seed);
  int worst = 0;
  for (int trial = 0; trial < trials; ++trial) {
    const int channels = trial % 2 ? 4 : 3;
    auto img = random_image(rng, 40, 36, channels);
    auto box = random_box(rng, 40, 36, 28);
    const double sigma = std::uniform_real_distribution<double>(0.3, 6.0)(rng);
    BlurConfig cfg{.sigma = sigma, .margin = 0.1};
    auto rect = blur_rect(box, cfg.margin, img.width, img.height);
    worst = std::max(worst, max_channel_difference(blur_region(img, box, cfg),
                                                   naive_blur(img, rect, sigma)));
  }
  if (worst > 1) result.fail("separable blur differs from the 2-D convolution by " + std::to_string(worst));
  result.note(std::to_string(trials) + " regions, max channel difference " + std::to_string(worst));
  return result;
}

// Pixels outside the blurred rectangle and alpha are untouched; a constant
// region stays constant.
inline CheckResult blur_locality_check(int trials, std::uint64_t seed) {
  using namespace fairlens::anonymizer;
  CheckResult result;
  std::mt19937_64 rng(seed);
  for (int trial = 0; trial < trials && result.ok; ++trial) {
    const int w = std::uniform_int_distribution<int>(1, 48)(rng);
    const int h = std::uniform_int_distribution<int>(1, 48)(rng);
    const int channels = trial % 3 ? 3 : 4;
    auto img = random_image(rng, w, h, channels);
    auto box = random_box(rng, w, h, 30);
    BlurConfig cfg{.sigma = std::uniform_real_distribution<double>(0.2, 8.0)(rng),
                   .margin = std::uniform_real_distribution<double>(0.0, 0.5)(rng)};
    auto rect = blur_rect(box, cfg.margin, w, h);
    auto out = blur_region(img, box, cfg);
    const std::string at = " in trial " + std::to_string(trial);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const bool inside = x >= rect.x0 && x < rect.x1 && y >= rect.y0 && y < rect.y1;
        for (int c = 0; c < channels; ++c) {
          if (!inside && out.at(x, y, c) != img.at(x, y, c)) result.fail("pixel outside the region changed" + at);
          if (c == 3 && out.at(x, y, c) != img.at(x, y, c)) result.fail("alpha changed" + at);
        }
      }
    }

    RasterImage flat = img;
    std::uint8_t colour[3] = {static_cast<std::uint8_t>(rng()), static_cast<std::uint8_t>(rng()),
                              static_cast<std::uint8_t>(rng())};
    for (int y = rect.y0; y < rect.y1; ++y) {
      for (int x = rect.x0; x < rect.x1; ++x) {
        for (int c = 0; c < 3; ++c) flat.at(x, y, c) = colour[c];
      }
    }
    if (!(blur_region(flat, box, cfg) == flat)) result.fail("constant region changed" + at);
  }
  result.note(std::to_string(trials) + " images, outside pixels and alpha unchanged");
  return result;
}

}  // namespace fairlens::testing
