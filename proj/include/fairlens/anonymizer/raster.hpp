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

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fairlens::anonymizer {

// 8-bit RGB or RGBA pixels, row-major, channels interleaved.
struct RasterImage {
  int width = 0;
  int height = 0;
  int channels = 3;
  std::vector<std::uint8_t> data;

  // Throws InvalidImage unless width, height >= 1 and channels is 3 or 4.
  static RasterImage filled(int width, int height, int channels, std::uint8_t value = 0);

  std::uint8_t& at(int x, int y, int c) {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  std::uint8_t at(int x, int y, int c) const {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  bool has_alpha() const { return channels == 4; }

  friend bool operator==(const RasterImage&, const RasterImage&) = default;
};

// Throws InvalidImage when the dimensions and data length disagree.
void validate(const RasterImage& img);

RasterImage decode_png(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_png(const RasterImage& img);

// Plain PPM (P3, maxval 255). Alpha is dropped on output.
RasterImage decode_ppm(std::string_view text);
std::string encode_ppm(const RasterImage& img);

// Detects the format from the leading bytes. Throws InvalidImage.
RasterImage decode_image(std::span<const std::uint8_t> bytes);
RasterImage load_image(const std::filesystem::path& path);
// Writes PPM for a ".ppm" extension and PNG otherwise, atomically.
void save_image(const RasterImage& img, const std::filesystem::path& path);

}  // namespace fairlens::anonymizer
