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

#include "fairlens/anonymizer/raster.hpp"

#include <png.h>

#include <cctype>
#include <charconv>
#include <cstring>

#include "fairlens/common/error.hpp"
#include "fairlens/common/text_io.hpp"

namespace fairlens::anonymizer {

namespace {

[[noreturn]] void invalid(const std::string& why) {
  throw Error("InvalidImage", why);
}

}  // namespace

RasterImage RasterImage::filled(int width, int height, int channels, std::uint8_t value) {
  RasterImage img{width, height, channels, {}};
  if (width < 1 || height < 1 || (channels != 3 && channels != 4)) {
    invalid("image needs positive dimensions and 3 or 4 channels");
  }
  img.data.assign(static_cast<std::size_t>(width) * height * channels, value);
  return img;
}

void validate(const RasterImage& img) {
  if (img.width < 1 || img.height < 1 || (img.channels != 3 && img.channels != 4)) {
    invalid("image needs positive dimensions and 3 or 4 channels");
  }
  if (img.data.size() != static_cast<std::size_t>(img.width) * img.height * img.channels) {
    invalid("pixel buffer length does not match the dimensions");
  }
}

RasterImage decode_png(std::span<const std::uint8_t> bytes) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    invalid(std::string("cannot read PNG: ") + image.message);
  }
  const bool alpha = (image.format & PNG_FORMAT_FLAG_ALPHA) != 0;
  image.format = alpha ? PNG_FORMAT_RGBA : PNG_FORMAT_RGB;
  RasterImage img;
  img.width = static_cast<int>(image.width);
  img.height = static_cast<int>(image.height);
  img.channels = alpha ? 4 : 3;
  img.data.resize(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, img.data.data(), 0, nullptr)) {
    std::string why = image.message;
    png_image_free(&image);
    invalid("cannot decode PNG: " + why);
  }
  validate(img);
  return img;
}

std::vector<std::uint8_t> encode_png(const RasterImage& img) {
  validate(img);
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width);
  image.height = static_cast<png_uint_32>(img.height);
  image.format = img.has_alpha() ? PNG_FORMAT_RGBA : PNG_FORMAT_RGB;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&image, nullptr, &size, 0, img.data.data(), 0, nullptr)) {
    throw Error("IoFailure", std::string("cannot encode PNG: ") + image.message);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&image, out.data(), &size, 0, img.data.data(), 0, nullptr)) {
    throw Error("IoFailure", std::string("cannot encode PNG: ") + image.message);
  }
  out.resize(size);
  return out;
}

namespace {

class PpmTokens {
 public:
  explicit PpmTokens(std::string_view text) : text_(text) {}

  std::string_view next() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
    const std::size_t start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) &&
           text_[pos_] != '#') {
      ++pos_;
    }
    return text_.substr(start, pos_ - start);
  }

  int number(int max) {
    const auto tok = next();
    int v = -1;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (tok.empty() || ec != std::errc() || p != tok.data() + tok.size() || v < 0 || v > max) {
      invalid("bad PPM value '" + std::string(tok) + "'");
    }
    return v;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

RasterImage decode_ppm(std::string_view text) {
  PpmTokens tokens(text);
  if (tokens.next() != "P3") invalid("not a plain PPM (P3) file");
  constexpr int kMaxSide = 1 << 15;
  const int width = tokens.number(kMaxSide);
  const int height = tokens.number(kMaxSide);
  if (tokens.number(65535) != 255) invalid("only maxval 255 is supported");
  RasterImage img = RasterImage::filled(width, height, 3);
  for (auto& v : img.data) v = static_cast<std::uint8_t>(tokens.number(255));
  if (!tokens.next().empty()) invalid("trailing data after PPM pixels");
  return img;
}

std::string encode_ppm(const RasterImage& img) {
  validate(img);
  std::string out = "P3\n" + std::to_string(img.width) + " " + std::to_string(img.height) +
                    "\n255\n";
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      for (int c = 0; c < 3; ++c) {
        if (x > 0 || c > 0) out += ' ';
        out += std::to_string(img.at(x, y, c));
      }
    }
    out += '\n';
  }
  return out;
}

RasterImage decode_image(std::span<const std::uint8_t> bytes) {
  static constexpr std::uint8_t kPngMagic[] = {0x89, 'P', 'N', 'G'};
  if (bytes.size() >= 4 && std::memcmp(bytes.data(), kPngMagic, 4) == 0) {
    return decode_png(bytes);
  }
  if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '3') {
    return decode_ppm({reinterpret_cast<const char*>(bytes.data()), bytes.size()});
  }
  invalid("unrecognised image format (expected PNG or plain PPM)");
}

RasterImage load_image(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  return decode_image({reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size()});
}

void save_image(const RasterImage& img, const std::filesystem::path& path) {
  if (path.extension() == ".ppm") {
    write_file_atomic(path, encode_ppm(img));
    return;
  }
  const auto bytes = encode_png(img);
  write_file_atomic(path, std::string_view(reinterpret_cast<const char*>(bytes.data()),
                                           bytes.size()));
}

}  // namespace fairlens::anonymizer
