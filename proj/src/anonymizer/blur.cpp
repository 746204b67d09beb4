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

#include "fairlens/anonymizer/blur.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "fairlens/common/error.hpp"
#include "fairlens/common/text_io.hpp"
#include "fairlens/ingest/loaders.hpp"

namespace fairlens::anonymizer {

namespace {
constexpr double kMaxSigma = 1e5;

void check_sigma(double sigma) {
  if (!std::isfinite(sigma) || sigma <= 0 || sigma > kMaxSigma) {
    throw Error("BadSigma", "sigma must be positive and finite", {{"sigma", sigma}});
  }
}
}  // namespace

std::vector<double> gaussian_kernel(double sigma, int radius) {
  check_sigma(sigma);
  if (radius < 1) throw Error("BadRadius", "radius must be at least 1", {{"radius", radius}});
  std::vector<double> half(static_cast<std::size_t>(radius) + 1);
  for (int i = 0; i <= radius; ++i) {
    half[static_cast<std::size_t>(i)] = std::exp(-double(i) * i / (2 * sigma * sigma));
  }
  double sum = half[0];
  for (int i = radius; i >= 1; --i) sum += 2 * half[static_cast<std::size_t>(i)];
  std::vector<double> k(2 * static_cast<std::size_t>(radius) + 1);
  for (int i = 0; i <= radius; ++i) {
    const double v = half[static_cast<std::size_t>(i)] / sum;
    k[static_cast<std::size_t>(radius + i)] = v;
    k[static_cast<std::size_t>(radius - i)] = v;
  }
  return k;
}

BoundingBox expand_box(const BoundingBox& box, double margin, int width, int height) {
  const double dx = margin * box.width();
  const double dy = margin * box.height();
  return {std::clamp(box.x_min - dx, 0.0, double(width)),
          std::clamp(box.y_min - dy, 0.0, double(height)),
          std::clamp(box.x_max + dx, 0.0, double(width)),
          std::clamp(box.y_max + dy, 0.0, double(height))};
}

double default_sigma(const BoundingBox& box) {
  return std::max(2.0, 0.1 * std::hypot(box.width(), box.height()));
}

PixelRect blur_rect(const BoundingBox& box, double margin, int width, int height) {
  const BoundingBox e = expand_box(box, margin, width, height);
  return {static_cast<int>(std::floor(e.x_min)), static_cast<int>(std::floor(e.y_min)),
          static_cast<int>(std::ceil(e.x_max)), static_cast<int>(std::ceil(e.y_max))};
}

RasterImage blur_region(const RasterImage& img, const BoundingBox& box, const BlurConfig& config) {
  validate(img);
  if (!box.valid()) {
    throw Error("InvalidBox", "box must have finite, non-negative, ordered corners",
                nlohmann::json(to_json(box)));
  }
  if (!(config.margin >= 0) || !std::isfinite(config.margin)) {
    throw Error("BadMargin", "margin must be non-negative", {{"margin", config.margin}});
  }
  const double sigma = config.sigma.value_or(default_sigma(box));
  check_sigma(sigma);
  const PixelRect r = blur_rect(box, config.margin, img.width, img.height);
  if (r.empty()) {
    throw Error("EmptyIntersection", "box does not intersect the image",
                nlohmann::json(to_json(box)));
  }
  const int radius = kernel_radius(sigma);
  const std::vector<double> k = gaussian_kernel(sigma, radius);
  const int w = r.x1 - r.x0;
  const int h = r.y1 - r.y0;
  const int colour = std::min(img.channels, 3);

  RasterImage out = img;
  std::vector<double> horiz(static_cast<std::size_t>(w) * h);
  auto clamp_x = [&](int x) { return std::clamp(x, r.x0, r.x1 - 1); };
  auto clamp_y = [&](int y) { return std::clamp(y, r.y0, r.y1 - 1); };
  for (int c = 0; c < colour; ++c) {
    for (int y = r.y0; y < r.y1; ++y) {
      for (int x = r.x0; x < r.x1; ++x) {
        double acc = 0;
        for (int i = -radius; i <= radius; ++i) {
          acc += k[static_cast<std::size_t>(i + radius)] * img.at(clamp_x(x + i), y, c);
        }
        horiz[static_cast<std::size_t>(y - r.y0) * w + (x - r.x0)] = acc;
      }
    }
    for (int y = r.y0; y < r.y1; ++y) {
      for (int x = r.x0; x < r.x1; ++x) {
        double acc = 0;
        for (int i = -radius; i <= radius; ++i) {
          acc += k[static_cast<std::size_t>(i + radius)] *
                 horiz[static_cast<std::size_t>(clamp_y(y + i) - r.y0) * w + (x - r.x0)];
        }
        out.at(x, y, c) = static_cast<std::uint8_t>(std::clamp(std::round(acc), 0.0, 255.0));
      }
    }
  }
  return out;
}

AnonymizeResult anonymize(const RasterImage& img, const std::vector<BoundingBox>& boxes,
                          const BlurConfig& config, std::string image_id,
                          std::optional<std::int64_t> timestamp_ms) {
  validate(img);
  AnonymizeResult result{img, {std::move(image_id), 0, {}}};
  result.audit.timestamp_ms =
      timestamp_ms.value_or(std::chrono::duration_cast<std::chrono::milliseconds>(
                                std::chrono::system_clock::now().time_since_epoch())
                                .count());
  for (const auto& box : boxes) {
    const double sigma = config.sigma.value_or(box.valid() ? default_sigma(box) : 0.0);
    BlurConfig fixed = config;
    fixed.sigma = sigma;
    result.image = blur_region(result.image, box, fixed);
    const PixelRect r = blur_rect(box, config.margin, img.width, img.height);
    result.audit.regions.push_back({box, r.to_box(), sigma});
  }
  return result;
}

namespace {

nlohmann::ordered_json entry_json(const AuditEntry& e) {
  return {{"original", to_json(e.original)}, {"expanded", to_json(e.expanded)},
          {"sigma", e.sigma}};
}

AuditEntry entry_from_json(const nlohmann::json& j, std::size_t line) {
  if (!j.is_object() || !j.contains("original") || !j.contains("expanded") ||
      !j.contains("sigma") || !j["sigma"].is_number()) {
    throw_malformed(line, "audit region needs original, expanded and sigma");
  }
  return {box_from_json(j["original"], line), box_from_json(j["expanded"], line),
          j["sigma"].get<double>()};
}

std::int64_t timestamp_field(const nlohmann::json& j, std::size_t line) {
  if (!j.contains("timestamp_ms") || !j["timestamp_ms"].is_number_integer()) {
    throw_malformed(line, "missing integer timestamp_ms");
  }
  return j["timestamp_ms"].get<std::int64_t>();
}

std::string image_id_field(const nlohmann::json& j, std::size_t line) {
  if (!j.contains("image_id") || !j["image_id"].is_string()) {
    throw_malformed(line, "missing image_id");
  }
  return j["image_id"].get<std::string>();
}

}  // namespace

nlohmann::ordered_json to_json(const AnonymizationAudit& audit) {
  nlohmann::ordered_json regions = nlohmann::ordered_json::array();
  for (const auto& e : audit.regions) regions.push_back(entry_json(e));
  return {{"image_id", audit.image_id},
          {"timestamp_ms", audit.timestamp_ms},
          {"regions", regions}};
}

AnonymizationAudit audit_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("regions") || !j["regions"].is_array()) {
    throw_malformed(0, "audit needs a regions array");
  }
  AnonymizationAudit audit{image_id_field(j, 0), timestamp_field(j, 0), {}};
  for (const auto& r : j["regions"]) audit.regions.push_back(entry_from_json(r, 0));
  return audit;
}

std::string serialize_audit(const AnonymizationAudit& audit) {
  nlohmann::ordered_json header = header_record("anonymization_audit");
  header["image_id"] = audit.image_id;
  header["timestamp_ms"] = audit.timestamp_ms;
  std::string out = header.dump() + "\n";
  for (const auto& e : audit.regions) out += entry_json(e).dump() + "\n";
  return out;
}

AnonymizationAudit parse_audit(std::string_view text) {
  const auto lines = split_records(text);
  if (lines.empty()) throw_malformed(1, "missing header");
  const auto header = parse_record(lines[0]);
  expect_header(header, "anonymization_audit", lines[0].number);
  AnonymizationAudit audit{image_id_field(header, lines[0].number),
                           timestamp_field(header, lines[0].number), {}};
  for (std::size_t i = 1; i < lines.size(); ++i) {
    audit.regions.push_back(entry_from_json(parse_record(lines[i]), lines[i].number));
  }
  return audit;
}

}  // namespace fairlens::anonymizer
