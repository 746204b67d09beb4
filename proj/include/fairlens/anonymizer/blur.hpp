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

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fairlens/anonymizer/raster.hpp"
#include "fairlens/ingest/types.hpp"
#include "json.hpp"

namespace fairlens::anonymizer {

// Length 2*radius+1, centre at index radius. Throws BadSigma or BadRadius.
std::vector<double> gaussian_kernel(double sigma, int radius);

inline int kernel_radius(double sigma) { return static_cast<int>(std::ceil(3.0 * sigma)); }

// Each side moves outward by margin times the box's extent on that axis,
// then the box is clipped to [0, width] x [0, height].
BoundingBox expand_box(const BoundingBox& box, double margin, int width, int height);

struct BlurConfig {
  std::optional<double> sigma;  // unset: max(2, 0.1 * box diagonal)
  double margin = 0.1;
};

double default_sigma(const BoundingBox& box);

// Integer pixel rectangle [x0, x1) x [y0, y1).
struct PixelRect {
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  bool empty() const { return x1 <= x0 || y1 <= y0; }
  BoundingBox to_box() const { return {double(x0), double(y0), double(x1), double(y1)}; }
};

// Expanded, rounded outward, clipped to the image.
PixelRect blur_rect(const BoundingBox& box, double margin, int width, int height);

/// Replaces the pixels of the expanded region with a separable Gaussian blur
/// (horizontal, then vertical) that clamps at the region's own edges. Alpha
/// and everything outside the region are left as they were. Throws
/// EmptyIntersection when the region misses the image, BadSigma for a
/// non-positive sigma.
RasterImage blur_region(const RasterImage& img, const BoundingBox& box, const BlurConfig& config);

struct AuditEntry {
  BoundingBox original;
  BoundingBox expanded;
  double sigma = 0;
};

struct AnonymizationAudit {
  std::string image_id;
  std::int64_t timestamp_ms = 0;
  std::vector<AuditEntry> regions;
};

struct AnonymizeResult {
  RasterImage image;
  AnonymizationAudit audit;
};

// Blurs each box in order. `timestamp_ms` defaults to the current time.
AnonymizeResult anonymize(const RasterImage& img, const std::vector<BoundingBox>& boxes,
                          const BlurConfig& config, std::string image_id = "",
                          std::optional<std::int64_t> timestamp_ms = std::nullopt);

nlohmann::ordered_json to_json(const AnonymizationAudit& audit);
AnonymizationAudit audit_from_json(const nlohmann::json& j);
// Header record followed by one record per region.
std::string serialize_audit(const AnonymizationAudit& audit);
AnonymizationAudit parse_audit(std::string_view text);

}  // namespace fairlens::anonymizer
