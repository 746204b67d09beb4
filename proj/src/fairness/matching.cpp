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

#include "fairlens/fairness/matching.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "fairlens/common/error.hpp"

namespace fairlens {

double iou(const BoundingBox& a, const BoundingBox& b) {
  const double iw = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
  const double ih = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
  if (iw <= 0 || ih <= 0) return 0.0;
  const double inter = iw * ih;
  return inter / (a.area() + b.area() - inter);
}

MatchResult match_detections(std::span<const FaceInstance> instances,
                             std::span<const DetectionRecord> detections,
                             double threshold,
                             std::span<const std::string> extra_images) {
  if (!(threshold > 0 && threshold <= 1)) {
    throw Error("ThresholdOutOfRange", "matching threshold must lie in (0, 1]",
                {{"tau", threshold}});
  }

  std::map<std::string, std::vector<std::size_t>, std::less<>> regions_by_image;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    regions_by_image[instances[i].image_id].push_back(i);
  }
  for (const auto& id : extra_images) regions_by_image.try_emplace(id);

  std::map<std::string, std::vector<std::size_t>, std::less<>> dets_by_image;
  for (std::size_t d = 0; d < detections.size(); ++d) {
    const auto& image = detections[d].image_id;
    if (!regions_by_image.contains(image)) {
      throw Error("UnknownImage", "detection on unknown image " + image,
                  {{"image_id", image}});
    }
    dets_by_image[image].push_back(d);
  }

  MatchResult result;
  result.threshold = threshold;
  std::vector<bool> claimed(instances.size(), false);

  for (auto& [image, dets] : dets_by_image) {
    std::stable_sort(dets.begin(), dets.end(), [&](std::size_t a, std::size_t b) {
      return detections[a].confidence > detections[b].confidence;
    });
    const auto& regions = regions_by_image.at(image);
    for (std::size_t d : dets) {
      std::size_t best = instances.size();
      double best_iou = -1;
      for (std::size_t r : regions) {
        if (claimed[r]) continue;
        const double o = iou(detections[d].box, instances[r].box);
        if (o < threshold) continue;
        if (o > best_iou ||
            (o == best_iou && instances[r].instance_id < instances[best].instance_id)) {
          best = r;
          best_iou = o;
        }
      }
      if (best == instances.size()) {
        result.unmatched_detections.push_back(d);
      } else {
        claimed[best] = true;
        result.pairs.push_back({d, instances[best].instance_id, best_iou});
      }
    }
  }

  std::sort(result.unmatched_detections.begin(), result.unmatched_detections.end());
  for (std::size_t r = 0; r < instances.size(); ++r) {
    if (claimed[r]) continue;
    auto& bucket = instances[r].region_kind == RegionKind::Positive
                       ? result.unmatched_positives
                       : result.untouched_negatives;
    bucket.push_back(instances[r].instance_id);
  }
  std::sort(result.unmatched_positives.begin(), result.unmatched_positives.end());
  std::sort(result.untouched_negatives.begin(), result.untouched_negatives.end());
  return result;
}

}  // namespace fairlens
