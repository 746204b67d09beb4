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

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "fairlens/ingest/types.hpp"

namespace fairlens {

// Intersection over union by area. Symmetric, 0 for disjoint boxes.
double iou(const BoundingBox& a, const BoundingBox& b);

struct MatchPair {
  std::size_t detection_index;
  std::string instance_id;
  double iou;

  friend bool operator==(const MatchPair&, const MatchPair&) = default;
};

struct MatchResult {
  std::vector<MatchPair> pairs;
  std::vector<std::size_t> unmatched_detections;
  std::vector<std::string> unmatched_positives;
  std::vector<std::string> untouched_negatives;
  double threshold = 0.5;

  friend bool operator==(const MatchResult&, const MatchResult&) = default;
};

inline constexpr double kDefaultMatchThreshold = 0.5;

/// Greedy one-to-one matching, image by image. Detections are visited by
/// descending confidence (file order breaks ties); each claims the unclaimed
/// region, face or background, with the highest IoU >= `threshold`, ties going
/// to the lexicographically smallest instance_id.
///
/// `extra_images` lists images known to the caller that may have no regions
/// (e.g. manifest images without instances); a detection on any other image
/// fails with UnknownImage. Threshold must lie in (0, 1].
MatchResult match_detections(std::span<const FaceInstance> instances,
                             std::span<const DetectionRecord> detections,
                             double threshold,
                             std::span<const std::string> extra_images = {});

}  // namespace fairlens
