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

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fairlens/analytics/distance.hpp"

namespace fairlens::analytics {

inline constexpr int kNoise = -1;

// labels[i] belongs to ids[i]; cluster ids run 0..cluster_count-1.
struct ClusterAssignment {
  std::vector<std::string> ids;
  std::vector<int> labels;
  int cluster_count = 0;

  std::optional<int> label_of(std::string_view id) const;
  std::size_t noise_count() const;
};

/// Density-based clustering over a precomputed distance matrix. A point is a
/// core point when at least `min_pts` points, itself included, lie within
/// distance `eps`. Clusters are numbered in the order their first core point
/// appears in id order; a border point joins the first cluster that reaches
/// it. Throws BadParameter for eps <= 0 or min_pts < 1.
ClusterAssignment dbscan(const DistanceMatrix& dist, double eps, int min_pts);

}  // namespace fairlens::analytics
