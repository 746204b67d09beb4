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

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fairlens/fairness/metrics.hpp"

namespace fairlens {

// Builds evaluation scenes whose per-group confusion counts reproduce a set of
// published rates as closely as integer counts allow.

struct RateTargets {
  double accuracy = 0;
  double fpr = 0;
  double fnr = 0;
  double ppv = 0;
};

// Upper bounds on the absolute deviation of individual cells. A capped cell is
// a hard constraint; the remaining cells are then fitted minimax.
struct CellCaps {
  std::optional<double> accuracy;
  std::optional<double> fpr;
  std::optional<double> fnr;
  std::optional<double> ppv;
};

struct SolvedCounts {
  ConfusionCounts counts;
  std::array<double, 4> deviation{};  // accuracy, fpr, fnr, ppv
  double max_deviation = 0;
};

/// Exhaustive search over all (tp, fp, fn, tn) summing to `total` with every
/// metric defined. Minimizes the largest absolute cell deviation, breaking ties
/// by the sum of deviations and then by enumeration order (positives, then
/// false negatives, then false positives, ascending). Throws Infeasible when
/// the caps exclude every candidate.
SolvedCounts solve_counts(const RateTargets& target, std::int64_t total = 1000,
                          const CellCaps& caps = {});

struct SceneFixture {
  DatasetManifest manifest;
  std::vector<DetectionRecord> detections;
};

/// Lays each group's counts out as non-overlapping 16x16 regions on a grid,
/// `regions_per_image` per 200x200 image: a TP is a face with an exact
/// detection, FN a face without one, FP a background region with a detection,
/// TN a background region left alone.
SceneFixture synthesize_scene(
    std::string dataset_id,
    const std::vector<std::pair<Demographics, ConfusionCounts>>& groups,
    int regions_per_image = 100);

}  // namespace fairlens
