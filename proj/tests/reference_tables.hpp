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

// Published per-group detection rates for the four RFW ethnicity subsets
// (baseline detector, and the same detector after training on a balanced set),
// with the per-group cell caps and frozen integer counts used to replay them.

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "fairlens/fairness/fixture.hpp"

namespace fairlens::testing {

struct ReferenceGroup {
  const char* group;
  RateTargets published;
  CellCaps caps;
  ConfusionCounts frozen;  // solve_counts(published, 1000, caps)
};

// Columns: accuracy, FPR, FNR, PPV.
inline const std::array<ReferenceGroup, 4> kBaselineTable = {{
    {"Asian", {0.91, 0.07, 0.05, 0.78}, {.ppv = 0.0025}, {224, 63, 15, 698}},
    {"Indian", {0.95, 0.04, 0.08, 0.93}, {.accuracy = 0.0}, {314, 24, 26, 636}},
    {"Black", {0.92, 0.08, 0.04, 0.82}, {.accuracy = 0.002}, {274, 64, 14, 648}},
    {"White", {0.97, 0.005, 0.14, 0.98}, {.accuracy = 0.0, .fpr = 0.0005}, {164, 4, 26, 806}},
}};

inline const std::array<ReferenceGroup, 4> kRebalancedTable = {{
    {"Asian", {0.96, 0.01, 0.05, 0.93}, {.ppv = 0.0025}, {217, 16, 14, 753}},
    {"Indian", {0.95, 0.01, 0.03, 0.92}, {.accuracy = 0.0}, {415, 23, 27, 535}},
    {"Black", {0.97, 0.008, 0.04, 0.94}, {.accuracy = 0.002}, {259, 14, 14, 713}},
    {"White", {0.98, 0.005, 0.04, 0.98}, {.accuracy = 0.0}, {306, 6, 14, 674}},
}};

inline SceneFixture reference_scene(const std::array<ReferenceGroup, 4>& table) {
  std::vector<std::pair<Demographics, ConfusionCounts>> groups;
  for (const auto& g : table) {
    groups.push_back({Demographics{g.group, Gender::Unknown, AgeGroup::Unknown}, g.frozen});
  }
  return synthesize_scene("rfw", groups);
}

}  // namespace fairlens::testing
