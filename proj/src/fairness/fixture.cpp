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

#include "fairlens/fairness/fixture.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>

#include "fairlens/common/error.hpp"

namespace fairlens {

SolvedCounts solve_counts(const RateTargets& t, std::int64_t total,
                          const CellCaps& caps) {
  if (total < 2) throw Error("BadParameter", "total must be at least 2");
  constexpr double kSlack = 1e-12;
  constexpr double kTie = 1e-15;
  auto within = [](const std::optional<double>& cap, double dev) {
    return !cap || dev <= *cap + kSlack;
  };

  const double n = static_cast<double>(total);
  double best_key = std::numeric_limits<double>::infinity();
  double best_sum = best_key;
  std::optional<SolvedCounts> best;

  for (std::int64_t positives = 1; positives < total; ++positives) {
    for (std::int64_t fn = 0; fn <= positives; ++fn) {
      const std::int64_t tp = positives - fn;
      const double dev_fnr =
          std::abs(static_cast<double>(fn) / static_cast<double>(positives) - t.fnr);
      if (dev_fnr > best_key || !within(caps.fnr, dev_fnr)) continue;
      for (std::int64_t fp = 0; fp <= total - positives; ++fp) {
        const std::int64_t tn = total - positives - fp;
        if (tp + fp == 0 || fp + tn == 0) continue;
        const std::array<double, 4> dev = {
            std::abs(static_cast<double>(tp + tn) / n - t.accuracy),
            std::abs(static_cast<double>(fp) / static_cast<double>(fp + tn) - t.fpr),
            dev_fnr,
            std::abs(static_cast<double>(tp) / static_cast<double>(tp + fp) - t.ppv)};
        if (!within(caps.accuracy, dev[0]) || !within(caps.fpr, dev[1]) ||
            !within(caps.ppv, dev[3])) {
          continue;
        }
        const double key = *std::max_element(dev.begin(), dev.end());
        const double sum = dev[0] + dev[1] + dev[2] + dev[3];
        if (key < best_key - kTie || (key < best_key + kTie && sum < best_sum)) {
          best_key = key;
          best_sum = sum;
          best = SolvedCounts{{tp, fp, fn, tn}, dev, key};
        }
      }
    }
  }
  if (!best) throw Error("Infeasible", "no counts satisfy the cell caps");
  return *best;
}

namespace {

std::string slug(const std::string& s) {
  std::string out;
  for (char c : s) {
    out += std::isalnum(static_cast<unsigned char>(c))
               ? static_cast<char>(std::tolower(static_cast<unsigned char>(c)))
               : '_';
  }
  return out;
}

}  // namespace

SceneFixture synthesize_scene(
    std::string dataset_id,
    const std::vector<std::pair<Demographics, ConfusionCounts>>& groups,
    int regions_per_image) {
  if (regions_per_image < 1 || regions_per_image > 100) {
    throw Error("BadParameter", "regions_per_image must lie in [1, 100]");
  }
  constexpr double kCell = 20;
  constexpr double kInset = 2;
  constexpr double kSide = 16;
  constexpr int kColumns = 10;

  SceneFixture scene;
  scene.manifest.dataset_id = std::move(dataset_id);
  scene.manifest.provenance = "synthesized from target confusion counts";

  for (const auto& [demo, counts] : groups) {
    const std::string prefix =
        scene.manifest.dataset_id + "-" + slug(demo.ethnicity) + "-" +
        slug(std::string(to_string(demo.gender))) + "-" +
        slug(std::string(to_string(demo.age_group)));
    struct Unit { RegionKind kind; bool detected; };
    std::vector<Unit> units;
    units.insert(units.end(), counts.tp, {RegionKind::Positive, true});
    units.insert(units.end(), counts.fn, {RegionKind::Positive, false});
    units.insert(units.end(), counts.fp, {RegionKind::Negative, true});
    units.insert(units.end(), counts.tn, {RegionKind::Negative, false});

    for (std::size_t u = 0; u < units.size(); ++u) {
      const std::size_t image_index = u / regions_per_image;
      const int slot = static_cast<int>(u % regions_per_image);
      char image_id[256];
      std::snprintf(image_id, sizeof image_id, "%s-%04zu", prefix.c_str(), image_index);
      if (slot == 0) scene.manifest.images.push_back({image_id, std::nullopt, demo});

      const double x = (slot % kColumns) * kCell + kInset;
      const double y = (slot / kColumns) * kCell + kInset;
      const BoundingBox box{x, y, x + kSide, y + kSide};
      char instance_id[300];
      std::snprintf(instance_id, sizeof instance_id, "%s-r%02d", image_id, slot);
      scene.manifest.instances.push_back(
          {instance_id, image_id, box, units[u].kind, demo, std::nullopt});
      if (units[u].detected) scene.detections.push_back({image_id, box, 0.9});
    }
  }
  return scene;
}

}  // namespace fairlens
