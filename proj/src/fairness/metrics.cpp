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

#include "fairlens/fairness/metrics.hpp"

#include <unordered_map>

#include "fairlens/common/error.hpp"

namespace fairlens {

namespace {

Metric ratio(std::int64_t num, std::int64_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

GroupMetrics group_metrics(const ConfusionCounts& c) {
  return {ratio(c.tp + c.tn, c.total()), ratio(c.fp, c.fp + c.tn),
          ratio(c.fn, c.fn + c.tp), ratio(c.tp, c.tp + c.fp)};
}

std::map<std::string, ConfusionCounts> confusion_by_group(
    const MatchResult& match, const DatasetManifest& manifest,
    std::span<const DetectionRecord> detections, Grouping grouping,
    const GroupingOptions& options) {
  std::unordered_map<std::string_view, const FaceInstance*> by_id;
  for (const auto& f : manifest.instances) by_id.emplace(f.instance_id, &f);

  auto instance = [&](const std::string& id) -> const FaceInstance& {
    auto it = by_id.find(id);
    if (it == by_id.end()) {
      throw Error("UnknownInstance", "match refers to unknown instance " + id,
                  {{"id", id}});
    }
    return *it->second;
  };
  auto checked = [&](std::string value, const std::string& image_id) {
    if (!options.allow_unknown && value == kUnknown) {
      throw Error("MissingGroup",
                  "image " + image_id + " has no " +
                      std::string(to_string(grouping)) + " attribute",
                  {{"image_id", image_id}});
    }
    return value;
  };
  auto region_group = [&](const FaceInstance& f) {
    return checked(group_value(f.demographics, grouping), f.image_id);
  };

  std::map<std::string, ConfusionCounts> out;
  for (const auto& pair : match.pairs) {
    const auto& f = instance(pair.instance_id);
    auto& c = out[region_group(f)];
    (f.region_kind == RegionKind::Positive ? c.tp : c.fp) += 1;
  }
  for (std::size_t d : match.unmatched_detections) {
    const auto& image_id = detections[d].image_id;
    const ManifestImage* img = manifest.find_image(image_id);
    if (img == nullptr) {
      throw Error("UnknownImage", "detection on unknown image " + image_id,
                  {{"image_id", image_id}});
    }
    out[checked(group_value(img->group, grouping), image_id)].fp += 1;
  }
  for (const auto& id : match.unmatched_positives) {
    out[region_group(instance(id))].fn += 1;
  }
  for (const auto& id : match.untouched_negatives) {
    out[region_group(instance(id))].tn += 1;
  }
  return out;
}

}  // namespace fairlens
