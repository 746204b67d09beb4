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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fairlens/fairness/metrics.hpp"
#include "json.hpp"

namespace fairlens {

struct GroupRow {
  std::string group;
  ConfusionCounts counts;
  GroupMetrics metrics;

  friend bool operator==(const GroupRow&, const GroupRow&) = default;
};

struct FairnessReport {
  std::string dataset_id;
  Grouping grouping = Grouping::Ethnicity;
  double threshold = kDefaultMatchThreshold;
  // Ordered for display: registered taxonomy order first, then the remaining
  // labels lexicographically, "Unknown" last.
  std::vector<GroupRow> rows;

  const GroupRow* find(std::string_view group) const;
  friend bool operator==(const FairnessReport&, const FairnessReport&) = default;
};

struct ReportOptions {
  GroupingOptions grouping;
  TaxonomyRegistry taxonomy = TaxonomyRegistry::defaults();
};

FairnessReport fairness_report(const DatasetManifest& manifest,
                               std::span<const DetectionRecord> detections,
                               double threshold, Grouping grouping,
                               const ReportOptions& options = {});

// Display order for group labels (see FairnessReport::rows).
std::vector<std::string> order_groups(std::vector<std::string> groups,
                                      std::string_view dataset_id,
                                      Grouping grouping,
                                      const TaxonomyRegistry& taxonomy);

enum class MetricKind { Accuracy, Fpr, Fnr, Ppv };
inline constexpr std::array<MetricKind, 4> kAllMetrics = {
    MetricKind::Accuracy, MetricKind::Fpr, MetricKind::Fnr, MetricKind::Ppv};
std::string_view metric_key(MetricKind m);    // "accuracy", ...
std::string_view metric_label(MetricKind m);  // "Prediction Accuracy", ...
Metric metric_value(const GroupMetrics& g, MetricKind m);

struct MetricDelta {
  Metric before;
  Metric after;
  Metric absolute;  // after - before
  Metric relative;  // (after - before) / before; undefined when before is 0
};

struct GroupDelta {
  std::string group;
  std::array<MetricDelta, 4> metrics;  // indexed like kAllMetrics

  const MetricDelta& operator[](MetricKind m) const {
    return metrics[static_cast<std::size_t>(m)];
  }
};

struct DeltaReport {
  Grouping grouping = Grouping::Ethnicity;
  std::vector<GroupDelta> rows;

  const GroupDelta* find(std::string_view group) const;
};

// Both reports must share the grouping key and the group set.
DeltaReport compare_reports(const FairnessReport& before,
                            const FairnessReport& after);

nlohmann::ordered_json to_json(const FairnessReport& r);
FairnessReport report_from_json(const nlohmann::json& j);
nlohmann::ordered_json to_json(const DeltaReport& r);

}  // namespace fairlens
