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

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "fairlens/fairness/matching.hpp"
#include "fairlens/ingest/types.hpp"

namespace fairlens {

struct ConfusionCounts {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  std::int64_t tn = 0;

  std::int64_t total() const { return tp + fp + fn + tn; }
  ConfusionCounts& operator+=(const ConfusionCounts& o) {
    tp += o.tp; fp += o.fp; fn += o.fn; tn += o.tn;
    return *this;
  }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

// nullopt marks a metric whose denominator is zero.
using Metric = std::optional<double>;

struct GroupMetrics {
  Metric accuracy;
  Metric fpr;
  Metric fnr;
  Metric ppv;

  friend bool operator==(const GroupMetrics&, const GroupMetrics&) = default;
};

GroupMetrics group_metrics(const ConfusionCounts& c);

struct GroupingOptions {
  // When false, a region or image whose attribute is Unknown raises
  // MissingGroup instead of being counted under "Unknown".
  bool allow_unknown = true;
};

/// Attributes every region and every detection to a group: TP/FN/TN to the
/// region's own group, FP to the matched background region's group, and
/// unmatched detections to their image's group.
std::map<std::string, ConfusionCounts> confusion_by_group(
    const MatchResult& match, const DatasetManifest& manifest,
    std::span<const DetectionRecord> detections, Grouping grouping,
    const GroupingOptions& options = {});

}  // namespace fairlens
