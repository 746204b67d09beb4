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

#include "fairlens/fairness/report.hpp"

#include <algorithm>
#include <cmath>

#include "fairlens/common/error.hpp"
#include "fairlens/common/text_io.hpp"

namespace fairlens {

using nlohmann::json;
using nlohmann::ordered_json;

const GroupRow* FairnessReport::find(std::string_view group) const {
  auto it = std::find_if(rows.begin(), rows.end(),
                         [&](const GroupRow& r) { return r.group == group; });
  return it == rows.end() ? nullptr : &*it;
}

const GroupDelta* DeltaReport::find(std::string_view group) const {
  auto it = std::find_if(rows.begin(), rows.end(),
                         [&](const GroupDelta& r) { return r.group == group; });
  return it == rows.end() ? nullptr : &*it;
}

std::vector<std::string> order_groups(std::vector<std::string> groups,
                                      std::string_view dataset_id,
                                      Grouping grouping,
                                      const TaxonomyRegistry& taxonomy) {
  std::vector<std::string> preferred;
  switch (grouping) {
    case Grouping::Ethnicity:
      preferred = taxonomy.ethnicities(dataset_id);
      break;
    case Grouping::Gender:
      preferred = {"Male", "Female"};
      break;
    case Grouping::AgeGroup:
      preferred = {"Young", "Middle", "Older"};
      break;
  }
  auto rank = [&](const std::string& g) -> std::size_t {
    if (g == kUnknown) return preferred.size() + 1;
    auto it = std::find(preferred.begin(), preferred.end(), g);
    return it == preferred.end() ? preferred.size()
                                 : static_cast<std::size_t>(it - preferred.begin());
  };
  std::sort(groups.begin(), groups.end(), [&](const auto& a, const auto& b) {
    auto ra = rank(a), rb = rank(b);
    return ra != rb ? ra < rb : a < b;
  });
  return groups;
}

FairnessReport fairness_report(const DatasetManifest& manifest,
                               std::span<const DetectionRecord> detections,
                               double threshold, Grouping grouping,
                               const ReportOptions& options) {
  std::vector<std::string> image_ids;
  image_ids.reserve(manifest.images.size());
  for (const auto& img : manifest.images) image_ids.push_back(img.image_id);

  const MatchResult match =
      match_detections(manifest.instances, detections, threshold, image_ids);
  const auto counts = confusion_by_group(match, manifest, detections, grouping,
                                         options.grouping);

  std::vector<std::string> groups;
  for (const auto& [g, c] : counts) groups.push_back(g);
  groups = order_groups(std::move(groups), manifest.dataset_id, grouping,
                        options.taxonomy);

  FairnessReport report;
  report.dataset_id = manifest.dataset_id;
  report.grouping = grouping;
  report.threshold = threshold;
  for (const auto& g : groups) {
    const auto& c = counts.at(g);
    report.rows.push_back({g, c, group_metrics(c)});
  }
  return report;
}

std::string_view metric_key(MetricKind m) {
  switch (m) {
    case MetricKind::Accuracy: return "accuracy";
    case MetricKind::Fpr: return "fpr";
    case MetricKind::Fnr: return "fnr";
    case MetricKind::Ppv: return "ppv";
  }
  return "";
}

std::string_view metric_label(MetricKind m) {
  switch (m) {
    case MetricKind::Accuracy: return "Prediction Accuracy";
    case MetricKind::Fpr: return "False Positive Rate";
    case MetricKind::Fnr: return "False Negative rate";
    case MetricKind::Ppv: return "Positive Predictive Value";
  }
  return "";
}

Metric metric_value(const GroupMetrics& g, MetricKind m) {
  switch (m) {
    case MetricKind::Accuracy: return g.accuracy;
    case MetricKind::Fpr: return g.fpr;
    case MetricKind::Fnr: return g.fnr;
    case MetricKind::Ppv: return g.ppv;
  }
  return std::nullopt;
}

DeltaReport compare_reports(const FairnessReport& before,
                            const FairnessReport& after) {
  auto group_set = [](const FairnessReport& r) {
    std::vector<std::string> g;
    for (const auto& row : r.rows) g.push_back(row.group);
    std::sort(g.begin(), g.end());
    return g;
  };
  if (before.grouping != after.grouping || group_set(before) != group_set(after)) {
    throw Error("GroupingMismatch",
                "reports differ in grouping key or group set",
                {{"before", to_string(before.grouping)},
                 {"after", to_string(after.grouping)}});
  }
  DeltaReport out;
  out.grouping = before.grouping;
  for (const auto& row : before.rows) {
    const GroupRow& other = *after.find(row.group);
    GroupDelta gd{row.group, {}};
    for (std::size_t k = 0; k < kAllMetrics.size(); ++k) {
      MetricDelta& d = gd.metrics[k];
      d.before = metric_value(row.metrics, kAllMetrics[k]);
      d.after = metric_value(other.metrics, kAllMetrics[k]);
      if (d.before && d.after) {
        d.absolute = *d.after - *d.before;
        if (*d.before != 0) d.relative = (*d.after - *d.before) / *d.before;
      }
    }
    out.rows.push_back(std::move(gd));
  }
  return out;
}

namespace {

ordered_json metric_json(const Metric& m) {
  return m ? ordered_json(*m) : ordered_json(nullptr);
}

Metric metric_from(const json& j, std::string_view key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<double>();
}

}  // namespace

ordered_json to_json(const FairnessReport& r) {
  ordered_json j = header_record("fairness_report");
  j["dataset_id"] = r.dataset_id;
  j["grouping"] = to_string(r.grouping);
  j["tau"] = r.threshold;
  ordered_json groups = ordered_json::array();
  for (const auto& row : r.rows) {
    ordered_json g;
    g["group"] = row.group;
    g["counts"] = {{"tp", row.counts.tp}, {"fp", row.counts.fp},
                   {"fn", row.counts.fn}, {"tn", row.counts.tn}};
    ordered_json m;
    for (auto k : kAllMetrics) m[std::string(metric_key(k))] = metric_json(metric_value(row.metrics, k));
    g["metrics"] = std::move(m);
    groups.push_back(std::move(g));
  }
  j["groups"] = std::move(groups);
  return j;
}

FairnessReport report_from_json(const json& j) {
  try {
    expect_header(j, "fairness_report", 1);
    FairnessReport r;
    r.dataset_id = j.at("dataset_id").get<std::string>();
    auto grouping = parse_grouping(j.at("grouping").get<std::string>());
    if (!grouping) throw_malformed(1, "unknown grouping");
    r.grouping = *grouping;
    r.threshold = j.at("tau").get<double>();
    for (const auto& g : j.at("groups")) {
      GroupRow row;
      row.group = g.at("group").get<std::string>();
      const auto& c = g.at("counts");
      row.counts = {c.at("tp").get<std::int64_t>(), c.at("fp").get<std::int64_t>(),
                    c.at("fn").get<std::int64_t>(), c.at("tn").get<std::int64_t>()};
      const auto& m = g.at("metrics");
      row.metrics = {metric_from(m, "accuracy"), metric_from(m, "fpr"),
                     metric_from(m, "fnr"), metric_from(m, "ppv")};
      r.rows.push_back(std::move(row));
    }
    return r;
  } catch (const json::exception& e) {
    throw_malformed(1, e.what());
  }
}

ordered_json to_json(const DeltaReport& r) {
  ordered_json j = header_record("delta_report");
  j["grouping"] = to_string(r.grouping);
  ordered_json groups = ordered_json::array();
  for (const auto& row : r.rows) {
    ordered_json g;
    g["group"] = row.group;
    for (std::size_t k = 0; k < kAllMetrics.size(); ++k) {
      const auto& d = row.metrics[k];
      g[std::string(metric_key(kAllMetrics[k]))] = {
          {"before", metric_json(d.before)},
          {"after", metric_json(d.after)},
          {"absolute", metric_json(d.absolute)},
          {"relative", metric_json(d.relative)}};
    }
    groups.push_back(std::move(g));
  }
  j["groups"] = std::move(groups);
  return j;
}

}  // namespace fairlens
