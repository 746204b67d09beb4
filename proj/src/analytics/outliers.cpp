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

#include "fairlens/analytics/outliers.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "fairlens/common/error.hpp"
#include "fairlens/common/text_io.hpp"

namespace fairlens::analytics {

std::string_view to_string(OutlierReason r) {
  return r == OutlierReason::Noise ? "noise" : "minority-in-cluster";
}

std::vector<Outlier> outlier_report(const ClusterAssignment& assignment,
                                    const std::map<std::string, Demographics>& demographics,
                                    Grouping grouping) {
  std::vector<Outlier> out;
  std::map<int, std::vector<std::pair<std::string, std::string>>> clusters;
  for (std::size_t i = 0; i < assignment.ids.size(); ++i) {
    const std::string& id = assignment.ids[i];
    const int label = assignment.labels[i];
    if (label == kNoise) {
      out.push_back({id, OutlierReason::Noise});
      continue;
    }
    auto it = demographics.find(id);
    if (it == demographics.end()) continue;
    std::string value = group_value(it->second, grouping);
    if (value == kUnknown) continue;
    clusters[label].emplace_back(id, std::move(value));
  }
  for (const auto& [label, members] : clusters) {
    std::map<std::string, std::size_t> counts;
    for (const auto& [id, value] : members) ++counts[value];
    std::size_t top = 0;
    std::size_t holders = 0;
    std::string majority;
    for (const auto& [value, count] : counts) {
      if (count > top) {
        top = count;
        holders = 1;
        majority = value;
      } else if (count == top) {
        ++holders;
      }
    }
    if (holders != 1) continue;
    for (const auto& [id, value] : members) {
      if (value != majority) out.push_back({id, OutlierReason::MinorityInCluster});
    }
  }
  std::sort(out.begin(), out.end(),
            [](const Outlier& a, const Outlier& b) { return a.instance_id < b.instance_id; });
  return out;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char c : s) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + "\"";
}

}  // namespace

std::string format_scatter(const Projection2D& proj,
                           const std::map<std::string, std::string>& labels) {
  std::vector<Eigen::Index> order(proj.ids.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<Eigen::Index>(i);
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return proj.ids[static_cast<std::size_t>(a)] < proj.ids[static_cast<std::size_t>(b)];
  });
  std::string out = "instance_id,x,y,label\n";
  char buf[64];
  for (Eigen::Index row : order) {
    const std::string& id = proj.ids[static_cast<std::size_t>(row)];
    auto it = labels.find(id);
    if (it == labels.end()) {
      throw Error("MissingLabel", "no label for " + id, {{"id", id}});
    }
    out += csv_field(id);
    std::snprintf(buf, sizeof buf, ",%.6f,%.6f,", proj.coords(row, 0), proj.coords(row, 1));
    out += buf;
    out += csv_field(it->second);
    out += '\n';
  }
  return out;
}

void export_scatter(const Projection2D& proj,
                    const std::map<std::string, std::string>& labels,
                    const std::string& path) {
  write_file_atomic(path, format_scatter(proj, labels));
}

}  // namespace fairlens::analytics
