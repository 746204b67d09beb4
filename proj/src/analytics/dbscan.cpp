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

#include "fairlens/analytics/dbscan.hpp"

#include <algorithm>
#include <deque>

#include "fairlens/common/error.hpp"

namespace fairlens::analytics {

namespace {
constexpr int kUnvisited = -2;
}

std::optional<int> ClusterAssignment::label_of(std::string_view id) const {
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] == id) return labels[i];
  }
  return std::nullopt;
}

std::size_t ClusterAssignment::noise_count() const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), kNoise));
}

ClusterAssignment dbscan(const DistanceMatrix& dist, double eps, int min_pts) {
  if (!(eps > 0) || min_pts < 1) {
    throw Error("BadParameter", "dbscan needs eps > 0 and min_pts >= 1",
                {{"eps", eps}, {"min_pts", min_pts}});
  }
  const Eigen::Index n = dist.size();
  std::vector<std::vector<Eigen::Index>> neighbours(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (dist.values(i, j) <= eps) neighbours[static_cast<std::size_t>(i)].push_back(j);
    }
  }
  auto is_core = [&](Eigen::Index i) {
    return neighbours[static_cast<std::size_t>(i)].size() >= static_cast<std::size_t>(min_pts);
  };

  ClusterAssignment out;
  out.ids = dist.ids;
  out.labels.assign(static_cast<std::size_t>(n), kUnvisited);
  int next = 0;
  for (Eigen::Index seed = 0; seed < n; ++seed) {
    auto& seed_label = out.labels[static_cast<std::size_t>(seed)];
    if (seed_label != kUnvisited) continue;
    if (!is_core(seed)) continue;
    const int cluster = next++;
    seed_label = cluster;
    std::deque<Eigen::Index> frontier{seed};
    while (!frontier.empty()) {
      const Eigen::Index p = frontier.front();
      frontier.pop_front();
      for (Eigen::Index q : neighbours[static_cast<std::size_t>(p)]) {
        auto& label = out.labels[static_cast<std::size_t>(q)];
        if (label != kUnvisited) continue;
        label = cluster;
        if (is_core(q)) frontier.push_back(q);
      }
    }
  }
  for (auto& label : out.labels) {
    if (label == kUnvisited) label = kNoise;
  }
  out.cluster_count = next;
  return out;
}

}  // namespace fairlens::analytics
