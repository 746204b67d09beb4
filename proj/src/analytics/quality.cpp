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

#include "fairlens/analytics/quality.hpp"

#include <algorithm>
#include <limits>
#include <set>

namespace fairlens::analytics {

namespace detail {
int count_clusters(std::span<const int> labels) {
  std::set<int> seen;
  for (int l : labels) {
    if (l != kNoise) seen.insert(l);
  }
  return static_cast<int>(seen.size());
}
}  // namespace detail

double mean_silhouette(const DistanceMatrix& dist, std::span<const int> labels) {
  if (labels.size() != static_cast<std::size_t>(dist.size())) {
    throw Error("BadParameter", "label count does not match the distance matrix",
                {{"labels", labels.size()}, {"n", dist.size()}});
  }
  if (detail::count_clusters(labels) < 2) {
    throw Error("NeedTwoClusters", "silhouette needs at least two clusters");
  }
  std::map<int, std::vector<Eigen::Index>> members;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != kNoise) members[labels[i]].push_back(static_cast<Eigen::Index>(i));
  }
  double total = 0;
  std::size_t counted = 0;
  for (const auto& [own, rows] : members) {
    for (Eigen::Index i : rows) {
      ++counted;
      if (rows.size() == 1) continue;
      double a = 0;
      for (Eigen::Index j : rows) a += dist.values(i, j);
      a /= static_cast<double>(rows.size() - 1);
      double b = std::numeric_limits<double>::infinity();
      for (const auto& [other, others] : members) {
        if (other == own) continue;
        double sum = 0;
        for (Eigen::Index j : others) sum += dist.values(i, j);
        b = std::min(b, sum / static_cast<double>(others.size()));
      }
      const double denom = std::max(a, b);
      if (denom > 0) total += (b - a) / denom;
    }
  }
  return total / static_cast<double>(counted);
}

std::string_view to_string(AttributeLabeling a) {
  switch (a) {
    case AttributeLabeling::Race: return "race";
    case AttributeLabeling::Gender: return "gender";
    case AttributeLabeling::Both: return "both";
  }
  return "race";
}

std::optional<AttributeLabeling> parse_attribute_labeling(std::string_view s) {
  if (s == "race" || s == "ethnicity") return AttributeLabeling::Race;
  if (s == "gender") return AttributeLabeling::Gender;
  if (s == "both" || s == "race+gender") return AttributeLabeling::Both;
  return std::nullopt;
}

namespace {

std::optional<std::string> attribute_label(const Demographics& d, AttributeLabeling a) {
  const bool race_known = d.ethnicity != kUnknown;
  const bool gender_known = d.gender != Gender::Unknown;
  switch (a) {
    case AttributeLabeling::Race:
      if (race_known) return d.ethnicity;
      break;
    case AttributeLabeling::Gender:
      if (gender_known) return std::string(to_string(d.gender));
      break;
    case AttributeLabeling::Both:
      if (race_known && gender_known) {
        return d.ethnicity + "/" + std::string(to_string(d.gender));
      }
      break;
  }
  return std::nullopt;
}

}  // namespace

ClusterQuality attribute_cluster_metrics(
    const EmbeddingStore& embeddings,
    const std::map<std::string, Demographics>& demographics,
    AttributeLabeling labeling) {
  EmbeddingStore kept;
  std::vector<std::string> names;
  std::size_t excluded = 0;
  for (const auto& [id, v] : embeddings) {
    auto it = demographics.find(id);
    auto label = it == demographics.end() ? std::nullopt : attribute_label(it->second, labeling);
    if (!label) {
      ++excluded;
      continue;
    }
    kept.emplace(id, v);
    names.push_back(*label);
  }
  std::vector<std::string> distinct = names;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 2) {
    throw Error("NeedTwoClusters", "the attribute takes fewer than two known values",
                {{"grouping", std::string(to_string(labeling))},
                 {"values", distinct}});
  }
  std::vector<int> labels;
  labels.reserve(names.size());
  for (const auto& name : names) {
    labels.push_back(static_cast<int>(
        std::lower_bound(distinct.begin(), distinct.end(), name) - distinct.begin()));
  }
  const PointSet points = to_point_set(kept);
  ClusterQuality q;
  q.msc = mean_silhouette(pairwise_distances(points), labels);
  q.dbi = davies_bouldin(points, labels);
  q.excluded = excluded;
  q.clusters = static_cast<int>(distinct.size());
  return q;
}

SweepResult sweep_dbscan(const PointSet& points, std::span<const double> eps_grid,
                         int min_pts) {
  if (eps_grid.empty()) throw Error("EmptyGrid", "the eps grid is empty");
  const DistanceMatrix dist = pairwise_distances(points);
  SweepResult best;
  bool found = false;
  for (double eps : eps_grid) {
    ClusterAssignment assignment = dbscan(dist, eps, min_pts);
    SweepPoint point{eps, assignment.cluster_count, assignment.noise_count(), std::nullopt};
    if (assignment.cluster_count >= 2) {
      try {
        ClusterQuality q;
        q.msc = mean_silhouette(dist, assignment.labels);
        q.dbi = davies_bouldin(points, assignment.labels);
        q.excluded = point.noise;
        q.clusters = assignment.cluster_count;
        point.quality = q;
      } catch (const Error& e) {
        if (e.code() != "CoincidentCentroids") throw;
      }
    }
    if (point.quality) {
      const double msc = point.quality->msc;
      if (!found || msc > best.quality.msc || (msc == best.quality.msc && eps < best.eps)) {
        found = true;
        best.eps = eps;
        best.assignment = std::move(assignment);
        best.quality = *point.quality;
      }
    }
    best.trace.push_back(point);
  }
  if (!found) {
    throw Error("NoValidClustering", "no eps in the grid yields two or more clusters",
                {{"grid_size", eps_grid.size()}});
  }
  return best;
}

}  // namespace fairlens::analytics
