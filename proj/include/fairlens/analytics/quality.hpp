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

#include <cmath>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "fairlens/analytics/dbscan.hpp"
#include "fairlens/common/error.hpp"

namespace fairlens::analytics {

// Cluster-validity metrics. Labels equal to kNoise are skipped everywhere.

struct ClusterQuality {
  double msc = 0;  // mean silhouette coefficient, in [-1, 1]
  double dbi = 0;  // Davies-Bouldin index, >= 0
  std::size_t excluded = 0;  // noise or unlabeled points left out
  int clusters = 0;
};

// Singleton clusters contribute s(i) = 0. Throws NeedTwoClusters.
double mean_silhouette(const DistanceMatrix& dist, std::span<const int> labels);

namespace detail {
int count_clusters(std::span<const int> labels);
}

/// DBI = (1/k) sum_i max_{j != i} (S_i + S_j) / M_ij, with S_i the mean
/// distance of cluster i's members to its centroid and M_ij the centroid
/// distance. Throws NeedTwoClusters or CoincidentCentroids.
template <typename Derived>
typename Derived::Scalar davies_bouldin(const Eigen::MatrixBase<Derived>& points,
                                        std::span<const int> labels) {
  using Scalar = typename Derived::Scalar;
  using Row = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;
  if (detail::count_clusters(labels) < 2) {
    throw Error("NeedTwoClusters", "Davies-Bouldin needs at least two clusters");
  }
  std::map<int, std::vector<Eigen::Index>> members;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != kNoise) members[labels[i]].push_back(static_cast<Eigen::Index>(i));
  }
  std::vector<Row> centroids;
  std::vector<Scalar> scatter;
  for (const auto& [label, rows] : members) {
    Row c = Row::Zero(points.cols());
    for (auto r : rows) c += points.row(r);
    c /= static_cast<Scalar>(rows.size());
    Scalar s = 0;
    for (auto r : rows) s += (points.row(r) - c).norm();
    centroids.push_back(std::move(c));
    scatter.push_back(s / static_cast<Scalar>(rows.size()));
  }
  const std::size_t k = centroids.size();
  Scalar total = 0;
  for (std::size_t i = 0; i < k; ++i) {
    Scalar worst = 0;
    for (std::size_t j = 0; j < k; ++j) {
      if (i == j) continue;
      const Scalar m = (centroids[i] - centroids[j]).norm();
      if (m == 0) {
        throw Error("CoincidentCentroids", "two clusters share a centroid");
      }
      worst = std::max(worst, (scatter[i] + scatter[j]) / m);
    }
    total += worst;
  }
  return total / static_cast<Scalar>(k);
}

inline double davies_bouldin(const PointSet& points, std::span<const int> labels) {
  return davies_bouldin(points.coords, labels);
}

enum class AttributeLabeling { Race, Gender, Both };
std::string_view to_string(AttributeLabeling a);
std::optional<AttributeLabeling> parse_attribute_labeling(std::string_view s);

/// Treats demographic attribute values as cluster labels ("both" uses the
/// race x gender product). Instances whose attribute is Unknown, or that have
/// no demographics entry, are excluded and counted in `excluded`.
ClusterQuality attribute_cluster_metrics(
    const EmbeddingStore& embeddings,
    const std::map<std::string, Demographics>& demographics,
    AttributeLabeling labeling);

struct SweepPoint {
  double eps = 0;
  int clusters = 0;
  std::size_t noise = 0;
  std::optional<ClusterQuality> quality;  // set when the run is scorable
};

struct SweepResult {
  double eps = 0;
  ClusterAssignment assignment;
  ClusterQuality quality;
  std::vector<SweepPoint> trace;  // one entry per grid value, grid order
};

/// Runs dbscan for every eps and keeps the run with the highest mean
/// silhouette among those with at least two clusters (noise excluded from
/// scoring); ties go to the smaller eps. Throws EmptyGrid or
/// NoValidClustering.
SweepResult sweep_dbscan(const PointSet& points, std::span<const double> eps_grid,
                         int min_pts);

}  // namespace fairlens::analytics
