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

#include "fairlens/analytics/distance.hpp"

#include "fairlens/common/error.hpp"

namespace fairlens::analytics {

PointSet to_point_set(const EmbeddingStore& store) {
  PointSet out;
  out.ids.reserve(store.size());
  out.coords.resize(static_cast<Eigen::Index>(store.size()), kEmbeddingDim);
  Eigen::Index row = 0;
  for (const auto& [id, v] : store) {
    out.ids.push_back(id);
    out.coords.row(row++) = v.transpose();
  }
  return out;
}

DistanceMatrix pairwise_distances(const PointSet& points) {
  if (points.size() < 2) {
    throw Error("TooFewPoints", "at least two points are required",
                {{"n", points.size()}});
  }
  return {points.ids, pairwise_distances(points.coords)};
}

DistanceMatrix pairwise_distances(const EmbeddingStore& store) {
  return pairwise_distances(to_point_set(store));
}

}  // namespace fairlens::analytics
