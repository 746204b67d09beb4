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

#include <string>
#include <vector>

#include <Eigen/Core>

#include "fairlens/ingest/types.hpp"

namespace fairlens::analytics {

// Points as matrix rows, with their ids in the same order.
template <typename Scalar>
struct PointSetT {
  std::vector<std::string> ids;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> coords;

  Eigen::Index size() const { return coords.rows(); }
};
using PointSet = PointSetT<double>;

template <typename Scalar>
struct DistanceMatrixT {
  std::vector<std::string> ids;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> values;

  Eigen::Index size() const { return values.rows(); }
};
using DistanceMatrix = DistanceMatrixT<double>;

// Rows in the store's (lexicographic) key order.
PointSet to_point_set(const EmbeddingStore& store);

// Euclidean distances between the rows of `points`; exactly symmetric with a
// zero diagonal.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
pairwise_distances(const Eigen::MatrixBase<Derived>& points) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = points.rows();
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> d =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      d(i, j) = d(j, i) = (points.row(i) - points.row(j)).norm();
    }
  }
  return d;
}

// Throw TooFewPoints for fewer than two points.
DistanceMatrix pairwise_distances(const PointSet& points);
DistanceMatrix pairwise_distances(const EmbeddingStore& store);

}  // namespace fairlens::analytics
