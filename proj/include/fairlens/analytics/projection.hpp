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
#include <string>
#include <vector>

#include <Eigen/Core>

#include "fairlens/analytics/distance.hpp"

namespace fairlens::analytics {

// Rows follow `ids`.
struct Projection2D {
  std::vector<std::string> ids;
  Eigen::MatrixX2d coords;
};

struct PcaResult {
  Projection2D projection;
  Eigen::MatrixXd components;      // one unit column per output dimension
  Eigen::VectorXd eigenvalues;     // sample covariance, descending
  Eigen::VectorXd variance_ratio;  // eigenvalue / trace
};

/// Projects mean-centred points onto the top `out_dims` eigenvectors of the
/// sample covariance, found by deflated power iteration. Directions with zero
/// variance give zero coordinates. Each component's first nonzero entry is
/// positive. Throws TooFewPoints when n < out_dims + 1.
PcaResult pca_project(const PointSet& points, int out_dims = 2);

// Top eigenpairs of a symmetric positive semidefinite matrix.
struct EigenPairs {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};
EigenPairs top_eigenpairs(const Eigen::MatrixXd& sym, int count, double tol = 1e-10,
                          int max_iterations = 100000);

struct TsneOptions {
  double perplexity = 30;
  int iterations = 1000;
  double learning_rate = 200;
  std::uint64_t seed = 0;
  int record_every = 50;
};

struct TsneResult {
  Projection2D projection;
  std::vector<std::pair<int, double>> kl_history;  // (iteration, KL(P||Q))
};

namespace tsne {

inline constexpr int kExaggerationIterations = 250;
inline constexpr double kExaggeration = 12.0;
inline constexpr double kInitialMomentum = 0.5;
inline constexpr double kFinalMomentum = 0.8;
inline constexpr double kInitSigma = 1e-4;
inline constexpr double kPerplexityTolerance = 1e-5;
inline constexpr int kBandwidthIterations = 50;
inline constexpr Eigen::Index kMaxPoints = 5000;

// Row i holds P(j|i); `achieved` receives the perplexity reached per row.
Eigen::MatrixXd conditional_probabilities(const Eigen::MatrixXd& sq_dist,
                                          double perplexity,
                                          Eigen::VectorXd* achieved = nullptr);

// (P(j|i) + P(i|j)) / 2n
Eigen::MatrixXd joint_probabilities(const Eigen::MatrixXd& conditional);

// Student-t affinities normalised over all off-diagonal pairs.
Eigen::MatrixXd student_affinities(const Eigen::MatrixX2d& y);

double kl_divergence(const Eigen::MatrixXd& p, const Eigen::MatrixX2d& y);

// d KL / d y
Eigen::MatrixX2d kl_gradient(const Eigen::MatrixXd& p, const Eigen::MatrixX2d& y);

Eigen::MatrixX2d initial_embedding(Eigen::Index n, std::uint64_t seed);

// Gradient descent state with momentum and per-coordinate gains.
class Optimizer {
 public:
  Optimizer(Eigen::MatrixXd p, Eigen::MatrixX2d y, double learning_rate);

  // Applies iteration `iteration` (0-based).
  void step(int iteration);

  const Eigen::MatrixX2d& y() const { return y_; }
  const Eigen::MatrixXd& p() const { return p_; }

 private:
  Eigen::MatrixXd p_;
  Eigen::MatrixX2d y_;
  Eigen::MatrixX2d velocity_;
  Eigen::MatrixX2d gains_;
  double learning_rate_;
};

}  // namespace tsne

// Throws PerplexityOutOfRange or TooManyPoints.
TsneResult tsne_project(const PointSet& points, const TsneOptions& options);

}  // namespace fairlens::analytics
