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

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "fairlens/analytics/projection.hpp"
#include "fairlens/common/error.hpp"

namespace fairlens::analytics {
namespace tsne {

namespace {

// Fills `row` with exp(-beta * (d - d_min)) normalised, returning the
// perplexity of the result.
double row_distribution(const Eigen::MatrixXd& sq_dist, Eigen::Index i, double beta,
                        Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> row) {
  const Eigen::Index n = sq_dist.rows();
  double d_min = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < n; ++j) {
    if (j != i) d_min = std::min(d_min, sq_dist(i, j));
  }
  double sum = 0;
  double weighted = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (j == i) {
      row(j) = 0;
      continue;
    }
    const double shifted = sq_dist(i, j) - d_min;
    row(j) = std::exp(-beta * shifted);
    sum += row(j);
    weighted += shifted * row(j);
  }
  row /= sum;
  const double entropy = std::log(sum) + beta * weighted / sum;
  return std::exp(entropy);
}

}  // namespace

Eigen::MatrixXd conditional_probabilities(const Eigen::MatrixXd& sq_dist, double perplexity,
                                          Eigen::VectorXd* achieved) {
  const Eigen::Index n = sq_dist.rows();
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
  if (achieved) achieved->resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double beta = 1;
    double lo = 0;
    double hi = std::numeric_limits<double>::infinity();
    double perp = row_distribution(sq_dist, i, beta, p.row(i));
    for (int it = 0; it < kBandwidthIterations; ++it) {
      if (std::abs(perp - perplexity) < kPerplexityTolerance) break;
      if (perp > perplexity) {
        lo = beta;
        beta = std::isinf(hi) ? beta * 2 : (beta + hi) / 2;
      } else {
        hi = beta;
        beta = (beta + lo) / 2;
      }
      perp = row_distribution(sq_dist, i, beta, p.row(i));
    }
    if (achieved) (*achieved)(i) = perp;
  }
  return p;
}

Eigen::MatrixXd joint_probabilities(const Eigen::MatrixXd& conditional) {
  const double n = static_cast<double>(conditional.rows());
  return (conditional + conditional.transpose()) / (2 * n);
}

namespace {

Eigen::MatrixXd student_numerators(const Eigen::MatrixX2d& y) {
  const Eigen::Index n = y.rows();
  Eigen::MatrixXd num = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      num(i, j) = num(j, i) = 1.0 / (1.0 + (y.row(i) - y.row(j)).squaredNorm());
    }
  }
  return num;
}

}  // namespace

Eigen::MatrixXd student_affinities(const Eigen::MatrixX2d& y) {
  Eigen::MatrixXd num = student_numerators(y);
  return num / num.sum();
}

double kl_divergence(const Eigen::MatrixXd& p, const Eigen::MatrixX2d& y) {
  const Eigen::MatrixXd q = student_affinities(y);
  const Eigen::Index n = p.rows();
  double kl = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i != j && p(i, j) > 0) kl += p(i, j) * std::log(p(i, j) / q(i, j));
    }
  }
  return kl;
}

Eigen::MatrixX2d kl_gradient(const Eigen::MatrixXd& p, const Eigen::MatrixX2d& y) {
  const Eigen::MatrixXd num = student_numerators(y);
  const double z = num.sum();
  const Eigen::Index n = y.rows();
  Eigen::MatrixX2d grad = Eigen::MatrixX2d::Zero(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const double w = (p(i, j) - num(i, j) / z) * num(i, j);
      grad.row(i) += w * (y.row(i) - y.row(j));
    }
  }
  return 4 * grad;
}

Eigen::MatrixX2d initial_embedding(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto uniform = [&] {
    return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
  };
  Eigen::MatrixX2d y(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double theta = 2.0 * std::numbers::pi * uniform();
    y(i, 0) = kInitSigma * r * std::cos(theta);
    y(i, 1) = kInitSigma * r * std::sin(theta);
  }
  return y;
}

Optimizer::Optimizer(Eigen::MatrixXd p, Eigen::MatrixX2d y, double learning_rate)
    : p_(std::move(p)),
      y_(std::move(y)),
      velocity_(Eigen::MatrixX2d::Zero(y_.rows(), 2)),
      gains_(Eigen::MatrixX2d::Ones(y_.rows(), 2)),
      learning_rate_(learning_rate) {}

void Optimizer::step(int iteration) {
  const bool early = iteration < kExaggerationIterations;
  const double momentum = early ? kInitialMomentum : kFinalMomentum;
  const Eigen::MatrixX2d grad = early ? kl_gradient(kExaggeration * p_, y_) : kl_gradient(p_, y_);
  for (Eigen::Index i = 0; i < y_.rows(); ++i) {
    for (Eigen::Index k = 0; k < 2; ++k) {
      const bool same_sign = (grad(i, k) > 0) == (velocity_(i, k) > 0);
      double g = same_sign ? gains_(i, k) * 0.8 : gains_(i, k) + 0.2;
      gains_(i, k) = std::max(g, 0.01);
      velocity_(i, k) = momentum * velocity_(i, k) - learning_rate_ * gains_(i, k) * grad(i, k);
    }
  }
  y_ += velocity_;
  y_.rowwise() -= y_.colwise().mean();
}

}  // namespace tsne

TsneResult tsne_project(const PointSet& points, const TsneOptions& options) {
  const Eigen::Index n = points.size();
  if (n > tsne::kMaxPoints) {
    throw Error("TooManyPoints", "exact t-SNE is limited to 5000 points", {{"n", n}});
  }
  const double max_perplexity = static_cast<double>(n - 1) / 3.0;
  if (!(options.perplexity >= 5) || options.perplexity > max_perplexity) {
    throw Error("PerplexityOutOfRange", "perplexity must lie in [5, (n-1)/3]",
                {{"perplexity", options.perplexity}, {"n", n}, {"max", max_perplexity}});
  }
  if (options.iterations < 0 || !(options.learning_rate > 0) || options.record_every < 1) {
    throw Error("BadParameter", "iterations, learning_rate or record_every out of range");
  }
  const Eigen::MatrixXd dist = pairwise_distances(points.coords);
  const Eigen::MatrixXd sq = dist.cwiseProduct(dist);
  Eigen::MatrixXd p = tsne::joint_probabilities(tsne::conditional_probabilities(sq, options.perplexity));

  tsne::Optimizer opt(p, tsne::initial_embedding(n, options.seed), options.learning_rate);
  TsneResult out;
  for (int it = 0; it < options.iterations; ++it) {
    opt.step(it);
    const int done = it + 1;
    if (done % options.record_every == 0 || done == options.iterations) {
      out.kl_history.emplace_back(done, tsne::kl_divergence(p, opt.y()));
    }
  }
  out.projection.ids = points.ids;
  out.projection.coords = opt.y();
  return out;
}

}  // namespace fairlens::analytics
