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

#include "fairlens/analytics/projection.hpp"
#include "fairlens/common/error.hpp"

namespace fairlens::analytics {

namespace {

void orthogonalize(Eigen::VectorXd& v, const Eigen::MatrixXd& basis, Eigen::Index count) {
  for (Eigen::Index k = 0; k < count; ++k) {
    v -= basis.col(k).dot(v) * basis.col(k);
  }
}

void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > 1e-12) {
      if (v(i) < 0) v = -v;
      return;
    }
  }
}

// Deterministic start: the (deflated) column with the largest norm, or the
// first standard basis vector that survives orthogonalisation.
Eigen::VectorXd start_vector(const Eigen::MatrixXd& sym, const Eigen::MatrixXd& basis,
                             Eigen::Index found) {
  const Eigen::Index d = sym.rows();
  Eigen::VectorXd best;
  double best_norm = 0;
  for (Eigen::Index j = 0; j < d; ++j) {
    Eigen::VectorXd c = sym.col(j);
    orthogonalize(c, basis, found);
    const double norm = c.norm();
    if (norm > best_norm) {
      best_norm = norm;
      best = c;
    }
  }
  if (best_norm > 0) return best / best_norm;
  for (Eigen::Index j = 0; j < d; ++j) {
    Eigen::VectorXd e = Eigen::VectorXd::Unit(d, j);
    orthogonalize(e, basis, found);
    if (e.norm() > 1e-6) return e.normalized();
  }
  return Eigen::VectorXd::Zero(d);
}

}  // namespace

EigenPairs top_eigenpairs(const Eigen::MatrixXd& sym, int count, double tol,
                          int max_iterations) {
  const Eigen::Index d = sym.rows();
  EigenPairs out;
  out.values = Eigen::VectorXd::Zero(count);
  out.vectors = Eigen::MatrixXd::Zero(d, count);
  const double scale = std::max(sym.cwiseAbs().maxCoeff(), 1e-300);
  for (Eigen::Index k = 0; k < count; ++k) {
    Eigen::VectorXd v = start_vector(sym, out.vectors, k);
    double lambda = 0;
    for (int it = 0; it < max_iterations; ++it) {
      Eigen::VectorXd w = sym * v;
      orthogonalize(w, out.vectors, k);
      lambda = v.dot(w);
      const double residual = (w - lambda * v).norm();
      const double norm = w.norm();
      if (norm <= tol * scale) {
        lambda = 0;
        break;
      }
      v = w / norm;
      if (residual <= tol * scale) break;
    }
    orthogonalize(v, out.vectors, k);
    v.normalize();
    if (lambda <= tol * scale) {
      lambda = 0;
      v = start_vector(Eigen::MatrixXd::Zero(d, d), out.vectors, k);
    }
    fix_sign(v);
    out.values(k) = lambda;
    out.vectors.col(k) = v;
  }
  return out;
}

PcaResult pca_project(const PointSet& points, int out_dims) {
  const Eigen::Index n = points.size();
  if (out_dims < 1 || n < out_dims + 1) {
    throw Error("TooFewPoints", "pca needs more points than output dimensions",
                {{"n", n}, {"out_dims", out_dims}});
  }
  const Eigen::RowVectorXd mean = points.coords.colwise().mean();
  const Eigen::MatrixXd centred = points.coords.rowwise() - mean;
  const Eigen::MatrixXd cov = (centred.transpose() * centred) / static_cast<double>(n - 1);

  EigenPairs pairs = top_eigenpairs(cov, out_dims);
  PcaResult out;
  out.components = pairs.vectors;
  out.eigenvalues = pairs.values;
  const double trace = cov.trace();
  out.variance_ratio = trace > 0 ? Eigen::VectorXd(pairs.values / trace)
                                 : Eigen::VectorXd::Zero(out_dims);
  Eigen::MatrixXd projected = centred * pairs.vectors;
  for (Eigen::Index k = 0; k < out_dims; ++k) {
    if (pairs.values(k) == 0) projected.col(k).setZero();
  }
  out.projection.ids = points.ids;
  out.projection.coords = Eigen::MatrixX2d::Zero(n, 2);
  const Eigen::Index cols = std::min<Eigen::Index>(2, out_dims);
  out.projection.coords.leftCols(cols) = projected.leftCols(cols);
  return out;
}

}  // namespace fairlens::analytics
