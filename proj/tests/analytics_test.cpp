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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "analytics_checks.hpp"
#include "analytics_fixtures.hpp"
#include "doctest.h"
#include "fairlens/analytics/dbscan.hpp"
#include "fairlens/analytics/outliers.hpp"
#include "fairlens/analytics/projection.hpp"
#include "fairlens/analytics/quality.hpp"
#include "fairlens/common/text_io.hpp"
#include "test_util.hpp"

using namespace fairlens;
using namespace fairlens::analytics;
using fairlens::testing::error_code_of;
using fairlens::testing::naive_silhouette;
using fairlens::testing::to_nested;

namespace {

PointSet line_points(std::vector<double> xs, int dims = 3) {
  PointSet p;
  p.coords = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(xs.size()), dims);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    char id[16];
    std::snprintf(id, sizeof id, "p%02zu", i);
    p.ids.push_back(id);
    p.coords(static_cast<Eigen::Index>(i), 0) = xs[i];
  }
  return p;
}

}  // namespace

TEST_CASE("pairwise distances") {
  EmbeddingStore store;
  Embedding e1 = Embedding::Zero(), e2 = Embedding::Zero();
  e1(0) = 1;
  e2(1) = 1;
  store.emplace("b", e2);
  store.emplace("a", e1);
  store.emplace("c", e1);
  auto d = pairwise_distances(store);
  CHECK(d.ids == std::vector<std::string>{"a", "b", "c"});
  CHECK(d.values(0, 2) == 0);
  CHECK(d.values(0, 1) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(d.values(1, 0) == d.values(0, 1));

  auto stubs = testing::stub_store(10);
  auto dm = pairwise_distances(stubs);
  std::vector<const Embedding*> rows;
  for (auto& [id, v] : stubs) rows.push_back(&v);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows.size(); ++j) {
      double sq = 0;
      for (int k = 0; k < kEmbeddingDim; ++k) {
        sq += ((*rows[i])(k) - (*rows[j])(k)) * ((*rows[i])(k) - (*rows[j])(k));
      }
      CHECK(std::abs(dm.values(i, j) - std::sqrt(sq)) <= 1e-12);
    }
  }
  EmbeddingStore one{{"x", e1}};
  CHECK(error_code_of([&] { pairwise_distances(one); }) == "TooFewPoints");
}

TEST_CASE("dbscan examples") {
  auto dist = pairwise_distances(line_points({0, 0.5, 1, 10}));
  auto a = dbscan(dist, 1.0, 2);
  CHECK(a.labels == std::vector<int>{0, 0, 0, kNoise});
  CHECK(a.cluster_count == 1);
  CHECK(a.noise_count() == 1);
  CHECK(a.label_of("p03") == kNoise);
  CHECK_FALSE(a.label_of("zz").has_value());

  auto all = dbscan(dist, 100.0, 1);
  CHECK(all.labels == std::vector<int>{0, 0, 0, 0});

  auto none = dbscan(dist, 1.0, 5);
  CHECK(none.labels == std::vector<int>(4, kNoise));
  CHECK(none.cluster_count == 0);

  CHECK(error_code_of([&] { dbscan(dist, 0.0, 2); }) == "BadParameter");
  CHECK(error_code_of([&] { dbscan(dist, 1.0, 0); }) == "BadParameter");
}

TEST_CASE("dbscan matches the reachability closure oracle") {
  const auto r = testing::dbscan_oracle_check(1000, 20240611);
  INFO(r.detail);
  CHECK(r.ok);
}

TEST_CASE("dbscan is deterministic") {
  auto dist = pairwise_distances(testing::stub_store(40));
  auto a = dbscan(dist, 1.3, 3);
  auto b = dbscan(dist, 1.3, 3);
  CHECK(a.labels == b.labels);
  CHECK(a.ids == b.ids);
}

TEST_CASE("silhouette and Davies-Bouldin examples") {
  auto pts = line_points({0, 1, 10, 11});
  auto dist = pairwise_distances(pts);
  std::vector<int> labels{0, 0, 1, 1};
  CHECK(mean_silhouette(dist, labels) == doctest::Approx(0.89975).epsilon(1e-5));
  CHECK(davies_bouldin(pts, labels) == doctest::Approx(0.1).epsilon(1e-12));

  auto dup = line_points({3, 3, 3, 9, 9});
  std::vector<int> dup_labels{0, 0, 0, 1, 1};
  CHECK(mean_silhouette(pairwise_distances(dup), dup_labels) == 1.0);
  CHECK(davies_bouldin(dup, dup_labels) == 0.0);

  std::vector<int> one{0, 0, 0, 0};
  CHECK(error_code_of([&] { mean_silhouette(dist, one); }) == "NeedTwoClusters");
  CHECK(error_code_of([&] { davies_bouldin(pts, one); }) == "NeedTwoClusters");

  auto sym = line_points({-1, 1, 0});
  std::vector<int> coincide{0, 0, 1};
  CHECK(error_code_of([&] { davies_bouldin(sym, coincide); }) == "CoincidentCentroids");

  std::vector<int> singleton{0, 0, 0, 1};
  double s = mean_silhouette(dist, singleton);
  CHECK(s == doctest::Approx(naive_silhouette(to_nested(dist.values), singleton)));

  std::vector<int> with_noise{0, 0, 1, kNoise};
  CHECK(mean_silhouette(dist, with_noise) ==
        doctest::Approx(naive_silhouette(to_nested(dist.values), with_noise)));
}

TEST_CASE("silhouette and Davies-Bouldin match naive formulas and ignore relabelling") {
  const auto r = testing::quality_oracle_check(300, 99);
  INFO(r.detail);
  CHECK(r.ok);
}

TEST_CASE("attribute cluster metrics on the race x gender fixture") {
  auto fx = testing::race_gender_fixture();
  auto race = attribute_cluster_metrics(fx.embeddings, fx.demographics, AttributeLabeling::Race);
  auto gender = attribute_cluster_metrics(fx.embeddings, fx.demographics, AttributeLabeling::Gender);
  auto both = attribute_cluster_metrics(fx.embeddings, fx.demographics, AttributeLabeling::Both);
  CHECK(both.msc > race.msc);
  CHECK(race.msc > gender.msc);
  CHECK(both.dbi < race.dbi);
  CHECK(race.dbi < gender.dbi);
  CHECK(race.excluded == 2);
  CHECK(gender.excluded == 2);
  CHECK(both.excluded == 2);
  CHECK(race.clusters == 4);
  CHECK(gender.clusters == 2);
  CHECK(both.clusters == 8);

  std::map<std::string, Demographics> one_race;
  for (auto& [id, d] : fx.demographics) one_race[id] = {"Asian", d.gender, d.age_group};
  CHECK(error_code_of([&] {
          attribute_cluster_metrics(fx.embeddings, one_race, AttributeLabeling::Race);
        }) == "NeedTwoClusters");
  CHECK(parse_attribute_labeling("both") == AttributeLabeling::Both);
  CHECK_FALSE(parse_attribute_labeling("age").has_value());
}

TEST_CASE("sweep picks the best silhouette") {
  auto pts = line_points({0, 0.2, 0.4, 5, 5.2, 5.4, 5.6});
  std::vector<double> grid{0.1, 0.25, 1.0, 3.0, 10.0};
  auto best = sweep_dbscan(pts, grid, 2);
  CHECK(best.eps == 0.25);
  CHECK(best.assignment.cluster_count == 2);
  REQUIRE(best.trace.size() == grid.size());
  CHECK_FALSE(best.trace[0].quality.has_value());
  CHECK_FALSE(best.trace[4].quality.has_value());
  CHECK(best.trace[1].quality->msc == best.trace[2].quality->msc);

  // brute-force argmax over the trace
  double top = -2;
  double arg = 0;
  for (auto& p : best.trace) {
    if (p.quality && p.quality->msc > top) {
      top = p.quality->msc;
      arg = p.eps;
    }
  }
  CHECK(arg == best.eps);

  std::vector<double> reversed(grid.rbegin(), grid.rend());
  CHECK(sweep_dbscan(pts, reversed, 2).eps == 0.25);

  std::vector<double> empty;
  CHECK(error_code_of([&] { sweep_dbscan(pts, empty, 2); }) == "EmptyGrid");
  auto same = line_points({1, 1, 1, 1});
  CHECK(error_code_of([&] { sweep_dbscan(same, grid, 2); }) == "NoValidClustering");
}

TEST_CASE("sweep separates two stub blobs") {
  auto stubs = testing::stub_store(2);
  auto it = stubs.begin();
  Embedding a = it->second, b = std::next(it)->second;
  PointSet pts;
  pts.coords.resize(20, kEmbeddingDim);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0.0, 0.002);
  for (int i = 0; i < 20; ++i) {
    Embedding v = i < 10 ? a : b;
    for (int k = 0; k < kEmbeddingDim; ++k) v(k) += g(rng);
    pts.ids.push_back((i < 10 ? "a" : "b") + std::to_string(i % 10));
    pts.coords.row(i) = v.normalized().transpose();
  }
  std::vector<double> grid;
  for (int i = 1; i <= 30; ++i) grid.push_back(0.05 * i);
  auto best = sweep_dbscan(pts, grid, 3);
  CHECK(best.assignment.cluster_count == 2);
  CHECK(best.assignment.noise_count() == 0);
}

TEST_CASE("pca examples") {
  Eigen::VectorXd dir = Eigen::VectorXd::LinSpaced(kEmbeddingDim, 1.0, 2.0).normalized();
  PointSet line;
  line.coords.resize(6, kEmbeddingDim);
  for (int i = 0; i < 6; ++i) {
    line.ids.push_back("l" + std::to_string(i));
    line.coords.row(i) = (0.3 * i - 0.7) * dir.transpose();
  }
  auto r = pca_project(line);
  CHECK(std::abs(r.variance_ratio(0) - 1.0) <= 1e-8);
  CHECK(r.variance_ratio(1) == 0.0);
  CHECK(r.projection.coords.col(1).isZero());

  Eigen::VectorXd v = Eigen::VectorXd::Zero(kEmbeddingDim);
  v(3) = 3;
  v(7) = -4;
  PointSet two;
  two.ids = {"m", "p"};
  two.coords.resize(2, kEmbeddingDim);
  two.coords.row(0) = -v.transpose();
  two.coords.row(1) = v.transpose();
  auto t = pca_project(two, 1);
  CHECK(std::abs(std::abs(t.projection.coords(0, 0)) - 5.0) <= 1e-9);
  CHECK(t.projection.coords(0, 0) == doctest::Approx(-t.projection.coords(1, 0)));
  CHECK(t.components(3, 0) > 0);

  CHECK(error_code_of([&] { pca_project(two, 2); }) == "TooFewPoints");
}

TEST_CASE("pca matches a dense eigensolver on stub embeddings") {
  const auto r = testing::pca_eigensolver_check();
  INFO(r.detail);
  CHECK(r.ok);
  auto pts = to_point_set(testing::stub_store(20));
  CHECK(pca_project(pts).projection.coords == pca_project(pts).projection.coords);
}

TEST_CASE("pca properties on random data") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = std::uniform_int_distribution<int>(3, 30)(rng);
    const int dims = std::uniform_int_distribution<int>(2, 12)(rng);
    PointSet pts;
    pts.coords.resize(n, dims);
    for (int i = 0; i < n; ++i) {
      pts.ids.push_back(std::to_string(i));
      for (int k = 0; k < dims; ++k) pts.coords(i, k) = g(rng) * (k + 1);
    }
    auto r = pca_project(pts);
    Eigen::MatrixXd gram = r.components.transpose() * r.components;
    CHECK((gram - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK(r.variance_ratio(0) + 1e-12 >= r.variance_ratio(1));
    CHECK(r.variance_ratio.sum() <= 1 + 1e-8);
    CHECK(r.projection.coords.allFinite());
  }
}

TEST_CASE("t-SNE conditional probabilities") {
  auto pts = to_point_set(testing::stub_store(50));
  Eigen::MatrixXd d = pairwise_distances(pts.coords);
  Eigen::VectorXd achieved;
  auto cond = tsne::conditional_probabilities(d.cwiseProduct(d), 10.0, &achieved);
  for (Eigen::Index i = 0; i < cond.rows(); ++i) {
    CHECK(std::abs(cond.row(i).sum() - 1.0) <= 1e-9);
    CHECK(cond(i, i) == 0.0);
    CHECK(std::abs(achieved(i) - 10.0) < 1e-5);
  }
  auto p = tsne::joint_probabilities(cond);
  CHECK(std::abs(p.sum() - 1.0) <= 1e-12);
  CHECK((p - p.transpose()).cwiseAbs().maxCoeff() == 0.0);

  // Simplex: all pairwise distances equal.
  Eigen::MatrixXd simplex = Eigen::MatrixXd::Constant(16, 16, 2.0);
  simplex.diagonal().setZero();
  auto uniform = tsne::conditional_probabilities(simplex, 5.0);
  for (Eigen::Index i = 0; i < 16; ++i) {
    for (Eigen::Index j = 0; j < 16; ++j) {
      if (i != j) CHECK(std::abs(uniform(i, j) - 1.0 / 15) <= 1e-6);
    }
  }
}

TEST_CASE("t-SNE gradient matches central differences") {
  const auto r = testing::tsne_gradient_check();
  INFO(r.detail);
  CHECK(r.ok);
}

TEST_CASE("t-SNE run") {
  auto pts = to_point_set(testing::stub_store(50));
  TsneOptions opts{.perplexity = 10, .iterations = 1000, .seed = 42};
  auto a = tsne_project(pts, opts);
  auto b = tsne_project(pts, opts);
  CHECK(a.projection.coords == b.projection.coords);
  CHECK(a.projection.ids == pts.ids);
  CHECK(a.projection.coords.allFinite());
  double kl300 = 0, kl1000 = 0;
  for (auto& [it, kl] : a.kl_history) {
    CHECK(std::isfinite(kl));
    if (it == 300) kl300 = kl;
    if (it == 1000) kl1000 = kl;
  }
  CHECK(a.kl_history.size() == 20);
  CHECK(kl300 > 0);
  CHECK(kl1000 <= kl300);

  CHECK(error_code_of([&] { tsne_project(pts, {.perplexity = 4}); }) == "PerplexityOutOfRange");
  CHECK(error_code_of([&] { tsne_project(pts, {.perplexity = 17}); }) == "PerplexityOutOfRange");
  PointSet big;
  big.coords = Eigen::MatrixXd::Zero(5001, 2);
  big.ids.resize(5001);
  CHECK(error_code_of([&] { tsne_project(big, {.perplexity = 30}); }) == "TooManyPoints");
}

TEST_CASE("outlier report") {
  ClusterAssignment noise{{"a", "b", "c"}, {kNoise, kNoise, kNoise}, 0};
  auto flagged = outlier_report(noise, {});
  CHECK(flagged.size() == 3);
  CHECK(flagged[0] == Outlier{"a", OutlierReason::Noise});

  ClusterAssignment one;
  std::map<std::string, Demographics> demo;
  for (int i = 0; i < 10; ++i) {
    std::string id = "w" + std::to_string(i);
    one.ids.push_back(id);
    one.labels.push_back(0);
    demo[id] = {i == 4 ? "Asian" : "White", Gender::Unknown, AgeGroup::Unknown};
  }
  auto r = outlier_report(one, demo);
  REQUIRE(r.size() == 1);
  CHECK(r[0] == Outlier{"w4", OutlierReason::MinorityInCluster});
  CHECK(to_string(r[0].reason) == "minority-in-cluster");

  for (int i = 0; i < 5; ++i) demo["w" + std::to_string(i)].ethnicity = "Black";
  CHECK(outlier_report(one, demo).empty());
  CHECK(outlier_report(one, demo, Grouping::Gender).empty());

  ClusterAssignment mixed{{"z", "m", "n", "a"}, {1, 0, 1, kNoise}, 2};
  std::map<std::string, Demographics> d2{{"z", {"Asian"}}, {"m", {"Black"}}, {"n", {"Asian"}}};
  auto r2 = outlier_report(mixed, d2);
  REQUIRE(r2.size() == 1);
  CHECK(r2[0].instance_id == "a");
}

TEST_CASE("scatter export") {
  testing::TempDir dir;
  Projection2D proj;
  proj.ids = {"c", "a", "b"};
  proj.coords.resize(3, 2);
  proj.coords << 1.5, -2, 0.1234567, 3, 0, 0;
  std::map<std::string, std::string> labels{{"a", "0"}, {"b", "noise"}, {"c", "White, M"}};
  export_scatter(proj, labels, (dir / "s.csv").string());
  const std::string expected =
      "instance_id,x,y,label\n"
      "a,0.123457,3.000000,0\n"
      "b,0.000000,0.000000,noise\n"
      "c,1.500000,-2.000000,\"White, M\"\n";
  CHECK(read_file(dir / "s.csv") == expected);
  export_scatter(proj, labels, (dir / "t.csv").string());
  CHECK(read_file(dir / "t.csv") == expected);

  CHECK(format_scatter(Projection2D{{}, Eigen::MatrixX2d(0, 2)}, {}) == "instance_id,x,y,label\n");
  labels.erase("b");
  CHECK(error_code_of([&] { format_scatter(proj, labels); }) == "MissingLabel");
}
