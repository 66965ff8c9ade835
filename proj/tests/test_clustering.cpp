#include <doctest.h>

#include <cmath>
#include <limits>

#include "cforge/clustering.hpp"
#include "cforge/random.hpp"
#include "helpers.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

using namespace cforge;
using testing::error_kind;

namespace {

Matrix random_points(Rng& rng, std::size_t n, std::size_t dim) {
  Matrix m(n, dim);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < dim; ++k) m(i, k) = synthetic::gaussian(rng);
  }
  return m;
}

std::vector<std::vector<double>> full_distances(const Matrix& m, Metric metric) {
  std::vector<std::vector<double>> d(m.rows(), std::vector<double>(m.rows(), 0.0));
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.rows(); ++j) {
      if (i != j) d[i][j] = distance(m.row(i), m.row(j), metric);
    }
  }
  return d;
}

}  // namespace

TEST_SUITE("clustering") {
  TEST_CASE("distances") {
    const std::vector<double> a{1, 0}, b{0, 2}, c{-3, 0};
    CHECK(distance(a, b, Metric::kCosine) == doctest::Approx(1.0));
    CHECK(distance(a, c, Metric::kCosine) == doctest::Approx(2.0));
    CHECK(distance(a, a, Metric::kCosine) == 0.0);
    CHECK(distance(a, b, Metric::kEuclidean) == doctest::Approx(std::sqrt(5.0)));
    const std::vector<double> zero{0, 0};
    CHECK(error_kind([&] { distance(a, zero, Metric::kCosine); }) == ErrorKind::kDegenerateInput);
  }

  TEST_CASE("condensed distance matrix indexes every pair") {
    Rng rng(3);
    const Matrix m = random_points(rng, 7, 4);
    const auto dm = DistanceMatrix::compute(m, Metric::kEuclidean, 3);
    CHECK(dm.pair_count() == 21);
    for (std::size_t i = 0; i < 7; ++i) {
      for (std::size_t j = 0; j < 7; ++j) {
        if (i != j) CHECK(dm.at(i, j) == distance(m.row(i), m.row(j), Metric::kEuclidean));
      }
    }
  }

  TEST_CASE("pair statistics on a hand-computed distribution") {
    // Points 0, 1, 2 on a line: distances {1, 1, 2}.
    const Matrix m = Matrix::from_rows({{0.0}, {1.0}, {2.0}});
    const auto s = pairwise_distance_stats(m, Metric::kEuclidean);
    CHECK(s.count == 3);
    CHECK(std::abs(s.mean - 4.0 / 3.0) <= 1e-12);
    CHECK(std::abs(s.std - std::sqrt(2.0 / 9.0)) <= 1e-12);
    CHECK(std::abs(derive_threshold(s, 1.0) - (4.0 / 3.0 - std::sqrt(2.0 / 9.0))) <= 1e-12);
    CHECK(derive_threshold({2.0, 1.0, 10}, 1.0) == 1.0);
    CHECK(derive_threshold({0.5, 0.25, 10}, 4.5) == -0.625);
    CHECK(derive_threshold({0.5, 0.25, 10}, -2.0) == 1.0);
    CHECK(error_kind([&] { pairwise_distance_stats(Matrix::from_rows({{1.0}}), Metric::kEuclidean); }) ==
          ErrorKind::kDegenerateInput);
  }

  TEST_CASE("sampled statistics are seeded and shared between overloads") {
    Rng rng(11);
    const Matrix m = random_points(rng, 40, 3);
    const auto dm = DistanceMatrix::compute(m, Metric::kCosine);
    const auto a = pairwise_distance_stats(m, Metric::kCosine, 100, 5);
    const auto b = pairwise_distance_stats(dm, 100, 5);
    CHECK(a.count == 100);
    CHECK(a.mean == b.mean);
    CHECK(a.std == b.std);
    const auto exact = pairwise_distance_stats(dm);
    CHECK(exact.count == 780);
    CHECK(a.mean == doctest::Approx(exact.mean).epsilon(0.2));
  }

  TEST_CASE("agglomerative stops at the threshold") {
    const Matrix m = Matrix::from_rows({{0.0}, {0.1}, {5.0}, {5.1}});
    for (auto linkage : {Linkage::kSingle, Linkage::kAverage, Linkage::kComplete}) {
      const auto a = agglomerative(m, Metric::kEuclidean, linkage, 1.0);
      CHECK(a.k == 2);
      CHECK(a.labels == std::vector<std::size_t>{0, 0, 1, 1});
      CHECK(agglomerative(m, Metric::kEuclidean, linkage, -0.625).k == 4);
      CHECK(agglomerative(m, Metric::kEuclidean, linkage, 100.0).k == 1);
    }
  }

  TEST_CASE("agglomerative matches the exhaustive dendrogram oracle") {
    Rng rng(2024);
    for (int trial = 0; trial < 300; ++trial) {
      const std::size_t n = 2 + rng.below(7);
      const Matrix m = random_points(rng, n, 3);
      const auto metric = trial % 2 ? Metric::kCosine : Metric::kEuclidean;
      const auto d = full_distances(m, metric);
      const auto dm = DistanceMatrix::compute(m, metric);
      for (auto linkage : {Linkage::kSingle, Linkage::kAverage, Linkage::kComplete}) {
        const double tau = trial % 3 == 0 ? std::numeric_limits<double>::infinity() : rng.uniform() * 2.0;
        const auto got = agglomerate(dm, linkage, tau);
        const auto want = oracle::exhaustive_dendrogram(d, linkage, tau);
        REQUIRE(got.merges.size() == want.merges.size());
        for (std::size_t s = 0; s < want.merges.size(); ++s) {
          CHECK(got.merges[s].left == want.merges[s].left);
          CHECK(got.merges[s].right == want.merges[s].right);
          CHECK(std::abs(got.merges[s].distance - want.merges[s].distance) <= 1e-12);
        }
        CHECK(got.assignment.labels == want.labels);
      }
    }
  }

  TEST_CASE("ties go to the smallest slot pair") {
    // Equidistant points on a line: every adjacent pair ties.
    const Matrix m = Matrix::from_rows({{0.0}, {1.0}, {2.0}, {3.0}});
    const auto d = agglomerate(DistanceMatrix::compute(m, Metric::kEuclidean), Linkage::kSingle, 1.0);
    REQUIRE(d.merges.size() == 3);
    CHECK(d.merges[0].left == 0);
    CHECK(d.merges[0].right == 1);
    CHECK(d.merges[1].left == 0);
    CHECK(d.merges[1].right == 2);
  }

  TEST_CASE("complete and average merge heights never decrease") {
    Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
      const Matrix m = random_points(rng, 30, 4);
      const auto dm = DistanceMatrix::compute(m, Metric::kEuclidean);
      for (auto linkage : {Linkage::kAverage, Linkage::kComplete}) {
        const auto d = agglomerate(dm, linkage, std::numeric_limits<double>::infinity());
        CHECK(d.assignment.k == 1);
        for (std::size_t s = 1; s < d.merges.size(); ++s) CHECK(d.merges[s].distance >= d.merges[s - 1].distance);
      }
    }
  }

  TEST_CASE("k-means objective is non-increasing and matches its labels") {
    Rng rng(99);
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t n = 5 + rng.below(60);
      const std::size_t k = 1 + rng.below(8);
      const Matrix m = random_points(rng, n, 2 + rng.below(4));
      const auto r = kmeans(m, k, rng.next(), kDefaultMaxIter, 1 + trial % 3);
      REQUIRE_FALSE(r.objective.empty());
      for (std::size_t i = 1; i < r.objective.size(); ++i) CHECK(r.objective[i] <= r.objective[i - 1] + 1e-9);
      CHECK(r.assignment.k == std::min(k, n));
      CHECK(r.centroids.rows() == r.assignment.k);

      std::vector<std::vector<double>> points, centroids;
      for (std::size_t i = 0; i < m.rows(); ++i) points.emplace_back(m.row(i).begin(), m.row(i).end());
      for (std::size_t c = 0; c < r.centroids.rows(); ++c) {
        centroids.emplace_back(r.centroids.row(c).begin(), r.centroids.row(c).end());
      }
      CHECK(oracle::kmeans_objective(points, r.assignment.labels, centroids) ==
            doctest::Approx(r.objective.back()).epsilon(1e-9));
      CHECK(canonical_assignment(r.assignment.labels) == r.assignment);
    }
  }

  TEST_CASE("k-means is deterministic across thread counts") {
    Rng rng(1);
    const Matrix m = random_points(rng, 200, 5);
    const auto a = kmeans(m, 6, 42, kDefaultMaxIter, 1);
    const auto b = kmeans(m, 6, 42, kDefaultMaxIter, 4);
    CHECK(a.assignment == b.assignment);
    CHECK(a.centroids == b.centroids);
    CHECK(kmeans(m, 500, 1).assignment.k == 200);
    CHECK(error_kind([&] { kmeans(m, 0, 1); }) == ErrorKind::kParameter);
  }

  TEST_CASE("canonical labels") {
    const std::vector<std::size_t> raw{7, 3, 7, 9, 3};
    const auto a = canonical_assignment(raw);
    CHECK(a.labels == std::vector<std::size_t>{0, 1, 0, 2, 1});
    CHECK(a.k == 3);
    CHECK(singleton_assignment(3).labels == std::vector<std::size_t>{0, 1, 2});
  }

  TEST_CASE("parsing names") {
    CHECK(parse_linkage("avg") == Linkage::kAverage);
    CHECK(parse_metric("euclidean") == Metric::kEuclidean);
    CHECK(error_kind([] { parse_linkage("ward"); }) == ErrorKind::kParameter);
  }
}
