#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "support/lp_oracle.hpp"
#include "wmdecomp/clustering.hpp"
#include "wmdecomp/error.hpp"
#include "wmdecomp/random.hpp"

using namespace wmdecomp;

namespace {

PointMatrix points(std::size_t cols, std::vector<double> data) {
  return {data.size() / cols, cols, std::move(data)};
}

PointMatrix random_points(Rng& rng, std::size_t n, std::size_t d) {
  std::normal_distribution<double> normal(0.0, 1.0);
  PointMatrix p{n, d, std::vector<double>(n * d)};
  for (double& x : p.data) x = normal(rng);
  return p;
}

double inertia_of(const PointMatrix& p, const ClusterModel& m) {
  double total = 0.0;
  for (std::size_t i = 0; i < p.rows; ++i) {
    const auto c = m.centroids.row(static_cast<std::size_t>(m.assignments[i]));
    for (std::size_t j = 0; j < p.cols; ++j) total += (p.row(i)[j] - c[j]) * (p.row(i)[j] - c[j]);
  }
  return total;
}

}  // namespace

TEST_SUITE("clustering") {
  TEST_CASE("two separated pairs") {
    const auto p = points(1, {0.0, 0.1, 10.0, 10.1});
    const auto m = kmeans(p, 2, 1);
    CHECK(m.assignments[0] == m.assignments[1]);
    CHECK(m.assignments[2] == m.assignments[3]);
    CHECK(m.assignments[0] != m.assignments[2]);
    const double lo = m.centroids.row(static_cast<std::size_t>(m.assignments[0]))[0];
    const double hi = m.centroids.row(static_cast<std::size_t>(m.assignments[2]))[0];
    CHECK(lo == doctest::Approx(0.05));
    CHECK(hi == doctest::Approx(10.05));
    CHECK(m.inertia == doctest::Approx(0.01).epsilon(1e-9));

    // Identical points inside each cluster: a = 0, b = 10.
    const auto q = points(1, {0.0, 0.0, 10.0, 10.0});
    CHECK(silhouette(q, kmeans(q, 2, 4)) == doctest::Approx(1.0));
    CHECK(silhouette(p, m) == doctest::Approx(0.99).epsilon(1e-3));
  }

  TEST_CASE("edge values of k") {
    Rng rng(5);
    const auto p = random_points(rng, 12, 3);
    const auto all = kmeans(p, 12, 7);
    CHECK(all.inertia == doctest::Approx(0.0).epsilon(1e-12));
    auto sorted = all.assignments;
    std::sort(sorted.begin(), sorted.end());
    CHECK(std::unique(sorted.begin(), sorted.end()) == sorted.end());

    const auto one = kmeans(p, 1, 7);
    std::vector<double> mean(3, 0.0);
    for (std::size_t i = 0; i < 12; ++i)
      for (std::size_t j = 0; j < 3; ++j) mean[j] += p.row(i)[j] / 12;
    for (std::size_t j = 0; j < 3; ++j) CHECK(one.centroids.row(0)[j] == doctest::Approx(mean[j]));
    CHECK_THROWS_AS(silhouette(p, one), Error);

    CHECK_THROWS_AS(kmeans(p, 0, 1), Error);
    CHECK_THROWS_AS(kmeans(p, 13, 1), Error);
  }

  TEST_CASE("lloyd iterations never raise inertia and stop at a fixpoint") {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
      Rng rng(seed);
      const auto p = random_points(rng, 60, 4);
      const std::size_t k = 2 + seed % 7;
      const auto m = kmeans(p, k, seed);
      for (std::size_t i = 1; i < m.inertia_history.size(); ++i)
        CHECK(m.inertia_history[i] <= m.inertia_history[i - 1] + 1e-9);
      CHECK(m.inertia == doctest::Approx(inertia_of(p, m)).epsilon(1e-9));
      // Each point's assigned centroid is its nearest.
      for (std::size_t i = 0; i < p.rows; ++i) {
        double own = 0.0, best = INFINITY;
        for (std::size_t c = 0; c < k; ++c) {
          double d = 0.0;
          for (std::size_t j = 0; j < p.cols; ++j) {
            const double diff = p.row(i)[j] - m.centroids.row(c)[j];
            d += diff * diff;
          }
          if (static_cast<int>(c) == m.assignments[i]) own = d;
          best = std::min(best, d);
        }
        CHECK(own <= best + 1e-12);
      }
      CHECK(kmeans(p, k, seed).assignments == m.assignments);
    }
  }

  TEST_CASE("elbow scan") {
    const auto p = points(1, {0.0, 0.1, 10.0, 10.1});
    const std::vector<std::size_t> ks{1, 2, 4};
    const auto rows = elbow_scan(p, ks, 3);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].k == 1);
    CHECK(rows[0].inertia > rows[1].inertia);
    CHECK(rows[1].inertia == doctest::Approx(0.01));
    CHECK(rows[2].inertia == doctest::Approx(0.0));
    CHECK_FALSE(rows[0].silhouette.has_value());
    CHECK(rows[1].silhouette.value() == doctest::Approx(0.99).epsilon(1e-3));
  }

  TEST_CASE("pca on a line") {
    const auto p = points(2, {1, 1, 2, 2, 3, 3});
    const auto r = pca(p, 1);
    const double s = std::sqrt(2.0);
    CHECK(r.projection.row(0)[0] == doctest::Approx(-s));
    CHECK(r.projection.row(1)[0] == doctest::Approx(0.0));
    CHECK(r.projection.row(2)[0] == doctest::Approx(s));
    CHECK(r.eigenvalues[0] == doctest::Approx(4.0 / 3.0));
    CHECK(r.eigenvalues[1] == doctest::Approx(0.0));
    CHECK_THROWS_AS(pca(p, 3), Error);
  }

  TEST_CASE("pca spectrum, orthogonality and reconstruction error") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      Rng rng(seed + 100);
      const std::size_t n = 40, d = 6, keep = 3;
      auto p = random_points(rng, n, d);
      for (std::size_t i = 0; i < n; ++i) p.row(i)[0] *= 3.0;
      const auto r = pca(p, keep);

      // Independent spectrum of the covariance.
      std::vector<double> mean(d, 0.0), cov(d * d, 0.0);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) mean[j] += p.row(i)[j] / n;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t a = 0; a < d; ++a)
          for (std::size_t b = 0; b < d; ++b)
            cov[a * d + b] += (p.row(i)[a] - mean[a]) * (p.row(i)[b] - mean[b]) / n;
      const auto eig = testing::jacobi_eigenvalues(cov, d);
      for (std::size_t j = 0; j < d; ++j) CHECK(r.eigenvalues[j] == doctest::Approx(eig[j]).epsilon(1e-9));

      for (std::size_t a = 0; a < keep; ++a)
        for (std::size_t b = 0; b < keep; ++b) {
          double dot = 0.0;
          for (std::size_t j = 0; j < d; ++j) dot += r.components[a * d + j] * r.components[b * d + j];
          CHECK(dot == doctest::Approx(a == b ? 1.0 : 0.0).epsilon(1e-9));
        }

      double err = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) {
          double x = mean[j];
          for (std::size_t a = 0; a < keep; ++a) x += r.projection.row(i)[a] * r.components[a * d + j];
          err += (p.row(i)[j] - x) * (p.row(i)[j] - x);
        }
      double discarded = 0.0;
      for (std::size_t j = keep; j < d; ++j) discarded += eig[j];
      CHECK(err == doctest::Approx(discarded * n).epsilon(1e-8));
    }
  }

  TEST_CASE("cluster and coordinate files") {
    const auto m = parse_clusters_csv("word,cluster\nfoo,1\nbar,0\n");
    CHECK(m.k == 2);
    CHECK(m.cluster_of("foo") == 1);
    CHECK_FALSE(m.cluster_of("baz").has_value());
    CHECK(parse_clusters_csv(format_clusters_csv(m)).assignments == m.assignments);
    CHECK_THROWS_AS(parse_clusters_csv("word,cluster\nfoo,x\n"), ParseError);

    const std::vector<std::string> words{"b", "a"};
    const auto c = parse_coordinates_csv("a,1,2\nb,3,4\n", words);
    CHECK(c.rows == 2);
    CHECK(c.row(0)[0] == 3.0);
    CHECK(c.row(1)[1] == 2.0);
    const std::vector<std::string> missing{"a", "z"};
    CHECK_THROWS_AS(parse_coordinates_csv("a,1,2\n", missing), Error);
  }
}
