#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "clad/errors.hpp"
#include "clad/kmeans.hpp"
#include "clad/rng.hpp"

using namespace clad;

namespace {

double dist2(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t f = 0; f < a.size(); ++f) acc += (a[f] - b[f]) * (a[f] - b[f]);
  return acc;
}

// exhaustive 2-cluster optimum over all assignments of the points
double brute_force_two_cluster_inertia(const Matrix& points) {
  const std::size_t n = points.rows;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t mask = 1; mask + 1 < (1u << n); ++mask) {
    std::vector<std::vector<std::size_t>> groups(2);
    for (std::size_t i = 0; i < n; ++i) groups[(mask >> i) & 1u].push_back(i);
    double inertia = 0.0;
    for (const auto& group : groups) {
      std::vector<double> mean(points.cols, 0.0);
      for (const std::size_t i : group) {
        for (std::size_t f = 0; f < points.cols; ++f) mean[f] += points(i, f);
      }
      for (double& v : mean) v /= static_cast<double>(group.size());
      for (const std::size_t i : group) inertia += dist2(points.row(i), mean);
    }
    best = std::min(best, inertia);
  }
  return best;
}

}  // namespace

TEST_CASE("k equal to the point count gives zero inertia") {
  Matrix points(5, 2);
  Rng rng(1);
  for (double& v : points.data) v = rng.normal();
  Rng seed(2);
  const auto model = kmeans(points, 5, seed);
  CHECK(model.inertia == doctest::Approx(0.0).epsilon(1e-12));
  std::set<int> used(model.assignments.begin(), model.assignments.end());
  CHECK(used.size() == 5);
}

TEST_CASE("k=1 centroid is the attribute mean") {
  Matrix points(7, 3);
  Rng rng(3);
  for (double& v : points.data) v = rng.uniform(-4, 4);
  Rng seed(4);
  const auto model = kmeans(points, 1, seed);
  for (std::size_t f = 0; f < 3; ++f) {
    double mean = 0.0;
    for (std::size_t i = 0; i < 7; ++i) mean += points(i, f);
    mean /= 7.0;
    CHECK(model.centroids(0, f) == doctest::Approx(mean).epsilon(1e-9));
  }
}

TEST_CASE("two separated pairs recover the exhaustive two-cluster optimum") {
  Matrix points(4, 2);
  points(0, 0) = 0.0; points(0, 1) = 0.1;
  points(1, 0) = 0.2; points(1, 1) = -0.1;
  points(2, 0) = 10.0; points(2, 1) = 10.2;
  points(3, 0) = 10.1; points(3, 1) = 9.9;
  const double best = brute_force_two_cluster_inertia(points);
  Rng seed(5);
  const auto model = kmeans(points, 2, seed);
  CHECK(model.inertia == doctest::Approx(best).epsilon(1e-9));
  CHECK(model.assignments[0] == model.assignments[1]);
  CHECK(model.assignments[2] == model.assignments[3]);
  CHECK(model.assignments[0] != model.assignments[2]);
  // centroids sit at the pair means
  const std::size_t low = static_cast<std::size_t>(model.assignments[0]);
  CHECK(model.centroids(low, 0) == doctest::Approx(0.1));
  CHECK(model.centroids(low, 1) == doctest::Approx(0.0));
}

TEST_CASE("kmeans input validation") {
  Matrix points(3, 2);
  Rng rng(6);
  CHECK_THROWS_AS(kmeans(points, 4, rng), DataError);
  points(1, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(kmeans(points, 2, rng), DataError);
}

TEST_CASE("pseudo-label selection") {
  Rng data_rng(7);
  Matrix points(60, 4);
  for (std::size_t i = 0; i < 60; ++i) {
    const std::size_t c = i % 3;
    for (std::size_t f = 0; f < 4; ++f) {
      points(i, f) = (f == c ? 6.0 : 0.0) + 0.3 * data_rng.normal();
    }
  }
  Rng seed(8);
  const auto model = kmeans(points, 3, seed);

  SUBCASE("per_cluster=1 labels exactly k nodes") {
    const auto labels = select_pseudo_labels(model, points, 1);
    CHECK(labels.n_labeled() == 3);
    CHECK(labels.n_classes == 3);
  }
  SUBCASE("per_cluster larger than the cluster clamps to its size") {
    const auto labels = select_pseudo_labels(model, points, 50);
    CHECK(labels.n_labeled() == 60);
  }
  SUBCASE("selected nodes are closest to their centroid") {
    const auto labels = select_pseudo_labels(model, points, 5);
    CHECK(labels.n_labeled() == 15);
    for (std::size_t c = 0; c < 3; ++c) {
      double worst_selected = -1.0;
      double best_unselected = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < 60; ++i) {
        if (static_cast<std::size_t>(model.assignments[i]) != c) continue;
        const double d = dist2(points.row(i), model.centroids.row(c));
        if (labels.assignments[i] == static_cast<int>(c)) {
          worst_selected = std::max(worst_selected, d);
        } else {
          best_unselected = std::min(best_unselected, d);
        }
      }
      CHECK(worst_selected <= best_unselected);
    }
  }
  SUBCASE("empty model is rejected") {
    ClusterModel empty;
    CHECK_THROWS_AS(select_pseudo_labels(empty, points, 5), DataError);
  }
}

TEST_CASE("row permutation only relabels nodes") {
  Rng data_rng(9);
  Matrix points(30, 3);
  for (std::size_t i = 0; i < 30; ++i) {
    const std::size_t c = i < 15 ? 0 : 1;
    for (std::size_t f = 0; f < 3; ++f) {
      points(i, f) = (f == c ? 5.0 : -5.0) + 0.2 * data_rng.normal();
    }
  }
  std::vector<std::size_t> perm(30);
  for (std::size_t i = 0; i < 30; ++i) perm[i] = (i * 7) % 30;
  Matrix permuted(30, 3);
  for (std::size_t i = 0; i < 30; ++i) {
    std::copy_n(points.row(perm[i]).begin(), 3, permuted.row(i).begin());
  }

  Rng seed_a(10), seed_b(10);
  const auto model_a = kmeans(points, 2, seed_a);
  const auto model_b = kmeans(permuted, 2, seed_b);
  CHECK(model_a.inertia == doctest::Approx(model_b.inertia).epsilon(1e-9));

  // canonical relabeling: clusters as node-id sets must coincide
  std::map<std::set<std::size_t>, int> clusters_a, clusters_b;
  std::map<int, std::set<std::size_t>> by_cluster_a, by_cluster_b;
  for (std::size_t i = 0; i < 30; ++i) {
    by_cluster_a[model_a.assignments[i]].insert(i);
    by_cluster_b[model_b.assignments[i]].insert(perm[i]);
  }
  std::set<std::set<std::size_t>> sets_a, sets_b;
  for (const auto& [cluster, members] : by_cluster_a) sets_a.insert(members);
  for (const auto& [cluster, members] : by_cluster_b) sets_b.insert(members);
  CHECK(sets_a == sets_b);
}

TEST_CASE("inertia is non-increasing across restarts of the same data") {
  // Lloyd monotonicity: running with more iterations can only improve fit
  Rng data_rng(11);
  Matrix points(40, 2);
  for (double& v : points.data) v = data_rng.uniform(-3, 3);
  Rng seed_short(12), seed_long(12);
  const auto coarse = kmeans(points, 4, seed_short, 1);
  const auto fine = kmeans(points, 4, seed_long, 100);
  CHECK(fine.inertia <= coarse.inertia + 1e-12);
}
