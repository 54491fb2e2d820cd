#include "clad/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "clad/errors.hpp"

namespace clad {

namespace {

double dist_squared(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t f = 0; f < a.size(); ++f) {
    const double d = a[f] - b[f];
    acc += d * d;
  }
  return acc;
}

// k-means++: next seed drawn proportional to squared distance from the
// nearest already-chosen centroid.
Matrix seed_centroids(const Matrix& points, std::size_t k, Rng& rng) {
  const std::size_t n = points.rows;
  Matrix centroids(k, points.cols);
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());

  std::size_t first = static_cast<std::size_t>(rng.uniform_int(n));
  std::copy_n(points.row(first).begin(), points.cols, centroids.row(0).begin());

  for (std::size_t c = 1; c < k; ++c) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], dist_squared(points.row(i), centroids.row(c - 1)));
      total += d2[i];
    }
    std::size_t chosen;
    if (total <= 0.0) {
      chosen = static_cast<std::size_t>(rng.uniform_int(n));
    } else {
      const double target = rng.uniform() * total;
      double acc = 0.0;
      chosen = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        acc += d2[i];
        if (acc > target) {
          chosen = i;
          break;
        }
      }
    }
    std::copy_n(points.row(chosen).begin(), points.cols, centroids.row(c).begin());
  }
  return centroids;
}

void assign_points(const Matrix& points, const Matrix& centroids, std::vector<int>& assignments,
                   std::vector<double>& best_d2) {
  const std::size_t k = centroids.rows;
  for (std::size_t i = 0; i < points.rows; ++i) {
    int best = 0;
    double best_dist = dist_squared(points.row(i), centroids.row(0));
    for (std::size_t c = 1; c < k; ++c) {
      const double d = dist_squared(points.row(i), centroids.row(c));
      if (d < best_dist) {
        best_dist = d;
        best = static_cast<int>(c);
      }
    }
    assignments[i] = best;
    best_d2[i] = best_dist;
  }
}

}  // namespace

ClusterModel kmeans(const Matrix& points, std::size_t k, Rng& rng, std::size_t max_iters,
                    double tol) {
  if (k == 0) throw UsageError("k must be at least 1");
  if (k > points.rows) {
    throw DataError("k = " + std::to_string(k) + " exceeds the number of points " +
                    std::to_string(points.rows));
  }
  if (!all_finite(points)) throw DataError("k-means input contains non-finite values");

  ClusterModel model;
  model.k = k;
  model.centroids = seed_centroids(points, k, rng);
  model.assignments.assign(points.rows, 0);

  std::vector<double> best_d2(points.rows, 0.0);
  std::vector<std::size_t> counts(k, 0);
  Matrix sums(k, points.cols);

  for (std::size_t iter = 1; iter <= max_iters; ++iter) {
    model.iterations = iter;
    assign_points(points, model.centroids, model.assignments, best_d2);

    // re-seed empty clusters to the point farthest from its assigned centroid
    std::fill(counts.begin(), counts.end(), 0);
    for (const int a : model.assignments) ++counts[static_cast<std::size_t>(a)];
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] != 0) continue;
      std::size_t farthest = 0;
      double far_d2 = -1.0;
      for (std::size_t i = 0; i < points.rows; ++i) {
        if (counts[static_cast<std::size_t>(model.assignments[i])] > 1 && best_d2[i] > far_d2) {
          far_d2 = best_d2[i];
          farthest = i;
        }
      }
      --counts[static_cast<std::size_t>(model.assignments[farthest])];
      model.assignments[farthest] = static_cast<int>(c);
      counts[c] = 1;
      best_d2[farthest] = 0.0;
    }

    std::fill(sums.data.begin(), sums.data.end(), 0.0);
    for (std::size_t i = 0; i < points.rows; ++i) {
      const auto row = points.row(i);
      auto srow = sums.row(static_cast<std::size_t>(model.assignments[i]));
      for (std::size_t f = 0; f < points.cols; ++f) srow[f] += row[f];
    }
    double max_shift = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      auto crow = model.centroids.row(c);
      double shift2 = 0.0;
      for (std::size_t f = 0; f < points.cols; ++f) {
        const double updated = sums(c, f) / static_cast<double>(counts[c]);
        const double d = updated - crow[f];
        shift2 += d * d;
        crow[f] = updated;
      }
      max_shift = std::max(max_shift, std::sqrt(shift2));
    }
    if (max_shift < tol) break;
  }

  assign_points(points, model.centroids, model.assignments, best_d2);
  model.inertia = std::accumulate(best_d2.begin(), best_d2.end(), 0.0);
  return model;
}

LabelSet select_pseudo_labels(const ClusterModel& model, const Matrix& points,
                              std::size_t per_cluster) {
  if (per_cluster < 1) throw UsageError("per_cluster must be at least 1");
  if (model.k == 0 || model.assignments.empty()) throw DataError("empty cluster model");
  if (model.assignments.size() != points.rows) {
    throw DataError("cluster model does not match the point matrix");
  }

  LabelSet labels(points.rows, model.k);
  for (std::size_t c = 0; c < model.k; ++c) {
    std::vector<std::pair<double, NodeId>> members;
    for (NodeId i = 0; i < points.rows; ++i) {
      if (static_cast<std::size_t>(model.assignments[i]) == c) {
        members.emplace_back(dist_squared(points.row(i), model.centroids.row(c)), i);
      }
    }
    std::sort(members.begin(), members.end());  // distance, then node id
    const std::size_t take = std::min(per_cluster, members.size());
    for (std::size_t t = 0; t < take; ++t) {
      labels.assignments[members[t].second] = static_cast<int>(c);
    }
  }
  return labels;
}

}  // namespace clad
