#pragma once

#include <cstddef>

#include "clad/labels.hpp"
#include "clad/matrix.hpp"
#include "clad/rng.hpp"

namespace clad {

struct ClusterModel {
  std::size_t k = 0;
  Matrix centroids;             // k x F
  std::vector<int> assignments;
  double inertia = 0.0;         // sum of squared distances to assigned centroid
  std::size_t iterations = 0;
};

// Lloyd iterations from k-means++ initialization until the largest centroid
// displacement drops below tol or max_iters is reached. Empty clusters are
// re-seeded to the point farthest from its assigned centroid. All ties break
// on the lowest index, so the result is fully determined by the rng state.
ClusterModel kmeans(const Matrix& points, std::size_t k, Rng& rng, std::size_t max_iters = 100,
                    double tol = 1e-6);

// Label the min(per_cluster, cluster size) nodes closest to each centroid with
// the centroid's cluster index; everything else stays unlabeled. C = k.
LabelSet select_pseudo_labels(const ClusterModel& model, const Matrix& points,
                              std::size_t per_cluster);

}  // namespace clad
