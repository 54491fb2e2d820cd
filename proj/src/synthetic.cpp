#include "clad/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "clad/errors.hpp"
#include "clad/rng.hpp"

namespace clad {

void BenchmarkConfig::validate() const {
  if (n_communities < 1) throw UsageError("benchmark needs at least one community");
  if (n_nodes < n_communities) throw UsageError("benchmark needs at least one node per community");
  if (n_features < n_communities) {
    throw UsageError("benchmark needs at least one feature per community");
  }
  if (!(intra_degree > 0.0) || inter_degree < 0.0) {
    throw UsageError("benchmark degrees must be positive");
  }
  if (degree_spread < 0.0 || attr_noise < 0.0 || noise_spread < 0.0) {
    throw UsageError("benchmark spread parameters must be non-negative");
  }
}

Benchmark make_benchmark(const BenchmarkConfig& config) {
  config.validate();
  const std::size_t n = config.n_nodes;
  const std::size_t k = config.n_communities;
  Rng rng(config.seed);

  std::vector<int> community(n);
  for (std::size_t i = 0; i < n; ++i) community[i] = static_cast<int>(i % k);

  // lognormal degree factors with mean 1
  const double sigma = config.degree_spread;
  std::vector<double> factor(n);
  for (std::size_t i = 0; i < n; ++i) {
    factor[i] = std::exp(sigma * rng.normal() - 0.5 * sigma * sigma);
  }

  const double community_size = static_cast<double>(n) / static_cast<double>(k);
  const double base_intra = config.intra_degree / (community_size - 1.0);
  const double base_inter = config.inter_degree / (static_cast<double>(n) - community_size);

  std::vector<std::pair<NodeId, NodeId>> edges;
  edges.reserve(static_cast<std::size_t>(
      0.75 * static_cast<double>(n) * (config.intra_degree + config.inter_degree)));
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) {
      const double base = community[i] == community[j] ? base_intra : base_inter;
      const double prob = std::min(0.95, factor[i] * factor[j] * base);
      if (rng.uniform() < prob) edges.emplace_back(i, j);
    }
  }

  // community-coded attribute blocks plus Gaussian noise; per-node lognormal
  // noise factors give the attribute-distance distribution a heavy tail
  const std::size_t block = config.n_features / k;
  Matrix attrs(n, config.n_features);
  for (NodeId i = 0; i < n; ++i) {
    auto row = attrs.row(i);
    const std::size_t c = static_cast<std::size_t>(community[i]);
    const double scale =
        config.attr_noise * std::exp(config.noise_spread * rng.normal() -
                                     0.5 * config.noise_spread * config.noise_spread);
    for (std::size_t f = c * block; f < (c + 1) * block; ++f) row[f] = config.center_scale;
    for (std::size_t f = 0; f < config.n_features; ++f) row[f] += scale * rng.normal();
  }

  LabelSet labels(n, k);
  labels.assignments.assign(community.begin(), community.end());

  return {AttributedGraph(n, edges, std::move(attrs)), std::move(labels)};
}

}  // namespace clad
