#pragma once

#include <cstdint>

#include "clad/graph.hpp"
#include "clad/labels.hpp"

namespace clad {

// Planted-community benchmark: a degree-corrected stochastic block model with
// homophilous edges plus community-coded Gaussian attributes. Per-node degree
// factors are lognormal, giving the heavy-tailed degree profile the degree-
// bias analyses need.
struct BenchmarkConfig {
  std::size_t n_nodes = 3000;
  std::size_t n_communities = 5;
  std::size_t n_features = 20;
  double intra_degree = 5.5;    // expected same-community degree at factor 1
  double inter_degree = 0.7;    // expected cross-community degree at factor 1
  double degree_spread = 1.25;  // sigma of the lognormal degree factors
  double center_scale = 1.4;    // attribute block height per community
  double attr_noise = 1.0;      // per-feature Gaussian noise
  double noise_spread = 0.6;    // sigma of the lognormal per-node noise factors
  std::uint64_t seed = 0;

  void validate() const;
};

struct Benchmark {
  AttributedGraph graph;
  LabelSet labels;  // full community labels, C = n_communities
};

Benchmark make_benchmark(const BenchmarkConfig& config);

}  // namespace clad
