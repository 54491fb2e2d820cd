#pragma once

#include <cstdint>

#include "clad/graph.hpp"
#include "clad/labels.hpp"
#include "clad/rng.hpp"

namespace clad {

struct InjectionConfig {
  std::size_t clique_size = 15;            // p, nodes per planted clique
  std::size_t n_cliques = 5;               // q
  std::size_t n_attribute_anomalies = 75;  // m
  std::size_t candidate_pool = 50;         // k, candidates per attribute target
  std::uint64_t seed = 0;

  void validate(std::size_t n_nodes) const;
};

struct InjectionResult {
  AttributedGraph graph;
  AnomalyGroundTruth truth;
  std::size_t edges_added = 0;  // clique edges that did not already exist
};

// Plant q disjoint cliques of p nodes each, sampled uniformly from nodes not
// already flagged in `prior`. Clique members are flagged Structural; their
// attributes are untouched.
InjectionResult inject_structural(const AttributedGraph& graph, const InjectionConfig& config,
                                  Rng& rng, const AnomalyGroundTruth* prior = nullptr);

// For each of m uniformly sampled unflagged nodes v_i: draw k candidate nodes,
// overwrite x_i with the attributes of the candidate farthest in Euclidean
// distance, flag v_i Attribute. Edges are untouched; donors stay benign.
InjectionResult inject_attribute(const AttributedGraph& graph, const InjectionConfig& config,
                                 Rng& rng, const AnomalyGroundTruth* prior = nullptr);

// Structural pass followed by the attribute pass, driven by config.seed.
InjectionResult inject_anomalies(const AttributedGraph& graph, const InjectionConfig& config);

}  // namespace clad
