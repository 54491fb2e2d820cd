#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "clad/gcn.hpp"
#include "clad/graph.hpp"

namespace clad {

// -sum_c p_c ln p_c with 0 ln 0 := 0, in nats. Validates non-negativity and
// normalization within 1e-6.
double shannon_entropy(std::span<const double> p);

// Divergence of the predicted class distributions over the 1-hop neighborhood
// of i including i itself: H(mean p_j) - mean H(p_j). Zero for an isolated
// node. Result clamped to [0, ln C].
double jsd(const AttributedGraph& graph, const ClassDistributionMatrix& p, NodeId i);

// Number of neighbors (self excluded) whose argmax class equals i's own;
// argmax ties break to the lowest class index.
std::size_t gamma_agreement(const AttributedGraph& graph, const ClassDistributionMatrix& p,
                            NodeId i);

// jsd(i) * ln(max(degree_i, 1))
double jsd2(const AttributedGraph& graph, const ClassDistributionMatrix& p, NodeId i);

// jsd(i) * ln(max(degree_i - gamma_i, 1)); zero whenever at most one neighbor
// disagrees in predicted class.
double jsd_plus(const AttributedGraph& graph, const ClassDistributionMatrix& p, NodeId i);

// Mean Euclidean attribute distance over the 1-hop neighborhood of i including
// i itself (the self term contributes 0). Zero for an isolated node.
double ed(const AttributedGraph& graph, NodeId i);

// (v - min) / (max - min); a constant vector maps to all zeros.
std::vector<double> minmax_scale(std::span<const double> values);

struct AnomalyScores {
  std::vector<double> struc_raw;  // structural quantifier values
  std::vector<double> attr_raw;   // ED values
  std::vector<double> struc;      // min-max scaled into [0, 1]
  std::vector<double> attr;
  std::vector<double> final_score;  // alpha * struc + (1 - alpha) * attr
  double alpha = 0.0;
  std::vector<NodeId> ranking;    // node ids by descending final score, ties by id
  std::vector<std::size_t> rank;  // rank[node] in 1..N, 1 = highest score
};

// Convex combination of two scaled score vectors plus the descending ranking.
// The raw fields carry the inputs unchanged.
AnomalyScores fuse(std::span<const double> struc_scaled, std::span<const double> attr_scaled,
                   double alpha);

enum class StructuralMetric { Jsd, Jsd2, JsdPlus };

// Full scoring path: per-node structural metric (JSD+ by default) and ED,
// min-max scaling of both over all N nodes, then fusion at alpha.
AnomalyScores compute_anomaly_scores(const AttributedGraph& graph,
                                     const ClassDistributionMatrix& p, double alpha,
                                     StructuralMetric metric = StructuralMetric::JsdPlus);

struct DiagnosticsRow {
  NodeId node = 0;
  std::size_t degree = 0;
  std::size_t gamma = 0;
  double jsd = 0.0;
  double jsd2 = 0.0;
  double jsd_plus = 0.0;
  double ed = 0.0;
};

// Per-node table backing the degree-bias and swarm-plot analyses.
std::vector<DiagnosticsRow> compute_diagnostics(const AttributedGraph& graph,
                                                const ClassDistributionMatrix& p);

}  // namespace clad
