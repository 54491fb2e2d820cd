#pragma once

#include <optional>
#include <span>
#include <vector>

#include "clad/gcn.hpp"
#include "clad/graph.hpp"
#include "clad/labels.hpp"
#include "clad/scores.hpp"

namespace clad {

// Mann-Whitney ROC-AUC with average ranks for ties. Needs at least one
// positive and one negative node.
double roc_auc(std::span<const double> scores, const std::vector<NodeId>& positives);

struct TypeAucs {
  std::optional<double> structural;  // over {structural anomalies} + {benign}
  std::optional<double> attribute;   // over {attribute anomalies} + {benign}
};

// Per-type AUC; a missing anomaly type yields an absent entry, not 0.
TypeAucs auc_by_type(std::span<const double> scores, const AnomalyGroundTruth& truth);

// Shannon entropy of the empirical class histogram over i's neighbors (self
// excluded). Requires every neighbor to be labeled; 0 for an isolated node.
double neighborhood_label_entropy(const AttributedGraph& graph, const LabelSet& labels, NodeId i);

struct ConfusionCounts {
  std::size_t tp = 0;  // structural anomalies flagged
  std::size_t fn = 0;  // structural anomalies missed
  std::size_t tn = 0;  // benign nodes not flagged
  std::size_t fp = 0;  // benign nodes flagged
};

// Flag every node whose neighborhood label entropy exceeds `threshold` and
// count the outcome against the structural ground truth. Attribute anomalies
// are neither structural positives nor benign negatives and are left out.
ConfusionCounts entropy_threshold_detect(const AttributedGraph& graph, const LabelSet& labels,
                                         const AnomalyGroundTruth& truth, double threshold);

struct DegreeBiasCell {
  double anomaly_mean = 0.0;
  double benign_mean = 0.0;
  std::optional<double> gap;        // anomaly_mean - benign_mean
  std::optional<double> cross_auc;  // bucket anomalies vs benign of other buckets
};

struct DegreeBiasBucket {
  std::size_t anomaly_degree_lo = 0, anomaly_degree_hi = 0;
  std::size_t benign_degree_lo = 0, benign_degree_hi = 0;
  std::size_t n_anomalies = 0, n_benign = 0;
  DegreeBiasCell jsd, jsd2, jsd_plus;
};

// Structural anomalies and benign nodes are each bucketed into n_groups
// quantiles of their own degree distribution (a +p clique shifts every
// anomaly's degree up by p-1, so joint quantiles would leave the low buckets
// without anomalies). Attribute anomalies are excluded. cross_auc of a bucket
// scores its anomalies against the benign nodes of the other buckets (against
// all benign when n_groups == 1).
std::vector<DegreeBiasBucket> degree_bias_report(const ClassDistributionMatrix& p,
                                                 const AttributedGraph& graph,
                                                 const AnomalyGroundTruth& truth,
                                                 std::size_t n_groups);

struct AblationAucs {
  double auc_jsd = 0.0;
  double auc_jsd2 = 0.0;
  double auc_jsd_plus = 0.0;
};

// Runs scaling + fusion + AUC three times, varying only the structural metric.
AblationAucs ablation(const AttributedGraph& graph, const ClassDistributionMatrix& p,
                      const AnomalyGroundTruth& truth, double alpha);

struct AlphaSweepEntry {
  double alpha = 0.0;
  double auc = 0.0;
};

struct AlphaSweepResult {
  std::vector<AlphaSweepEntry> entries;
  double best_alpha = 0.0;
  double best_auc = 0.0;  // ties resolve to the lowest alpha
};

std::vector<double> default_alpha_grid();  // 0.0, 0.1, ..., 1.0

AlphaSweepResult alpha_sweep(std::span<const double> struc_scaled,
                             std::span<const double> attr_scaled, const AnomalyGroundTruth& truth,
                             std::span<const double> grid);

struct EvalReport {
  double alpha = 0.0;
  double auc_overall = 0.0;
  std::optional<double> auc_structural;
  std::optional<double> auc_attribute;
};

EvalReport evaluate(const AnomalyScores& scores, const AnomalyGroundTruth& truth);

}  // namespace clad
