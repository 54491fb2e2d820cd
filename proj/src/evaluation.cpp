#include "clad/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "clad/errors.hpp"

namespace clad {

double roc_auc(std::span<const double> scores, const std::vector<NodeId>& positives) {
  const std::size_t n = scores.size();
  std::vector<bool> is_pos(n, false);
  for (const NodeId i : positives) {
    if (i >= n) throw DataError("roc_auc: positive id out of range");
    is_pos[i] = true;
  }
  std::size_t n_pos = 0;
  for (const bool b : is_pos) n_pos += b;
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) {
    throw DataError("roc_auc needs at least one positive and one negative");
  }
  for (const double s : scores) {
    if (!std::isfinite(s)) throw NumericError("roc_auc: non-finite score");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // average 1-based ranks over tie groups, accumulated for the positives
  double pos_rank_sum = 0.0;
  std::size_t lo = 0;
  while (lo < n) {
    std::size_t hi = lo;
    while (hi + 1 < n && scores[order[hi + 1]] == scores[order[lo]]) ++hi;
    const double avg_rank = 0.5 * static_cast<double>(lo + 1 + hi + 1);
    for (std::size_t k = lo; k <= hi; ++k) {
      if (is_pos[order[k]]) pos_rank_sum += avg_rank;
    }
    lo = hi + 1;
  }

  const double np = static_cast<double>(n_pos);
  const double nn = static_cast<double>(n_neg);
  return (pos_rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

namespace {

// AUC over the subset {anomalies of `flag`} + {benign}; absent when either
// side is empty.
std::optional<double> subset_auc(std::span<const double> scores, const AnomalyGroundTruth& truth,
                                 AnomalyFlag flag) {
  std::vector<double> sub;
  std::vector<NodeId> pos;
  for (NodeId i = 0; i < truth.flags.size(); ++i) {
    if (truth.flags[i] == flag) {
      pos.push_back(sub.size());
      sub.push_back(scores[i]);
    } else if (truth.flags[i] == AnomalyFlag::Benign) {
      sub.push_back(scores[i]);
    }
  }
  if (pos.empty() || pos.size() == sub.size()) return std::nullopt;
  return roc_auc(sub, pos);
}

}  // namespace

TypeAucs auc_by_type(std::span<const double> scores, const AnomalyGroundTruth& truth) {
  if (scores.size() != truth.flags.size()) {
    throw DataError("auc_by_type: score and truth lengths differ");
  }
  TypeAucs result;
  result.structural = subset_auc(scores, truth, AnomalyFlag::Structural);
  result.attribute = subset_auc(scores, truth, AnomalyFlag::Attribute);
  return result;
}

double neighborhood_label_entropy(const AttributedGraph& graph, const LabelSet& labels, NodeId i) {
  const auto nbrs = graph.neighbors(i);
  if (nbrs.empty()) return 0.0;
  std::vector<double> hist(labels.n_classes, 0.0);
  for (const NodeId j : nbrs) {
    const int cls = labels.assignments[j];
    if (cls == LabelSet::kUnlabeled) {
      throw DataError("neighborhood_label_entropy: neighbor " + std::to_string(j) +
                      " is unlabeled");
    }
    hist[static_cast<std::size_t>(cls)] += 1.0;
  }
  const double total = static_cast<double>(nbrs.size());
  double h = 0.0;
  for (const double count : hist) {
    if (count > 0.0) {
      const double p = count / total;
      h -= p * std::log(p);
    }
  }
  return h;
}

ConfusionCounts entropy_threshold_detect(const AttributedGraph& graph, const LabelSet& labels,
                                         const AnomalyGroundTruth& truth, double threshold) {
  ConfusionCounts counts;
  for (NodeId i = 0; i < graph.n_nodes(); ++i) {
    if (truth.flags[i] == AnomalyFlag::Attribute) continue;
    const bool flagged = neighborhood_label_entropy(graph, labels, i) > threshold;
    if (truth.flags[i] == AnomalyFlag::Structural) {
      flagged ? ++counts.tp : ++counts.fn;
    } else {
      flagged ? ++counts.fp : ++counts.tn;
    }
  }
  return counts;
}

namespace {

struct ScoredNode {
  NodeId node;
  std::size_t degree;
  double jsd, jsd2, jsd_plus;
};

// value-based quantile edges: bucket b covers degrees up to the
// ceil((b+1)*n/groups)-th smallest. Equal degrees collapse into the earliest
// bucket, so an all-equal population occupies a single bucket.
std::vector<std::size_t> quantile_edges(std::vector<std::size_t> degrees, std::size_t groups) {
  std::sort(degrees.begin(), degrees.end());
  std::vector<std::size_t> edges(groups);
  for (std::size_t b = 0; b < groups; ++b) {
    const std::size_t idx = std::min(degrees.size() - 1, ((b + 1) * degrees.size()) / groups - 1);
    edges[b] = degrees[idx];
  }
  return edges;
}

std::size_t bucket_of(std::size_t degree, const std::vector<std::size_t>& edges) {
  for (std::size_t b = 0; b + 1 < edges.size(); ++b) {
    if (degree <= edges[b]) return b;
  }
  return edges.size() - 1;
}

}  // namespace

std::vector<DegreeBiasBucket> degree_bias_report(const ClassDistributionMatrix& p,
                                                 const AttributedGraph& graph,
                                                 const AnomalyGroundTruth& truth,
                                                 std::size_t n_groups) {
  if (n_groups < 1) throw UsageError("degree_bias_report needs at least one group");
  if (truth.flags.size() != graph.n_nodes()) {
    throw DataError("degree_bias_report: truth does not match the graph");
  }

  std::vector<ScoredNode> anomalies;
  std::vector<ScoredNode> benign;
  for (NodeId i = 0; i < graph.n_nodes(); ++i) {
    if (truth.flags[i] == AnomalyFlag::Attribute) continue;
    ScoredNode s{i, graph.degree(i), jsd(graph, p, i), 0.0, 0.0};
    s.jsd2 = jsd2(graph, p, i);
    s.jsd_plus = jsd_plus(graph, p, i);
    (truth.flags[i] == AnomalyFlag::Structural ? anomalies : benign).push_back(s);
  }
  if (anomalies.empty() || benign.empty()) {
    throw DataError("degree_bias_report needs structural anomalies and benign nodes");
  }

  std::vector<std::size_t> anom_degrees, benign_degrees;
  for (const auto& s : anomalies) anom_degrees.push_back(s.degree);
  for (const auto& s : benign) benign_degrees.push_back(s.degree);
  const auto anom_edges = quantile_edges(anom_degrees, n_groups);
  const auto benign_edges = quantile_edges(benign_degrees, n_groups);

  std::vector<std::vector<const ScoredNode*>> anom_buckets(n_groups), benign_buckets(n_groups);
  for (const auto& s : anomalies) anom_buckets[bucket_of(s.degree, anom_edges)].push_back(&s);
  for (const auto& s : benign) benign_buckets[bucket_of(s.degree, benign_edges)].push_back(&s);

  const auto metric_of = [](const ScoredNode* s, int which) {
    return which == 0 ? s->jsd : which == 1 ? s->jsd2 : s->jsd_plus;
  };

  std::vector<DegreeBiasBucket> report(n_groups);
  for (std::size_t b = 0; b < n_groups; ++b) {
    DegreeBiasBucket& bucket = report[b];
    bucket.n_anomalies = anom_buckets[b].size();
    bucket.n_benign = benign_buckets[b].size();
    const auto degree_range = [](const std::vector<const ScoredNode*>& nodes, std::size_t& lo,
                                 std::size_t& hi) {
      if (nodes.empty()) return;
      lo = hi = nodes.front()->degree;
      for (const auto* s : nodes) {
        lo = std::min(lo, s->degree);
        hi = std::max(hi, s->degree);
      }
    };
    degree_range(anom_buckets[b], bucket.anomaly_degree_lo, bucket.anomaly_degree_hi);
    degree_range(benign_buckets[b], bucket.benign_degree_lo, bucket.benign_degree_hi);

    for (int which = 0; which < 3; ++which) {
      DegreeBiasCell& cell = which == 0 ? bucket.jsd : which == 1 ? bucket.jsd2 : bucket.jsd_plus;
      double anom_sum = 0.0, benign_sum = 0.0;
      for (const auto* s : anom_buckets[b]) anom_sum += metric_of(s, which);
      for (const auto* s : benign_buckets[b]) benign_sum += metric_of(s, which);
      if (!anom_buckets[b].empty()) {
        cell.anomaly_mean = anom_sum / static_cast<double>(anom_buckets[b].size());
      }
      if (!benign_buckets[b].empty()) {
        cell.benign_mean = benign_sum / static_cast<double>(benign_buckets[b].size());
      }
      if (!anom_buckets[b].empty() && !benign_buckets[b].empty()) {
        cell.gap = cell.anomaly_mean - cell.benign_mean;
      }

      // bucket anomalies vs benign nodes of the other buckets (all benign
      // when there is a single bucket)
      std::vector<double> sub;
      std::vector<NodeId> pos;
      for (const auto* s : anom_buckets[b]) {
        pos.push_back(sub.size());
        sub.push_back(metric_of(s, which));
      }
      for (std::size_t other = 0; other < n_groups; ++other) {
        if (n_groups > 1 && other == b) continue;
        for (const auto* s : benign_buckets[other]) sub.push_back(metric_of(s, which));
      }
      if (!pos.empty() && pos.size() < sub.size()) {
        cell.cross_auc = roc_auc(sub, pos);
      }
    }
  }
  return report;
}

AblationAucs ablation(const AttributedGraph& graph, const ClassDistributionMatrix& p,
                      const AnomalyGroundTruth& truth, double alpha) {
  const auto positives = [&truth] {
    std::vector<NodeId> pos;
    for (NodeId i = 0; i < truth.flags.size(); ++i) {
      if (truth.flags[i] != AnomalyFlag::Benign) pos.push_back(i);
    }
    return pos;
  }();
  const auto run = [&](StructuralMetric metric) {
    const AnomalyScores scores = compute_anomaly_scores(graph, p, alpha, metric);
    return roc_auc(scores.final_score, positives);
  };
  return {run(StructuralMetric::Jsd), run(StructuralMetric::Jsd2), run(StructuralMetric::JsdPlus)};
}

std::vector<double> default_alpha_grid() {
  std::vector<double> grid(11);
  for (int i = 0; i <= 10; ++i) grid[static_cast<std::size_t>(i)] = 0.1 * i;
  return grid;
}

AlphaSweepResult alpha_sweep(std::span<const double> struc_scaled,
                             std::span<const double> attr_scaled, const AnomalyGroundTruth& truth,
                             std::span<const double> grid) {
  if (grid.empty()) throw UsageError("alpha_sweep: empty grid");
  std::vector<NodeId> positives;
  for (NodeId i = 0; i < truth.flags.size(); ++i) {
    if (truth.flags[i] != AnomalyFlag::Benign) positives.push_back(i);
  }
  AlphaSweepResult result;
  for (const double alpha : grid) {
    const AnomalyScores scores = fuse(struc_scaled, attr_scaled, alpha);
    const double auc = roc_auc(scores.final_score, positives);
    result.entries.push_back({alpha, auc});
    if (result.entries.size() == 1 || auc > result.best_auc) {
      result.best_alpha = alpha;
      result.best_auc = auc;
    }
  }
  return result;
}

EvalReport evaluate(const AnomalyScores& scores, const AnomalyGroundTruth& truth) {
  if (scores.final_score.size() != truth.flags.size()) {
    throw DataError("evaluate: score and truth lengths differ");
  }
  std::vector<NodeId> positives;
  for (NodeId i = 0; i < truth.flags.size(); ++i) {
    if (truth.flags[i] != AnomalyFlag::Benign) positives.push_back(i);
  }
  EvalReport report;
  report.alpha = scores.alpha;
  report.auc_overall = roc_auc(scores.final_score, positives);
  const TypeAucs typed = auc_by_type(scores.final_score, truth);
  report.auc_structural = typed.structural;
  report.auc_attribute = typed.attribute;
  return report;
}

}  // namespace clad
