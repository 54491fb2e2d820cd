#include "clad/scores.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "clad/errors.hpp"
#include "clad/parallel.hpp"

namespace clad {

namespace {

double entropy_unchecked(std::span<const double> p) {
  double h = 0.0;
  for (const double v : p) {
    if (v > 0.0) h -= v * std::log(v);
  }
  return h;
}

std::size_t argmax_class(std::span<const double> p) {
  // ties resolve to the lowest class index
  std::size_t best = 0;
  for (std::size_t c = 1; c < p.size(); ++c) {
    if (p[c] > p[best]) best = c;
  }
  return best;
}

}  // namespace

double shannon_entropy(std::span<const double> p) {
  double sum = 0.0;
  for (const double v : p) {
    if (v < 0.0 || std::isnan(v)) throw NumericError("entropy input has a negative or NaN entry");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-6) {
    throw NumericError("entropy input does not sum to 1 (sum = " + std::to_string(sum) + ")");
  }
  return entropy_unchecked(p);
}

double jsd(const AttributedGraph& graph, const ClassDistributionMatrix& p, NodeId i) {
  const auto nbrs = graph.neighbors(i);
  const std::size_t c = p.n_classes();
  const double count = static_cast<double>(nbrs.size() + 1);

  std::vector<double> mean(c, 0.0);
  double mean_entropy = 0.0;
  bool self_done = false;
  const auto accumulate = [&](NodeId j) {
    const auto row = p.row(j);
    for (std::size_t k = 0; k < c; ++k) mean[k] += row[k];
    mean_entropy += entropy_unchecked(row);
  };
  // members in ascending order with the node itself included
  for (const NodeId j : nbrs) {
    if (!self_done && j > i) {
      accumulate(i);
      self_done = true;
    }
    accumulate(j);
  }
  if (!self_done) accumulate(i);

  for (double& v : mean) v /= count;
  mean_entropy /= count;
  return std::max(0.0, entropy_unchecked(mean) - mean_entropy);
}

std::size_t gamma_agreement(const AttributedGraph& graph, const ClassDistributionMatrix& p,
                            NodeId i) {
  const std::size_t own = argmax_class(p.row(i));
  std::size_t agree = 0;
  for (const NodeId j : graph.neighbors(i)) {
    agree += (argmax_class(p.row(j)) == own);
  }
  return agree;
}

double jsd2(const AttributedGraph& graph, const ClassDistributionMatrix& p, NodeId i) {
  const std::size_t deg = graph.degree(i);
  return jsd(graph, p, i) * std::log(static_cast<double>(std::max<std::size_t>(deg, 1)));
}

double jsd_plus(const AttributedGraph& graph, const ClassDistributionMatrix& p, NodeId i) {
  const std::size_t deg = graph.degree(i);
  const std::size_t agree = gamma_agreement(graph, p, i);
  const std::size_t disagree = deg > agree ? deg - agree : 0;
  return jsd(graph, p, i) * std::log(static_cast<double>(std::max<std::size_t>(disagree, 1)));
}

double ed(const AttributedGraph& graph, NodeId i) {
  const auto nbrs = graph.neighbors(i);
  if (nbrs.empty()) return 0.0;
  const Matrix& x = graph.attributes();
  const auto xi = x.row(i);
  double acc = 0.0;
  for (const NodeId j : nbrs) {
    const auto xj = x.row(j);
    double d2 = 0.0;
    for (std::size_t f = 0; f < xi.size(); ++f) {
      const double d = xi[f] - xj[f];
      d2 += d * d;
    }
    acc += std::sqrt(d2);
  }
  // the node itself is a member of its neighborhood and contributes distance 0
  return acc / static_cast<double>(nbrs.size() + 1);
}

std::vector<double> minmax_scale(std::span<const double> values) {
  std::vector<double> out(values.size(), 0.0);
  if (values.empty()) return out;
  double lo = values[0], hi = values[0];
  for (const double v : values) {
    if (!std::isfinite(v)) throw NumericError("minmax_scale: non-finite input");
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (hi == lo) return out;  // constant input maps to all zeros
  const double span = hi - lo;
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - lo) / span;
  return out;
}

AnomalyScores fuse(std::span<const double> struc_scaled, std::span<const double> attr_scaled,
                   double alpha) {
  if (alpha < 0.0 || alpha > 1.0) throw UsageError("alpha must lie in [0, 1]");
  if (struc_scaled.size() != attr_scaled.size()) {
    throw DataError("fuse: score vectors have different lengths");
  }
  AnomalyScores scores;
  scores.alpha = alpha;
  scores.struc_raw.assign(struc_scaled.begin(), struc_scaled.end());
  scores.attr_raw.assign(attr_scaled.begin(), attr_scaled.end());
  scores.struc = scores.struc_raw;
  scores.attr = scores.attr_raw;
  scores.final_score.resize(struc_scaled.size());
  for (std::size_t i = 0; i < struc_scaled.size(); ++i) {
    scores.final_score[i] = alpha * struc_scaled[i] + (1.0 - alpha) * attr_scaled[i];
  }
  scores.ranking.resize(struc_scaled.size());
  std::iota(scores.ranking.begin(), scores.ranking.end(), NodeId{0});
  std::sort(scores.ranking.begin(), scores.ranking.end(), [&](NodeId a, NodeId b) {
    if (scores.final_score[a] != scores.final_score[b]) {
      return scores.final_score[a] > scores.final_score[b];
    }
    return a < b;
  });
  scores.rank.resize(struc_scaled.size());
  for (std::size_t pos = 0; pos < scores.ranking.size(); ++pos) {
    scores.rank[scores.ranking[pos]] = pos + 1;
  }
  return scores;
}

AnomalyScores compute_anomaly_scores(const AttributedGraph& graph,
                                     const ClassDistributionMatrix& p, double alpha,
                                     StructuralMetric metric) {
  if (p.n_nodes() != graph.n_nodes()) {
    throw DataError("class distribution rows do not match the node count");
  }
  const std::size_t n = graph.n_nodes();
  std::vector<double> struc_raw(n, 0.0);
  std::vector<double> attr_raw(n, 0.0);
  parallel_for(0, n, [&](std::size_t i) {
    switch (metric) {
      case StructuralMetric::Jsd: struc_raw[i] = jsd(graph, p, i); break;
      case StructuralMetric::Jsd2: struc_raw[i] = jsd2(graph, p, i); break;
      case StructuralMetric::JsdPlus: struc_raw[i] = jsd_plus(graph, p, i); break;
    }
    attr_raw[i] = ed(graph, i);
  });

  AnomalyScores scores = fuse(minmax_scale(struc_raw), minmax_scale(attr_raw), alpha);
  scores.struc_raw = std::move(struc_raw);
  scores.attr_raw = std::move(attr_raw);
  return scores;
}

std::vector<DiagnosticsRow> compute_diagnostics(const AttributedGraph& graph,
                                                const ClassDistributionMatrix& p) {
  std::vector<DiagnosticsRow> rows(graph.n_nodes());
  parallel_for(0, graph.n_nodes(), [&](std::size_t i) {
    DiagnosticsRow& r = rows[i];
    r.node = i;
    r.degree = graph.degree(i);
    r.gamma = gamma_agreement(graph, p, i);
    r.jsd = jsd(graph, p, i);
    const std::size_t disagree = r.degree > r.gamma ? r.degree - r.gamma : 0;
    r.jsd2 = r.jsd * std::log(static_cast<double>(std::max<std::size_t>(r.degree, 1)));
    r.jsd_plus = r.jsd * std::log(static_cast<double>(std::max<std::size_t>(disagree, 1)));
    r.ed = ed(graph, i);
  });
  return rows;
}

}  // namespace clad
