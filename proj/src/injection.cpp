#include "clad/injection.hpp"

#include <cmath>
#include <string>

#include "clad/errors.hpp"

namespace clad {

void InjectionConfig::validate(std::size_t n_nodes) const {
  if (n_cliques > 0 && clique_size < 2) {
    throw UsageError("clique size must be at least 2");
  }
  if (candidate_pool < 1) throw UsageError("candidate pool must be at least 1");
  if (n_cliques * clique_size + n_attribute_anomalies > n_nodes) {
    throw UsageError("anomaly budget q*p + m exceeds the node count");
  }
}

namespace {

std::vector<NodeId> unflagged_nodes(std::size_t n_nodes, const AnomalyGroundTruth* prior) {
  std::vector<NodeId> pool;
  pool.reserve(n_nodes);
  for (NodeId i = 0; i < n_nodes; ++i) {
    if (prior == nullptr || prior->flags[i] == AnomalyFlag::Benign) pool.push_back(i);
  }
  return pool;
}

AnomalyGroundTruth copy_prior(std::size_t n_nodes, const AnomalyGroundTruth* prior) {
  return prior != nullptr ? *prior : AnomalyGroundTruth(n_nodes);
}

double distance(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t f = 0; f < a.size(); ++f) {
    const double d = a[f] - b[f];
    acc += d * d;
  }
  return std::sqrt(acc);
}

}  // namespace

InjectionResult inject_structural(const AttributedGraph& graph, const InjectionConfig& config,
                                  Rng& rng, const AnomalyGroundTruth* prior) {
  const std::size_t wanted = config.n_cliques * config.clique_size;
  if (config.n_cliques > 0 && config.clique_size < 2) {
    throw UsageError("clique size must be at least 2");
  }
  const auto pool = unflagged_nodes(graph.n_nodes(), prior);
  if (wanted > pool.size()) {
    throw DataError("structural injection needs " + std::to_string(wanted) +
                    " free nodes, only " + std::to_string(pool.size()) + " available");
  }

  AnomalyGroundTruth truth = copy_prior(graph.n_nodes(), prior);
  auto edges = graph.edge_list();
  std::size_t added = 0;

  const auto picks = rng.sample_without_replacement(pool.size(), wanted);
  for (std::size_t c = 0; c < config.n_cliques; ++c) {
    for (std::size_t a = 0; a < config.clique_size; ++a) {
      const NodeId u = pool[picks[c * config.clique_size + a]];
      truth.flags[u] = AnomalyFlag::Structural;
      for (std::size_t b = a + 1; b < config.clique_size; ++b) {
        const NodeId v = pool[picks[c * config.clique_size + b]];
        edges.emplace_back(u, v);
        if (!graph.has_edge(u, v)) ++added;
      }
    }
  }

  AttributedGraph out(graph.n_nodes(), edges, graph.attributes());
  return {std::move(out), std::move(truth), added};
}

InjectionResult inject_attribute(const AttributedGraph& graph, const InjectionConfig& config,
                                 Rng& rng, const AnomalyGroundTruth* prior) {
  const auto pool = unflagged_nodes(graph.n_nodes(), prior);
  if (config.n_attribute_anomalies > pool.size()) {
    throw DataError("attribute injection needs " + std::to_string(config.n_attribute_anomalies) +
                    " free nodes, only " + std::to_string(pool.size()) + " available");
  }
  if (config.candidate_pool < 1) throw UsageError("candidate pool must be at least 1");

  AnomalyGroundTruth truth = copy_prior(graph.n_nodes(), prior);
  Matrix attrs = graph.attributes();

  const auto picks = rng.sample_without_replacement(pool.size(), config.n_attribute_anomalies);
  for (const std::size_t pick : picks) {
    const NodeId target = pool[pick];
    // candidates are drawn from all nodes except the target itself
    const std::size_t k = std::min(config.candidate_pool, graph.n_nodes() - 1);
    const auto draws = rng.sample_without_replacement(graph.n_nodes() - 1, k);
    NodeId best = target;
    double best_dist = -1.0;
    for (const std::size_t d : draws) {
      const NodeId candidate = d < target ? d : d + 1;
      const double dist = distance(attrs.row(target), attrs.row(candidate));
      if (dist > best_dist) {
        best_dist = dist;
        best = candidate;
      }
    }
    const auto src = attrs.row(best);
    std::vector<double> donor(src.begin(), src.end());
    auto dst = attrs.row(target);
    std::copy(donor.begin(), donor.end(), dst.begin());
    truth.flags[target] = AnomalyFlag::Attribute;
  }

  AttributedGraph out(graph.n_nodes(), graph.edge_list(), std::move(attrs));
  return {std::move(out), std::move(truth), 0};
}

InjectionResult inject_anomalies(const AttributedGraph& graph, const InjectionConfig& config) {
  config.validate(graph.n_nodes());
  Rng rng(config.seed);
  InjectionResult structural = inject_structural(graph, config, rng);
  InjectionResult both = inject_attribute(structural.graph, config, rng, &structural.truth);
  both.edges_added = structural.edges_added;
  return both;
}

}  // namespace clad
