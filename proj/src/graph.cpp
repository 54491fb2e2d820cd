#include "clad/graph.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "clad/errors.hpp"
#include "clad/parallel.hpp"

namespace clad {

Matrix csr_matmul(const CsrMatrix& s, const Matrix& d) {
  if (s.n_cols != d.rows) throw NumericError("csr_matmul: inner dimensions differ");
  Matrix out(s.n_rows, d.cols);
  parallel_for(0, s.n_rows, [&](std::size_t i) {
    double* orow = out.data.data() + i * out.cols;
    for (std::size_t e = s.indptr[i]; e < s.indptr[i + 1]; ++e) {
      const double v = s.values[e];
      const double* drow = d.data.data() + s.indices[e] * d.cols;
      for (std::size_t j = 0; j < d.cols; ++j) orow[j] += v * drow[j];
    }
  });
  return out;
}

AttributedGraph::AttributedGraph(std::size_t n_nodes,
                                 const std::vector<std::pair<NodeId, NodeId>>& edges,
                                 Matrix attributes)
    : n_nodes_(n_nodes), attributes_(std::move(attributes)) {
  if (attributes_.rows != n_nodes_) {
    throw DataError("attribute row count " + std::to_string(attributes_.rows) +
                    " does not match node count " + std::to_string(n_nodes_));
  }
  std::vector<std::vector<NodeId>> adj(n_nodes_);
  for (const auto& [u, v] : edges) {
    if (u >= n_nodes_ || v >= n_nodes_) {
      throw DataError("edge endpoint " + std::to_string(std::max(u, v)) +
                      " out of range for " + std::to_string(n_nodes_) + " nodes");
    }
    if (u == v) {
      ++dropped_self_loops_;
      continue;
    }
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  indptr_.assign(n_nodes_ + 1, 0);
  for (NodeId i = 0; i < n_nodes_; ++i) {
    auto& nbrs = adj[i];
    std::sort(nbrs.begin(), nbrs.end());
    nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
    indptr_[i + 1] = indptr_[i] + nbrs.size();
  }
  indices_.reserve(indptr_[n_nodes_]);
  for (NodeId i = 0; i < n_nodes_; ++i) {
    indices_.insert(indices_.end(), adj[i].begin(), adj[i].end());
  }
}

void AttributedGraph::check_node(NodeId i) const {
  if (i >= n_nodes_) {
    throw DataError("node id " + std::to_string(i) + " out of range for " +
                    std::to_string(n_nodes_) + " nodes");
  }
}

std::size_t AttributedGraph::degree(NodeId i) const {
  check_node(i);
  return indptr_[i + 1] - indptr_[i];
}

std::span<const NodeId> AttributedGraph::neighbors(NodeId i) const {
  check_node(i);
  return {indices_.data() + indptr_[i], indptr_[i + 1] - indptr_[i]};
}

bool AttributedGraph::has_edge(NodeId u, NodeId v) const {
  const auto nbrs = neighbors(u);
  return std::binary_search(nbrs.begin(), nbrs.end(), v);
}

NeighborhoodView AttributedGraph::neighborhood(NodeId i, bool include_self) const {
  const auto nbrs = neighbors(i);
  NeighborhoodView view;
  view.center = i;
  view.includes_self = include_self;
  view.members.assign(nbrs.begin(), nbrs.end());
  if (include_self) {
    const auto pos = std::lower_bound(view.members.begin(), view.members.end(), i);
    view.members.insert(pos, i);
  }
  return view;
}

std::vector<std::pair<NodeId, NodeId>> AttributedGraph::edge_list() const {
  std::vector<std::pair<NodeId, NodeId>> edges;
  edges.reserve(n_edges());
  for (NodeId u = 0; u < n_nodes_; ++u) {
    for (std::size_t e = indptr_[u]; e < indptr_[u + 1]; ++e) {
      const NodeId v = indices_[e];
      if (u < v) edges.emplace_back(u, v);
    }
  }
  return edges;
}

CsrMatrix AttributedGraph::normalized_adjacency() const {
  CsrMatrix out;
  out.n_rows = out.n_cols = n_nodes_;
  out.indptr.assign(n_nodes_ + 1, 0);
  std::vector<double> inv_sqrt_deg(n_nodes_);
  for (NodeId i = 0; i < n_nodes_; ++i) {
    inv_sqrt_deg[i] = 1.0 / std::sqrt(static_cast<double>(degree(i) + 1));
    out.indptr[i + 1] = out.indptr[i] + degree(i) + 1;
  }
  out.indices.reserve(out.indptr[n_nodes_]);
  out.values.reserve(out.indptr[n_nodes_]);
  for (NodeId i = 0; i < n_nodes_; ++i) {
    const auto nbrs = neighbors(i);
    bool self_emitted = false;
    for (const NodeId j : nbrs) {
      if (!self_emitted && j > i) {
        out.indices.push_back(i);
        out.values.push_back(inv_sqrt_deg[i] * inv_sqrt_deg[i]);
        self_emitted = true;
      }
      out.indices.push_back(j);
      out.values.push_back(inv_sqrt_deg[i] * inv_sqrt_deg[j]);
    }
    if (!self_emitted) {
      out.indices.push_back(i);
      out.values.push_back(inv_sqrt_deg[i] * inv_sqrt_deg[i]);
    }
  }
  return out;
}

}  // namespace clad
