#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "clad/matrix.hpp"

namespace clad {

using NodeId = std::size_t;

// Sparse matrix in compressed row storage.
struct CsrMatrix {
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  std::vector<std::size_t> indptr;  // size n_rows + 1
  std::vector<NodeId> indices;
  std::vector<double> values;
};

// out = s * d, rows of `out` computed independently (thread-safe to parallelize)
Matrix csr_matmul(const CsrMatrix& s, const Matrix& d);

// One-hop neighborhood of `center`, sorted ascending. When `includes_self` is
// set, `center` appears in `members` exactly once.
struct NeighborhoodView {
  NodeId center = 0;
  std::vector<NodeId> members;
  bool includes_self = false;
};

// Undirected attributed graph. Neighbor lists are stored CSR-style: sorted,
// deduplicated, without self-loops (self-inclusion is applied explicitly where
// the math requires it). Immutable after construction, so concurrent reads
// from scoring workers are safe.
class AttributedGraph {
 public:
  // Edges may contain duplicates and both orientations; they are deduplicated.
  // Self-loops are dropped and counted. Attribute row count must equal n_nodes.
  AttributedGraph(std::size_t n_nodes, const std::vector<std::pair<NodeId, NodeId>>& edges,
                  Matrix attributes);

  std::size_t n_nodes() const { return n_nodes_; }
  std::size_t n_edges() const { return indices_.size() / 2; }
  std::size_t n_features() const { return attributes_.cols; }
  const Matrix& attributes() const { return attributes_; }
  std::size_t dropped_self_loops() const { return dropped_self_loops_; }

  // Raw graph degree, self-loop excluded.
  std::size_t degree(NodeId i) const;

  std::span<const NodeId> neighbors(NodeId i) const;
  bool has_edge(NodeId u, NodeId v) const;

  NeighborhoodView neighborhood(NodeId i, bool include_self) const;

  // Edges as (u, v) with u < v, sorted ascending.
  std::vector<std::pair<NodeId, NodeId>> edge_list() const;

  // A_hat = D~^{-1/2} (A + I) D~^{-1/2} with D~ the degree matrix of A + I.
  CsrMatrix normalized_adjacency() const;

 private:
  void check_node(NodeId i) const;

  std::size_t n_nodes_ = 0;
  std::vector<std::size_t> indptr_;
  std::vector<NodeId> indices_;
  Matrix attributes_;
  std::size_t dropped_self_loops_ = 0;
};

}  // namespace clad
