#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "clad/graph.hpp"
#include "clad/rng.hpp"

namespace clad {

// Partial class-label assignment. assignments[i] is the class of node i in
// [0, n_classes), or kUnlabeled.
struct LabelSet {
  static constexpr int kUnlabeled = -1;

  std::size_t n_classes = 0;
  std::vector<int> assignments;

  LabelSet() = default;
  LabelSet(std::size_t n_nodes, std::size_t n_classes_)
      : n_classes(n_classes_), assignments(n_nodes, kUnlabeled) {}

  bool is_labeled(NodeId i) const { return assignments[i] != kUnlabeled; }
  std::size_t n_labeled() const;
  std::vector<NodeId> labeled_nodes() const;  // ascending
  void set(NodeId i, int cls);                // validates the class index
};

// Keep a uniform random subset of the labeled nodes. `sample_label_fraction`
// keeps round(fraction * n_labeled) of them.
LabelSet sample_label_fraction(const LabelSet& labels, double fraction, Rng& rng);
LabelSet sample_label_count(const LabelSet& labels, std::size_t count, Rng& rng);

enum class AnomalyFlag : std::uint8_t { Benign = 0, Structural = 1, Attribute = 2 };

struct AnomalyGroundTruth {
  std::vector<AnomalyFlag> flags;

  AnomalyGroundTruth() = default;
  explicit AnomalyGroundTruth(std::size_t n_nodes) : flags(n_nodes, AnomalyFlag::Benign) {}

  std::size_t n_nodes() const { return flags.size(); }
  std::size_t count(AnomalyFlag f) const;
  std::size_t n_anomalies() const {
    return count(AnomalyFlag::Structural) + count(AnomalyFlag::Attribute);
  }
  std::vector<NodeId> nodes_with(AnomalyFlag f) const;  // ascending
};

}  // namespace clad
