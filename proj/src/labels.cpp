#include "clad/labels.hpp"

#include <cmath>
#include <string>

#include "clad/errors.hpp"

namespace clad {

std::size_t LabelSet::n_labeled() const {
  std::size_t n = 0;
  for (const int a : assignments) n += (a != kUnlabeled);
  return n;
}

std::vector<NodeId> LabelSet::labeled_nodes() const {
  std::vector<NodeId> nodes;
  for (NodeId i = 0; i < assignments.size(); ++i) {
    if (assignments[i] != kUnlabeled) nodes.push_back(i);
  }
  return nodes;
}

void LabelSet::set(NodeId i, int cls) {
  if (i >= assignments.size()) {
    throw DataError("label node id " + std::to_string(i) + " out of range");
  }
  if (cls < 0 || static_cast<std::size_t>(cls) >= n_classes) {
    throw DataError("class index " + std::to_string(cls) + " out of range for " +
                    std::to_string(n_classes) + " classes");
  }
  assignments[i] = cls;
}

namespace {

LabelSet keep_labeled_subset(const LabelSet& labels, std::size_t count, Rng& rng) {
  const auto nodes = labels.labeled_nodes();
  LabelSet out(labels.assignments.size(), labels.n_classes);
  const auto picks = rng.sample_without_replacement(nodes.size(), count);
  for (const std::size_t idx : picks) {
    out.assignments[nodes[idx]] = labels.assignments[nodes[idx]];
  }
  return out;
}

}  // namespace

LabelSet sample_label_fraction(const LabelSet& labels, double fraction, Rng& rng) {
  if (!(fraction > 0.0) || fraction > 1.0) {
    throw UsageError("label fraction must be in (0, 1]");
  }
  const std::size_t n = labels.n_labeled();
  const auto count = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  return keep_labeled_subset(labels, std::min(count, n), rng);
}

LabelSet sample_label_count(const LabelSet& labels, std::size_t count, Rng& rng) {
  if (count > labels.n_labeled()) {
    throw DataError("requested " + std::to_string(count) + " labels but only " +
                    std::to_string(labels.n_labeled()) + " are available");
  }
  return keep_labeled_subset(labels, count, rng);
}

std::size_t AnomalyGroundTruth::count(AnomalyFlag f) const {
  std::size_t n = 0;
  for (const AnomalyFlag flag : flags) n += (flag == f);
  return n;
}

std::vector<NodeId> AnomalyGroundTruth::nodes_with(AnomalyFlag f) const {
  std::vector<NodeId> nodes;
  for (NodeId i = 0; i < flags.size(); ++i) {
    if (flags[i] == f) nodes.push_back(i);
  }
  return nodes;
}

}  // namespace clad
