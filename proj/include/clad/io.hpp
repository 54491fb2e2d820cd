#pragma once

#include <string>
#include <vector>

#include "clad/evaluation.hpp"
#include "clad/gcn.hpp"
#include "clad/graph.hpp"
#include "clad/labels.hpp"
#include "clad/scores.hpp"

namespace clad {

// Plain-text formats:
//   edges:      "<u> <v>" per line, '#' comments allowed
//   attributes: headerless CSV of reals, one row per node
//   labels / ground truth: "node_id,value" CSV, no header
//   scores:     header CSV node_id,struc,attr,final,rank, sorted by rank
// Doubles are written with 17 significant digits, so save/load round-trips
// are bit-exact.

Matrix load_matrix_csv(const std::string& path);
void save_matrix_csv(const Matrix& m, const std::string& path);

// n_nodes is the attribute row count; every edge endpoint must be below it.
AttributedGraph load_graph(const std::string& edge_path, const std::string& attr_path);
void save_graph(const AttributedGraph& graph, const std::string& edge_path,
                const std::string& attr_path);

LabelSet load_labels(const std::string& path, std::size_t n_classes, std::size_t n_nodes);
void save_labels(const LabelSet& labels, const std::string& path);

// Ground-truth files list anomalies only (flag 1 structural, 2 attribute);
// unlisted nodes are benign.
AnomalyGroundTruth load_ground_truth(const std::string& path, std::size_t n_nodes);
void save_ground_truth(const AnomalyGroundTruth& truth, const std::string& path);

void save_scores(const AnomalyScores& scores, const std::string& path);

void save_checkpoint(const GcnModel& model, const std::string& path);
GcnModel load_checkpoint(const std::string& path);

void save_diagnostics(const std::vector<DiagnosticsRow>& rows, const std::string& path);
void save_alpha_sweep(const AlphaSweepResult& sweep, const std::string& path);
void save_report(const EvalReport& report, const std::string& path);
void save_degree_bias(const std::vector<DegreeBiasBucket>& buckets, const std::string& path);

// One "node_id,entropy,flag" row per structural/benign node (flag 0 benign,
// 1 structural), for the neighborhood-entropy figure data.
void save_entropy_groups(const AttributedGraph& graph, const LabelSet& labels,
                         const AnomalyGroundTruth& truth, const std::string& path);

std::string format_double(double v);  // %.17g

}  // namespace clad
