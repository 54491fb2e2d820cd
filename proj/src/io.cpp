#include "clad/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <string_view>

#include "clad/errors.hpp"

namespace clad {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::ifstream open_for_read(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path + " for reading");
  return in;
}

std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path + " for writing");
  return out;
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

bool is_blank(std::string_view s) {
  return s.find_first_not_of(" \t") == std::string_view::npos;
}

double parse_double(std::string_view token, const std::string& path, std::size_t line_no) {
  const char* b = token.data();
  const char* e = b + token.size();
  while (b < e && (*b == ' ' || *b == '\t')) ++b;
  while (e > b && (*(e - 1) == ' ' || *(e - 1) == '\t')) --e;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(b, e, value);
  if (ec != std::errc() || ptr != e || b == e) {
    throw DataError(path + ":" + std::to_string(line_no) + ": cannot parse number '" +
                    std::string(token) + "'");
  }
  return value;
}

std::size_t parse_index(std::string_view token, const std::string& path, std::size_t line_no) {
  const char* b = token.data();
  const char* e = b + token.size();
  while (b < e && (*b == ' ' || *b == '\t')) ++b;
  while (e > b && (*(e - 1) == ' ' || *(e - 1) == '\t')) --e;
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(b, e, value);
  if (ec != std::errc() || ptr != e || b == e) {
    throw DataError(path + ":" + std::to_string(line_no) + ": cannot parse integer '" +
                    std::string(token) + "'");
  }
  return value;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

}  // namespace

Matrix load_matrix_csv(const std::string& path) {
  auto in = open_for_read(path);
  std::vector<double> data;
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (is_blank(line)) continue;
    const auto fields = split(line, ',');
    if (cols == 0) {
      cols = fields.size();
    } else if (fields.size() != cols) {
      throw DataError(path + ":" + std::to_string(line_no) + ": ragged row, expected " +
                      std::to_string(cols) + " fields, got " + std::to_string(fields.size()));
    }
    for (const auto f : fields) data.push_back(parse_double(f, path, line_no));
    ++rows;
  }
  Matrix m(rows, cols);
  m.data = std::move(data);
  return m;
}

void save_matrix_csv(const Matrix& m, const std::string& path) {
  auto out = open_for_write(path);
  for (std::size_t r = 0; r < m.rows; ++r) {
    for (std::size_t c = 0; c < m.cols; ++c) {
      if (c) out << ',';
      out << format_double(m(r, c));
    }
    out << '\n';
  }
}

AttributedGraph load_graph(const std::string& edge_path, const std::string& attr_path) {
  Matrix attributes = load_matrix_csv(attr_path);
  const std::size_t n_nodes = attributes.rows;

  auto in = open_for_read(edge_path);
  std::vector<std::pair<NodeId, NodeId>> edges;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    if (is_blank(line)) continue;
    std::istringstream tokens(line);
    std::string a, b, extra;
    if (!(tokens >> a >> b) || (tokens >> extra)) {
      throw DataError(edge_path + ":" + std::to_string(line_no) +
                      ": expected exactly two node ids");
    }
    const NodeId u = parse_index(a, edge_path, line_no);
    const NodeId v = parse_index(b, edge_path, line_no);
    if (u >= n_nodes || v >= n_nodes) {
      throw DataError(edge_path + ":" + std::to_string(line_no) + ": node id " +
                      std::to_string(std::max(u, v)) + " >= attribute row count " +
                      std::to_string(n_nodes));
    }
    edges.emplace_back(u, v);
  }
  AttributedGraph graph(n_nodes, edges, std::move(attributes));
  if (graph.dropped_self_loops() > 0) {
    std::cerr << "warning: " << edge_path << ": dropped " << graph.dropped_self_loops()
              << " self-loop(s)\n";
  }
  return graph;
}

void save_graph(const AttributedGraph& graph, const std::string& edge_path,
                const std::string& attr_path) {
  auto out = open_for_write(edge_path);
  for (const auto& [u, v] : graph.edge_list()) out << u << ' ' << v << '\n';
  out.close();
  save_matrix_csv(graph.attributes(), attr_path);
}

LabelSet load_labels(const std::string& path, std::size_t n_classes, std::size_t n_nodes) {
  auto in = open_for_read(path);
  LabelSet labels(n_nodes, n_classes);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (is_blank(line)) continue;
    const auto fields = split(line, ',');
    if (fields.size() != 2) {
      throw DataError(path + ":" + std::to_string(line_no) + ": expected 'node_id,class'");
    }
    const NodeId node = parse_index(fields[0], path, line_no);
    const std::size_t cls = parse_index(fields[1], path, line_no);
    if (node >= n_nodes) {
      throw DataError(path + ":" + std::to_string(line_no) + ": node id " + std::to_string(node) +
                      " out of range for " + std::to_string(n_nodes) + " nodes");
    }
    if (cls >= n_classes) {
      throw DataError(path + ":" + std::to_string(line_no) + ": class index " +
                      std::to_string(cls) + " >= " + std::to_string(n_classes));
    }
    if (labels.is_labeled(node)) {
      throw DataError(path + ":" + std::to_string(line_no) + ": duplicate node id " +
                      std::to_string(node));
    }
    labels.assignments[node] = static_cast<int>(cls);
  }
  return labels;
}

void save_labels(const LabelSet& labels, const std::string& path) {
  auto out = open_for_write(path);
  for (NodeId i = 0; i < labels.assignments.size(); ++i) {
    if (labels.assignments[i] != LabelSet::kUnlabeled) {
      out << i << ',' << labels.assignments[i] << '\n';
    }
  }
}

AnomalyGroundTruth load_ground_truth(const std::string& path, std::size_t n_nodes) {
  auto in = open_for_read(path);
  AnomalyGroundTruth truth(n_nodes);
  std::vector<bool> seen(n_nodes, false);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (is_blank(line)) continue;
    const auto fields = split(line, ',');
    if (fields.size() != 2) {
      throw DataError(path + ":" + std::to_string(line_no) + ": expected 'node_id,flag'");
    }
    const NodeId node = parse_index(fields[0], path, line_no);
    const std::size_t flag = parse_index(fields[1], path, line_no);
    if (node >= n_nodes) {
      throw DataError(path + ":" + std::to_string(line_no) + ": node id " + std::to_string(node) +
                      " out of range for " + std::to_string(n_nodes) + " nodes");
    }
    if (flag > 2) {
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": flag must be 0 (benign), 1 (structural) or 2 (attribute)");
    }
    if (seen[node]) {
      throw DataError(path + ":" + std::to_string(line_no) + ": duplicate node id " +
                      std::to_string(node));
    }
    seen[node] = true;
    truth.flags[node] = static_cast<AnomalyFlag>(flag);
  }
  return truth;
}

void save_ground_truth(const AnomalyGroundTruth& truth, const std::string& path) {
  auto out = open_for_write(path);
  for (NodeId i = 0; i < truth.flags.size(); ++i) {
    if (truth.flags[i] != AnomalyFlag::Benign) {
      out << i << ',' << static_cast<int>(truth.flags[i]) << '\n';
    }
  }
}

void save_scores(const AnomalyScores& scores, const std::string& path) {
  auto out = open_for_write(path);
  out << "node_id,struc,attr,final,rank\n";
  for (const NodeId node : scores.ranking) {
    out << node << ',' << format_double(scores.struc[node]) << ','
        << format_double(scores.attr[node]) << ',' << format_double(scores.final_score[node])
        << ',' << scores.rank[node] << '\n';
  }
}

void save_checkpoint(const GcnModel& model, const std::string& path) {
  auto out = open_for_write(path);
  out << "clad-gcn 1\n";
  out << model.n_features() << ' ' << model.hidden_dim() << ' ' << model.n_classes() << '\n';
  const auto dump = [&out](const Matrix& m) {
    for (std::size_t r = 0; r < m.rows; ++r) {
      for (std::size_t c = 0; c < m.cols; ++c) {
        if (c) out << ' ';
        out << format_double(m(r, c));
      }
      out << '\n';
    }
  };
  dump(model.w1);
  dump(model.w2);
}

GcnModel load_checkpoint(const std::string& path) {
  auto in = open_for_read(path);
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != "clad-gcn" || version != 1) {
    throw DataError(path + ": not a clad-gcn version 1 checkpoint");
  }
  std::size_t f = 0, h = 0, c = 0;
  if (!(in >> f >> h >> c) || f == 0 || h == 0 || c == 0) {
    throw DataError(path + ": bad shape header");
  }
  GcnModel model{Matrix(f, h), Matrix(h, c)};
  for (double& v : model.w1.data) {
    if (!(in >> v)) throw DataError(path + ": truncated W1 block");
  }
  for (double& v : model.w2.data) {
    if (!(in >> v)) throw DataError(path + ": truncated W2 block");
  }
  return model;
}

void save_diagnostics(const std::vector<DiagnosticsRow>& rows, const std::string& path) {
  auto out = open_for_write(path);
  out << "node_id,degree,gamma,jsd,jsd2,jsd_plus,ed\n";
  for (const auto& r : rows) {
    out << r.node << ',' << r.degree << ',' << r.gamma << ',' << format_double(r.jsd) << ','
        << format_double(r.jsd2) << ',' << format_double(r.jsd_plus) << ','
        << format_double(r.ed) << '\n';
  }
}

void save_alpha_sweep(const AlphaSweepResult& sweep, const std::string& path) {
  auto out = open_for_write(path);
  out << "alpha,auc\n";
  for (const auto& entry : sweep.entries) {
    out << format_double(entry.alpha) << ',' << format_double(entry.auc) << '\n';
  }
}

void save_report(const EvalReport& report, const std::string& path) {
  auto out = open_for_write(path);
  out << "metric,value\n";
  out << "alpha," << format_double(report.alpha) << '\n';
  out << "auc_overall," << format_double(report.auc_overall) << '\n';
  out << "auc_structural,";
  if (report.auc_structural) out << format_double(*report.auc_structural);
  out << '\n';
  out << "auc_attribute,";
  if (report.auc_attribute) out << format_double(*report.auc_attribute);
  out << '\n';
}

void save_degree_bias(const std::vector<DegreeBiasBucket>& buckets, const std::string& path) {
  auto out = open_for_write(path);
  out << "bucket,anomaly_degree_lo,anomaly_degree_hi,benign_degree_lo,benign_degree_hi,"
         "n_anomalies,n_benign,metric,anomaly_mean,benign_mean,gap,cross_auc\n";
  const auto emit = [&out](const DegreeBiasBucket& b, std::size_t idx, const char* name,
                           const DegreeBiasCell& cell) {
    out << idx << ',' << b.anomaly_degree_lo << ',' << b.anomaly_degree_hi << ','
        << b.benign_degree_lo << ',' << b.benign_degree_hi << ',' << b.n_anomalies << ','
        << b.n_benign << ',' << name << ',' << format_double(cell.anomaly_mean) << ','
        << format_double(cell.benign_mean) << ',';
    if (cell.gap) out << format_double(*cell.gap);
    out << ',';
    if (cell.cross_auc) out << format_double(*cell.cross_auc);
    out << '\n';
  };
  for (std::size_t i = 0; i < buckets.size(); ++i) {
    emit(buckets[i], i, "jsd", buckets[i].jsd);
    emit(buckets[i], i, "jsd2", buckets[i].jsd2);
    emit(buckets[i], i, "jsd_plus", buckets[i].jsd_plus);
  }
}

void save_entropy_groups(const AttributedGraph& graph, const LabelSet& labels,
                         const AnomalyGroundTruth& truth, const std::string& path) {
  auto out = open_for_write(path);
  out << "node_id,entropy,flag\n";
  for (NodeId i = 0; i < graph.n_nodes(); ++i) {
    if (truth.flags[i] == AnomalyFlag::Attribute) continue;
    out << i << ',' << format_double(neighborhood_label_entropy(graph, labels, i)) << ','
        << (truth.flags[i] == AnomalyFlag::Structural ? 1 : 0) << '\n';
  }
}

}  // namespace clad
