#include "clad/pipeline.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "clad/errors.hpp"
#include "clad/io.hpp"
#include "clad/kmeans.hpp"
#include "clad/parallel.hpp"

namespace clad {

void PipelineConfig::validate() const {
  if (edges_path.empty() || attrs_path.empty()) {
    throw UsageError("config: edges and attrs paths are required");
  }
  if (label_mode == LabelMode::Pseudo) {
    if (clusters < 1 || per_cluster < 1) {
      throw UsageError("config: pseudo labeling needs clusters >= 1 and per_cluster >= 1");
    }
  } else {
    if (labels_path.empty()) throw UsageError("config: labels path is required");
    if (n_classes < 1) throw UsageError("config: n_classes is required");
    if (label_mode == LabelMode::Fraction &&
        (!(label_fraction > 0.0) || label_fraction > 1.0)) {
      throw UsageError("config: label_fraction must be in (0, 1]");
    }
    if (label_mode == LabelMode::Count && label_count < 2) {
      throw UsageError("config: label_count must be at least 2");
    }
  }
  if (alpha < 0.0 || alpha > 1.0) throw UsageError("config: alpha must lie in [0, 1]");
  if (sweep && truth_path.empty()) {
    throw UsageError("config: the alpha sweep needs a truth file");
  }
  if (threads < 1) throw UsageError("config: threads must be at least 1");
  train.validate();
}

namespace {

bool parse_bool(const std::string& value, const std::string& key) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw UsageError("config: bad boolean for " + key + ": '" + value + "'");
}

double parse_real(const std::string& value, const std::string& key) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw UsageError("config: bad number for " + key + ": '" + value + "'");
  }
  return out;
}

std::uint64_t parse_unsigned(const std::string& value, const std::string& key) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw UsageError("config: bad integer for " + key + ": '" + value + "'");
  }
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

void apply_config_entry(PipelineConfig& config, const std::string& key, const std::string& value) {
  if (key == "edges") config.edges_path = value;
  else if (key == "attrs") config.attrs_path = value;
  else if (key == "labels") config.labels_path = value;
  else if (key == "truth") config.truth_path = value;
  else if (key == "out_dir") config.out_dir = value;
  else if (key == "label_mode") {
    if (value == "file") config.label_mode = PipelineConfig::LabelMode::File;
    else if (value == "fraction") config.label_mode = PipelineConfig::LabelMode::Fraction;
    else if (value == "count") config.label_mode = PipelineConfig::LabelMode::Count;
    else if (value == "pseudo") config.label_mode = PipelineConfig::LabelMode::Pseudo;
    else throw UsageError("config: unknown label_mode '" + value + "'");
  } else if (key == "label_fraction") config.label_fraction = parse_real(value, key);
  else if (key == "label_count") config.label_count = parse_unsigned(value, key);
  else if (key == "clusters") config.clusters = parse_unsigned(value, key);
  else if (key == "per_cluster") config.per_cluster = parse_unsigned(value, key);
  else if (key == "n_classes") config.n_classes = parse_unsigned(value, key);
  else if (key == "hidden_dim") config.train.hidden_dim = parse_unsigned(value, key);
  else if (key == "learning_rate") config.train.learning_rate = parse_real(value, key);
  else if (key == "weight_decay") config.train.weight_decay = parse_real(value, key);
  else if (key == "dropout") config.train.dropout_rate = parse_real(value, key);
  else if (key == "max_epochs") config.train.max_epochs = parse_unsigned(value, key);
  else if (key == "patience") config.train.patience = parse_unsigned(value, key);
  else if (key == "val_fraction") config.train.val_fraction = parse_real(value, key);
  else if (key == "alpha") config.alpha = parse_real(value, key);
  else if (key == "sweep") config.sweep = parse_bool(value, key);
  else if (key == "seed") config.seed = parse_unsigned(value, key);
  else if (key == "threads") config.threads = static_cast<int>(parse_unsigned(value, key));
  else throw UsageError("config: unknown key '" + key + "'");
}

PipelineConfig load_pipeline_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file " + path);
  PipelineConfig config;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const std::string entry = trim(line);
    if (entry.empty()) continue;
    const std::size_t eq = entry.find('=');
    if (eq == std::string::npos) {
      throw UsageError(path + ":" + std::to_string(line_no) + ": expected key=value");
    }
    apply_config_entry(config, trim(entry.substr(0, eq)), trim(entry.substr(eq + 1)));
  }
  return config;
}

PipelineResult run_pipeline(const PipelineConfig& config) {
  config.validate();
  set_num_threads(config.threads);
  std::filesystem::create_directories(config.out_dir);
  const auto out_path = [&config](const char* name) {
    return (std::filesystem::path(config.out_dir) / name).string();
  };

  PipelineResult result;
  const AttributedGraph graph = load_graph(config.edges_path, config.attrs_path);

  // label stage
  {
    Rng label_rng(Rng::derive_seed(config.seed, "label"));
    switch (config.label_mode) {
      case PipelineConfig::LabelMode::File:
        result.labels_used = load_labels(config.labels_path, config.n_classes, graph.n_nodes());
        break;
      case PipelineConfig::LabelMode::Fraction: {
        const LabelSet full = load_labels(config.labels_path, config.n_classes, graph.n_nodes());
        result.labels_used = sample_label_fraction(full, config.label_fraction, label_rng);
        break;
      }
      case PipelineConfig::LabelMode::Count: {
        const LabelSet full = load_labels(config.labels_path, config.n_classes, graph.n_nodes());
        result.labels_used = sample_label_count(full, config.label_count, label_rng);
        break;
      }
      case PipelineConfig::LabelMode::Pseudo: {
        const ClusterModel model = kmeans(graph.attributes(), config.clusters, label_rng);
        result.labels_used = select_pseudo_labels(model, graph.attributes(), config.per_cluster);
        break;
      }
    }
    save_labels(result.labels_used, out_path("labels_used.csv"));
    result.files_written.push_back(out_path("labels_used.csv"));
  }

  // train stage
  {
    TrainConfig train = config.train;
    train.seed = Rng::derive_seed(config.seed, "train");
    result.training = gcn_train(graph, result.labels_used, train);
    save_checkpoint(result.training.model, out_path("model.txt"));
    result.files_written.push_back(out_path("model.txt"));
  }

  // quantify / fuse / rank, optionally picking alpha by sweep
  std::optional<AnomalyGroundTruth> truth;
  if (!config.truth_path.empty()) {
    truth = load_ground_truth(config.truth_path, graph.n_nodes());
  }

  double alpha = config.alpha;
  AnomalyScores scores = compute_anomaly_scores(graph, result.training.p, alpha);
  if (config.sweep) {
    const auto grid = default_alpha_grid();
    result.sweep = alpha_sweep(scores.struc, scores.attr, *truth, grid);
    alpha = result.sweep->best_alpha;
    AnomalyScores best = fuse(scores.struc, scores.attr, alpha);
    best.struc_raw = std::move(scores.struc_raw);
    best.attr_raw = std::move(scores.attr_raw);
    scores = std::move(best);
    save_alpha_sweep(*result.sweep, out_path("alpha_sweep.csv"));
    result.files_written.push_back(out_path("alpha_sweep.csv"));
  }
  save_scores(scores, out_path("scores.csv"));
  result.files_written.push_back(out_path("scores.csv"));
  save_diagnostics(compute_diagnostics(graph, result.training.p), out_path("diagnostics.csv"));
  result.files_written.push_back(out_path("diagnostics.csv"));

  if (truth) {
    result.report = evaluate(scores, *truth);
    save_report(*result.report, out_path("report.csv"));
    result.files_written.push_back(out_path("report.csv"));
  } else {
    std::cerr << "notice: no truth file configured, evaluation skipped\n";
  }
  result.scores = std::move(scores);
  return result;
}

}  // namespace clad
