// clad: class-label-aware graph anomaly detection pipeline.
//
// Subcommands: synth, inject, label, train, score, eval, sweep, diagnose, run.
// Exit codes: 0 success, 1 usage/config error, 2 data error, 3 numeric failure.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "clad/errors.hpp"
#include "clad/evaluation.hpp"
#include "clad/gcn.hpp"
#include "clad/injection.hpp"
#include "clad/io.hpp"
#include "clad/kmeans.hpp"
#include "clad/parallel.hpp"
#include "clad/pipeline.hpp"
#include "clad/scores.hpp"
#include "clad/synthetic.hpp"

namespace {

using namespace clad;

std::string join_path(const std::string& dir, const char* name) {
  return (std::filesystem::path(dir) / name).string();
}

struct SynthArgs {
  BenchmarkConfig config;
  std::string out_dir = ".";
};

void run_synth(const SynthArgs& args) {
  const Benchmark bench = make_benchmark(args.config);
  std::filesystem::create_directories(args.out_dir);
  save_graph(bench.graph, join_path(args.out_dir, "edges.txt"),
             join_path(args.out_dir, "attrs.csv"));
  save_labels(bench.labels, join_path(args.out_dir, "labels.csv"));
  std::cout << "benchmark: " << bench.graph.n_nodes() << " nodes, " << bench.graph.n_edges()
            << " edges, " << bench.labels.n_classes << " communities -> " << args.out_dir << "\n";
}

struct InjectArgs {
  std::string edges, attrs, out_dir = ".";
  InjectionConfig config;
};

void run_inject(const InjectArgs& args) {
  const AttributedGraph graph = load_graph(args.edges, args.attrs);
  const InjectionResult result = inject_anomalies(graph, args.config);
  std::filesystem::create_directories(args.out_dir);
  save_graph(result.graph, join_path(args.out_dir, "edges.txt"),
             join_path(args.out_dir, "attrs.csv"));
  save_ground_truth(result.truth, join_path(args.out_dir, "truth.csv"));
  std::cout << "injected: " << result.truth.count(AnomalyFlag::Structural) << " structural, "
            << result.truth.count(AnomalyFlag::Attribute) << " attribute anomalies, "
            << result.edges_added << " new edges -> " << args.out_dir << "\n";
}

struct LabelArgs {
  std::string edges, attrs, labels_in, out;
  std::string mode = "fraction";
  double fraction = 0.3;
  std::size_t count = 0;
  std::size_t n_classes = 0;
  std::size_t clusters = 5;
  std::size_t per_cluster = 50;
  std::uint64_t seed = 0;
};

void run_label(const LabelArgs& args) {
  const AttributedGraph graph = load_graph(args.edges, args.attrs);
  Rng rng(Rng::derive_seed(args.seed, "label"));
  LabelSet out_labels;
  if (args.mode == "pseudo") {
    const ClusterModel model = kmeans(graph.attributes(), args.clusters, rng);
    out_labels = select_pseudo_labels(model, graph.attributes(), args.per_cluster);
  } else {
    if (args.labels_in.empty() || args.n_classes == 0) {
      throw UsageError("label: --labels-in and --n-classes are required outside pseudo mode");
    }
    const LabelSet full = load_labels(args.labels_in, args.n_classes, graph.n_nodes());
    if (args.mode == "fraction") {
      out_labels = sample_label_fraction(full, args.fraction, rng);
    } else if (args.mode == "count") {
      out_labels = sample_label_count(full, args.count, rng);
    } else {
      throw UsageError("label: unknown mode '" + args.mode + "'");
    }
    if (out_labels.n_labeled() < 2) {
      throw DataError("label: sampling produced fewer than 2 labels");
    }
  }
  save_labels(out_labels, args.out);
  std::cout << "labels: kept " << out_labels.n_labeled() << " of " << graph.n_nodes()
            << " nodes (" << out_labels.n_classes << " classes) -> " << args.out << "\n";
}

struct TrainArgs {
  std::string edges, attrs, labels, model_out, p_out;
  std::size_t n_classes = 0;
  TrainConfig config;
};

void run_train(const TrainArgs& args) {
  const AttributedGraph graph = load_graph(args.edges, args.attrs);
  const LabelSet labels = load_labels(args.labels, args.n_classes, graph.n_nodes());
  const TrainResult result = gcn_train(graph, labels, args.config);
  if (!args.model_out.empty()) save_checkpoint(result.model, args.model_out);
  if (!args.p_out.empty()) save_matrix_csv(result.p.p, args.p_out);
  std::cout << "train: best validation loss " << result.best_val_loss << " at epoch "
            << result.best_epoch << " of " << result.epochs_run << "\n";
}

struct ScoreArgs {
  std::string edges, attrs, model, p_in, scores_out, diagnostics_out;
  double alpha = 0.5;
};

ClassDistributionMatrix load_p(const ScoreArgs& args, const AttributedGraph& graph) {
  if (!args.p_in.empty()) {
    return ClassDistributionMatrix(load_matrix_csv(args.p_in));
  }
  if (args.model.empty()) {
    throw UsageError("score: either --p or --model is required");
  }
  const GcnModel model = load_checkpoint(args.model);
  return gcn_forward(model, graph.normalized_adjacency(), graph.attributes(), false, 0.0, nullptr);
}

void run_score(const ScoreArgs& args) {
  const AttributedGraph graph = load_graph(args.edges, args.attrs);
  const ClassDistributionMatrix p = load_p(args, graph);
  const AnomalyScores scores = compute_anomaly_scores(graph, p, args.alpha);
  save_scores(scores, args.scores_out);
  if (!args.diagnostics_out.empty()) {
    save_diagnostics(compute_diagnostics(graph, p), args.diagnostics_out);
  }
  std::cout << "scores: alpha " << args.alpha << ", top node " << scores.ranking.front() << " -> "
            << args.scores_out << "\n";
}

struct EvalArgs {
  std::string scores, truth, report_out;
};

// scores.csv rows are rank-ordered; recover per-node columns by node id
void run_eval(const EvalArgs& args) {
  const Matrix raw = [&] {
    std::ifstream in(args.scores);
    if (!in) throw DataError("cannot open " + args.scores + " for reading");
    std::string header;
    std::getline(in, header);
    if (header.rfind("node_id,struc,attr,final,rank", 0) != 0) {
      throw DataError(args.scores + ": missing scores header");
    }
    Matrix m;
    std::vector<double> data;
    std::string line;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::replace(line.begin(), line.end(), ',', ' ');
      std::istringstream fields(line);
      double node, struc, attr, final_score, rank;
      if (!(fields >> node >> struc >> attr >> final_score >> rank)) {
        throw DataError(args.scores + ": malformed row '" + line + "'");
      }
      data.insert(data.end(), {node, struc, attr, final_score, rank});
      ++rows;
    }
    m.rows = rows;
    m.cols = 5;
    m.data = std::move(data);
    return m;
  }();

  AnomalyScores scores;
  const std::size_t n = raw.rows;
  scores.struc.assign(n, 0.0);
  scores.attr.assign(n, 0.0);
  scores.final_score.assign(n, 0.0);
  scores.rank.assign(n, 0);
  scores.ranking.assign(n, 0);
  for (std::size_t r = 0; r < n; ++r) {
    const auto node = static_cast<std::size_t>(raw(r, 0));
    if (node >= n) throw DataError(args.scores + ": node id out of range");
    scores.struc[node] = raw(r, 1);
    scores.attr[node] = raw(r, 2);
    scores.final_score[node] = raw(r, 3);
    scores.rank[node] = static_cast<std::size_t>(raw(r, 4));
    scores.ranking[r] = node;
  }
  scores.struc_raw = scores.struc;
  scores.attr_raw = scores.attr;

  // the file does not carry alpha; recover it from final = a*s + (1-a)*t
  NodeId widest = 0;
  double widest_span = 0.0;
  for (NodeId i = 0; i < n; ++i) {
    const double span = std::abs(scores.struc[i] - scores.attr[i]);
    if (span > widest_span) {
      widest_span = span;
      widest = i;
    }
  }
  if (widest_span > 1e-9) {
    const double alpha = (scores.final_score[widest] - scores.attr[widest]) /
                         (scores.struc[widest] - scores.attr[widest]);
    scores.alpha = std::clamp(alpha, 0.0, 1.0);
  }

  const AnomalyGroundTruth truth = load_ground_truth(args.truth, n);
  const EvalReport report = evaluate(scores, truth);
  if (!args.report_out.empty()) save_report(report, args.report_out);
  std::cout << "auc_overall " << report.auc_overall << "\n";
  if (report.auc_structural) std::cout << "auc_structural " << *report.auc_structural << "\n";
  if (report.auc_attribute) std::cout << "auc_attribute " << *report.auc_attribute << "\n";
}

struct SweepArgs {
  std::string edges, attrs, p_in, model, truth, out;
};

void run_sweep(const SweepArgs& args) {
  const AttributedGraph graph = load_graph(args.edges, args.attrs);
  ScoreArgs loader;
  loader.p_in = args.p_in;
  loader.model = args.model;
  const ClassDistributionMatrix p = load_p(loader, graph);
  const AnomalyGroundTruth truth = load_ground_truth(args.truth, graph.n_nodes());
  const AnomalyScores scores = compute_anomaly_scores(graph, p, 0.5);
  const auto grid = default_alpha_grid();
  const AlphaSweepResult sweep = alpha_sweep(scores.struc, scores.attr, truth, grid);
  if (!args.out.empty()) save_alpha_sweep(sweep, args.out);
  for (const auto& entry : sweep.entries) {
    std::cout << "alpha " << entry.alpha << " auc " << entry.auc << "\n";
  }
  std::cout << "best alpha " << sweep.best_alpha << " auc " << sweep.best_auc << "\n";
}

struct DiagnoseArgs {
  std::string edges, attrs, p_in, model, truth, labels, out_dir = ".";
  std::size_t n_classes = 0;
  std::size_t groups = 4;
};

void run_diagnose(const DiagnoseArgs& args) {
  const AttributedGraph graph = load_graph(args.edges, args.attrs);
  ScoreArgs loader;
  loader.p_in = args.p_in;
  loader.model = args.model;
  const ClassDistributionMatrix p = load_p(loader, graph);
  const AnomalyGroundTruth truth = load_ground_truth(args.truth, graph.n_nodes());
  std::filesystem::create_directories(args.out_dir);

  save_diagnostics(compute_diagnostics(graph, p), join_path(args.out_dir, "diagnostics.csv"));
  save_degree_bias(degree_bias_report(p, graph, truth, args.groups),
                   join_path(args.out_dir, "degree_bias.csv"));

  if (!args.labels.empty()) {
    if (args.n_classes == 0) throw UsageError("diagnose: --n-classes required with --labels");
    const LabelSet labels = load_labels(args.labels, args.n_classes, graph.n_nodes());
    save_entropy_groups(graph, labels, truth, join_path(args.out_dir, "entropy_groups.csv"));
    double anom_sum = 0.0, benign_sum = 0.0;
    std::size_t anom_n = 0, benign_n = 0;
    for (NodeId i = 0; i < graph.n_nodes(); ++i) {
      if (truth.flags[i] == AnomalyFlag::Attribute) continue;
      const double h = neighborhood_label_entropy(graph, labels, i);
      if (truth.flags[i] == AnomalyFlag::Structural) {
        anom_sum += h;
        ++anom_n;
      } else {
        benign_sum += h;
        ++benign_n;
      }
    }
    if (anom_n > 0 && benign_n > 0) {
      std::cout << "mean neighborhood entropy: structural "
                << anom_sum / static_cast<double>(anom_n) << ", benign "
                << benign_sum / static_cast<double>(benign_n) << "\n";
    }
  }
  std::cout << "diagnostics -> " << args.out_dir << "\n";
}

struct RunArgs {
  std::string config_path;
  PipelineConfig overrides;
  bool has_alpha = false, has_seed = false, has_threads = false, has_sweep = false;
  bool has_out_dir = false;
};

void run_run(const RunArgs& args) {
  PipelineConfig config =
      args.config_path.empty() ? PipelineConfig{} : load_pipeline_config(args.config_path);
  if (args.has_alpha) config.alpha = args.overrides.alpha;
  if (args.has_seed) config.seed = args.overrides.seed;
  if (args.has_threads) config.threads = args.overrides.threads;
  if (args.has_sweep) config.sweep = args.overrides.sweep;
  if (args.has_out_dir) config.out_dir = args.overrides.out_dir;

  const PipelineResult result = run_pipeline(config);
  std::cout << "run: " << result.labels_used.n_labeled() << " labels, best epoch "
            << result.training.best_epoch << "\n";
  if (result.sweep) {
    std::cout << "best alpha " << result.sweep->best_alpha << " auc " << result.sweep->best_auc
              << "\n";
  }
  if (result.report) {
    std::cout << "auc_overall " << result.report->auc_overall << "\n";
    if (result.report->auc_structural) {
      std::cout << "auc_structural " << *result.report->auc_structural << "\n";
    }
    if (result.report->auc_attribute) {
      std::cout << "auc_attribute " << *result.report->auc_attribute << "\n";
    }
  }
  for (const auto& file : result.files_written) std::cout << "wrote " << file << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"class-label-aware graph anomaly detection"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "generate a planted-community benchmark graph");
  synth_cmd->add_option("--nodes", synth.config.n_nodes, "node count");
  synth_cmd->add_option("--communities", synth.config.n_communities, "community count");
  synth_cmd->add_option("--features", synth.config.n_features, "attribute width");
  synth_cmd->add_option("--intra-degree", synth.config.intra_degree, "expected same-community degree");
  synth_cmd->add_option("--inter-degree", synth.config.inter_degree, "expected cross-community degree");
  synth_cmd->add_option("--degree-spread", synth.config.degree_spread, "lognormal degree sigma");
  synth_cmd->add_option("--center-scale", synth.config.center_scale, "attribute block height");
  synth_cmd->add_option("--attr-noise", synth.config.attr_noise, "attribute noise sigma");
  synth_cmd->add_option("--noise-spread", synth.config.noise_spread,
                        "lognormal per-node noise sigma");
  synth_cmd->add_option("--seed", synth.config.seed, "rng seed");
  synth_cmd->add_option("--out-dir", synth.out_dir, "output directory");

  InjectArgs inject;
  auto* inject_cmd = app.add_subcommand("inject", "plant structural and attribute anomalies");
  inject_cmd->add_option("--edges", inject.edges, "edge list file")->required();
  inject_cmd->add_option("--attrs", inject.attrs, "attribute CSV")->required();
  inject_cmd->add_option("--out-dir", inject.out_dir, "output directory");
  inject_cmd->add_option("--clique-size", inject.config.clique_size, "nodes per clique (p)");
  inject_cmd->add_option("--cliques", inject.config.n_cliques, "clique count (q)");
  inject_cmd->add_option("--attr-anomalies", inject.config.n_attribute_anomalies,
                         "attribute anomaly count (m)");
  inject_cmd->add_option("--candidates", inject.config.candidate_pool, "candidate pool size (k)");
  inject_cmd->add_option("--seed", inject.config.seed, "rng seed");

  LabelArgs label;
  auto* label_cmd = app.add_subcommand("label", "sample known labels or build pseudo-labels");
  label_cmd->add_option("--edges", label.edges, "edge list file")->required();
  label_cmd->add_option("--attrs", label.attrs, "attribute CSV")->required();
  label_cmd->add_option("--labels-in", label.labels_in, "full ground-truth label CSV");
  label_cmd->add_option("--n-classes", label.n_classes, "class count of --labels-in");
  label_cmd->add_option("--mode", label.mode, "fraction | count | pseudo");
  label_cmd->add_option("--fraction", label.fraction, "labeled fraction to keep");
  label_cmd->add_option("--count", label.count, "exact number of labels to keep");
  label_cmd->add_option("--clusters", label.clusters, "pseudo mode: k-means k");
  label_cmd->add_option("--per-cluster", label.per_cluster, "pseudo mode: labels per centroid");
  label_cmd->add_option("--seed", label.seed, "rng seed");
  label_cmd->add_option("--out", label.out, "output label CSV")->required();

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "train the two-layer GCN classifier");
  train_cmd->add_option("--edges", train.edges, "edge list file")->required();
  train_cmd->add_option("--attrs", train.attrs, "attribute CSV")->required();
  train_cmd->add_option("--labels", train.labels, "known label CSV")->required();
  train_cmd->add_option("--n-classes", train.n_classes, "class count")->required();
  train_cmd->add_option("--hidden-dim", train.config.hidden_dim, "hidden width");
  train_cmd->add_option("--learning-rate", train.config.learning_rate, "Adam learning rate");
  train_cmd->add_option("--weight-decay", train.config.weight_decay, "L2 penalty");
  train_cmd->add_option("--dropout", train.config.dropout_rate, "dropout rate");
  train_cmd->add_option("--max-epochs", train.config.max_epochs, "epoch cap");
  train_cmd->add_option("--patience", train.config.patience, "early-stopping patience");
  train_cmd->add_option("--val-fraction", train.config.val_fraction, "validation share");
  train_cmd->add_option("--seed", train.config.seed, "rng seed");
  train_cmd->add_option("--model-out", train.model_out, "checkpoint path");
  train_cmd->add_option("--p-out", train.p_out, "softmax matrix CSV path");

  ScoreArgs score;
  auto* score_cmd = app.add_subcommand("score", "compute and rank anomaly scores");
  score_cmd->add_option("--edges", score.edges, "edge list file")->required();
  score_cmd->add_option("--attrs", score.attrs, "attribute CSV")->required();
  score_cmd->add_option("--model", score.model, "GCN checkpoint");
  score_cmd->add_option("--p", score.p_in, "precomputed softmax matrix CSV");
  score_cmd->add_option("--alpha", score.alpha, "structural weight in [0, 1]");
  score_cmd->add_option("--out", score.scores_out, "score CSV path")->required();
  score_cmd->add_option("--diagnostics-out", score.diagnostics_out, "per-node metric CSV");

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a score file against ground truth");
  eval_cmd->add_option("--scores", eval.scores, "score CSV")->required();
  eval_cmd->add_option("--truth", eval.truth, "ground-truth CSV")->required();
  eval_cmd->add_option("--report-out", eval.report_out, "report CSV path");

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "AUC for every alpha on the default grid");
  sweep_cmd->add_option("--edges", sweep.edges, "edge list file")->required();
  sweep_cmd->add_option("--attrs", sweep.attrs, "attribute CSV")->required();
  sweep_cmd->add_option("--model", sweep.model, "GCN checkpoint");
  sweep_cmd->add_option("--p", sweep.p_in, "precomputed softmax matrix CSV");
  sweep_cmd->add_option("--truth", sweep.truth, "ground-truth CSV")->required();
  sweep_cmd->add_option("--out", sweep.out, "per-alpha CSV path");

  DiagnoseArgs diagnose;
  auto* diagnose_cmd = app.add_subcommand("diagnose", "degree-bias and entropy analyses");
  diagnose_cmd->add_option("--edges", diagnose.edges, "edge list file")->required();
  diagnose_cmd->add_option("--attrs", diagnose.attrs, "attribute CSV")->required();
  diagnose_cmd->add_option("--model", diagnose.model, "GCN checkpoint");
  diagnose_cmd->add_option("--p", diagnose.p_in, "precomputed softmax matrix CSV");
  diagnose_cmd->add_option("--truth", diagnose.truth, "ground-truth CSV")->required();
  diagnose_cmd->add_option("--labels", diagnose.labels, "full label CSV for entropy analysis");
  diagnose_cmd->add_option("--n-classes", diagnose.n_classes, "class count of --labels");
  diagnose_cmd->add_option("--groups", diagnose.groups, "degree quantile buckets");
  diagnose_cmd->add_option("--out-dir", diagnose.out_dir, "output directory");

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "full pipeline from a key=value config file");
  run_cmd->add_option("--config", run.config_path, "config file")->required();
  auto* alpha_opt = run_cmd->add_option("--alpha", run.overrides.alpha, "override alpha");
  auto* seed_opt = run_cmd->add_option("--seed", run.overrides.seed, "override seed");
  auto* threads_opt = run_cmd->add_option("--threads", run.overrides.threads, "override threads");
  auto* sweep_opt = run_cmd->add_flag("--sweep", run.overrides.sweep, "force an alpha sweep");
  auto* out_opt = run_cmd->add_option("--out-dir", run.overrides.out_dir, "override out_dir");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*synth_cmd) run_synth(synth);
    if (*inject_cmd) run_inject(inject);
    if (*label_cmd) run_label(label);
    if (*train_cmd) run_train(train);
    if (*score_cmd) run_score(score);
    if (*eval_cmd) run_eval(eval);
    if (*sweep_cmd) run_sweep(sweep);
    if (*diagnose_cmd) {
      run_diagnose(diagnose);
    }
    if (*run_cmd) {
      run.has_alpha = alpha_opt->count() > 0;
      run.has_seed = seed_opt->count() > 0;
      run.has_threads = threads_opt->count() > 0;
      run.has_sweep = sweep_opt->count() > 0;
      run.has_out_dir = out_opt->count() > 0;
      run_run(run);
    }
  } catch (const clad::UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const clad::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const clad::NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
