#pragma once

#include <optional>
#include <string>

#include "clad/evaluation.hpp"
#include "clad/gcn.hpp"
#include "clad/injection.hpp"
#include "clad/labels.hpp"
#include "clad/scores.hpp"

namespace clad {

// End-to-end run configuration. Loadable from a flat key=value file; the CLI
// layers flag overrides on top. Exactly one label mode is active.
struct PipelineConfig {
  std::string edges_path;
  std::string attrs_path;
  std::string labels_path;  // unused in pseudo mode
  std::string truth_path;   // optional; enables evaluation
  std::string out_dir = ".";

  enum class LabelMode { File, Fraction, Count, Pseudo };
  LabelMode label_mode = LabelMode::File;
  double label_fraction = 0.3;
  std::size_t label_count = 0;
  std::size_t clusters = 5;      // pseudo mode: k-means k
  std::size_t per_cluster = 50;  // pseudo mode: labels kept per centroid
  std::size_t n_classes = 0;     // required outside pseudo mode

  TrainConfig train;
  double alpha = 0.5;
  bool sweep = false;  // requires a truth file; final scores use the best alpha

  std::uint64_t seed = 0;
  int threads = 1;

  void validate() const;
};

PipelineConfig load_pipeline_config(const std::string& path);
void apply_config_entry(PipelineConfig& config, const std::string& key, const std::string& value);

struct PipelineResult {
  LabelSet labels_used;
  TrainResult training;
  AnomalyScores scores;
  std::optional<EvalReport> report;
  std::optional<AlphaSweepResult> sweep;
  std::vector<std::string> files_written;
};

// train -> quantify -> fuse -> rank -> (if truth present) evaluate. Every
// stage draws its seed from Rng::derive_seed(config.seed, stage name), and the
// root seed determines every output file byte for byte.
PipelineResult run_pipeline(const PipelineConfig& config);

}  // namespace clad
