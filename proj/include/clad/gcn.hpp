#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "clad/graph.hpp"
#include "clad/labels.hpp"
#include "clad/matrix.hpp"
#include "clad/rng.hpp"

namespace clad {

// Row-stochastic N x C matrix of predicted class distributions.
struct ClassDistributionMatrix {
  Matrix p;

  ClassDistributionMatrix() = default;
  explicit ClassDistributionMatrix(Matrix m);  // validates rows within 1e-9

  std::size_t n_nodes() const { return p.rows; }
  std::size_t n_classes() const { return p.cols; }
  std::span<const double> row(NodeId i) const { return p.row(i); }
};

struct GcnModel {
  Matrix w1;  // F x H
  Matrix w2;  // H x C

  std::size_t n_features() const { return w1.rows; }
  std::size_t hidden_dim() const { return w1.cols; }
  std::size_t n_classes() const { return w2.cols; }
};

struct TrainConfig {
  std::size_t hidden_dim = 64;
  double learning_rate = 0.01;
  double weight_decay = 5e-4;
  double dropout_rate = 0.5;
  std::size_t max_epochs = 300;
  std::size_t patience = 30;
  double val_fraction = 0.05;
  std::uint64_t seed = 0;

  void validate() const;
};

// Intermediates cached by the training-mode forward pass for backprop.
struct ForwardCache {
  Matrix x_in;     // attributes after input dropout
  Matrix z1;       // pre-activation of the hidden layer
  Matrix h1;       // relu(z1) after hidden dropout
  Matrix mask_h;   // hidden dropout multipliers (0 or 1/keep)
};

// P = row_softmax(A_hat * relu(A_hat * X * W1) * W2). Dropout is applied to X
// and to the hidden activations only when training; rng is required then.
ClassDistributionMatrix gcn_forward(const GcnModel& model, const CsrMatrix& a_hat, const Matrix& x,
                                    bool training, double dropout_rate, Rng* rng,
                                    ForwardCache* cache = nullptr);

// Mean over labeled nodes of -log p_{i,y_i} (log clamped at 1e-12) plus
// weight_decay/2 * (|W1|_F^2 + |W2|_F^2).
double gcn_loss(const ClassDistributionMatrix& p, const LabelSet& labels, const GcnModel& model,
                double weight_decay);

using LabeledNodes = std::vector<std::pair<NodeId, int>>;

// Cross-entropy data term over an explicit (node, class) list, no weight decay.
double cross_entropy(const ClassDistributionMatrix& p, const LabeledNodes& labeled);

struct Gradients {
  Matrix dw1;
  Matrix dw2;
};

// Exact analytic gradient of gcn_loss via backprop through the softmax, the
// second propagation, the relu mask, and the first propagation. Requires the
// cache and P of the matching forward pass.
Gradients gcn_gradients(const GcnModel& model, const CsrMatrix& a_hat, const LabeledNodes& labeled,
                        double weight_decay, const ForwardCache& cache,
                        const ClassDistributionMatrix& p);

struct TrainResult {
  GcnModel model;                       // weights at the best validation loss
  ClassDistributionMatrix p;            // dropout-free softmax of that model
  std::size_t best_epoch = 0;           // 1-based epoch of the kept snapshot
  std::size_t epochs_run = 0;
  double best_val_loss = 0.0;
  double initial_train_loss = 0.0;      // dropout-free full loss before any update
  std::vector<double> val_loss_history;
};

// Adam on a seeded 95/5 split of the labeled nodes (stratified by class when
// every class with labels has at least 2), early-stopped on validation
// cross-entropy with the configured patience.
TrainResult gcn_train(const AttributedGraph& graph, const LabelSet& labels,
                      const TrainConfig& config);

}  // namespace clad
