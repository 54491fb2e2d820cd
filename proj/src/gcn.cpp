#include "clad/gcn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "clad/errors.hpp"

namespace clad {

ClassDistributionMatrix::ClassDistributionMatrix(Matrix m) : p(std::move(m)) {
  for (std::size_t i = 0; i < p.rows; ++i) {
    double sum = 0.0;
    for (std::size_t c = 0; c < p.cols; ++c) {
      const double v = p(i, c);
      if (!(v >= 0.0)) {
        throw NumericError("class distribution row " + std::to_string(i) +
                           " has a negative or NaN entry");
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw NumericError("class distribution row " + std::to_string(i) +
                         " does not sum to 1 (sum = " + std::to_string(sum) + ")");
    }
  }
}

void TrainConfig::validate() const {
  if (hidden_dim < 1) throw UsageError("hidden_dim must be at least 1");
  if (!(learning_rate > 0.0)) throw UsageError("learning_rate must be positive");
  if (weight_decay < 0.0) throw UsageError("weight_decay must be non-negative");
  if (dropout_rate < 0.0 || dropout_rate >= 1.0) throw UsageError("dropout_rate must be in [0, 1)");
  if (max_epochs < 1) throw UsageError("max_epochs must be at least 1");
  if (patience < 1) throw UsageError("patience must be at least 1");
  if (!(val_fraction > 0.0) || !(val_fraction < 1.0)) {
    throw UsageError("val_fraction must be in (0, 1)");
  }
}

namespace {

void apply_dropout(Matrix& m, double rate, Rng& rng, Matrix* mask_out) {
  const double keep = 1.0 - rate;
  const double scale = 1.0 / keep;
  if (mask_out != nullptr) *mask_out = Matrix(m.rows, m.cols);
  for (std::size_t i = 0; i < m.data.size(); ++i) {
    const double factor = rng.uniform() < keep ? scale : 0.0;
    m.data[i] *= factor;
    if (mask_out != nullptr) mask_out->data[i] = factor;
  }
}

void row_softmax_inplace(Matrix& z) {
  for (std::size_t i = 0; i < z.rows; ++i) {
    auto row = z.row(i);
    const double m = *std::max_element(row.begin(), row.end());
    double sum = 0.0;
    for (double& v : row) {
      v = std::exp(v - m);
      sum += v;
    }
    for (double& v : row) v /= sum;
  }
}

}  // namespace

ClassDistributionMatrix gcn_forward(const GcnModel& model, const CsrMatrix& a_hat, const Matrix& x,
                                    bool training, double dropout_rate, Rng* rng,
                                    ForwardCache* cache) {
  if (x.cols != model.w1.rows) throw NumericError("forward: attribute width does not match W1");
  const bool drop = training && dropout_rate > 0.0;
  if (drop && rng == nullptr) throw NumericError("forward: training-mode dropout needs an rng");

  Matrix x_in = x;
  if (drop) apply_dropout(x_in, dropout_rate, *rng, nullptr);

  Matrix z1 = csr_matmul(a_hat, matmul(x_in, model.w1));
  Matrix h1 = z1;
  for (double& v : h1.data) v = v > 0.0 ? v : 0.0;

  Matrix mask_h;
  if (drop) {
    apply_dropout(h1, dropout_rate, *rng, &mask_h);
  }

  Matrix z2 = csr_matmul(a_hat, matmul(h1, model.w2));
  if (!all_finite(z2)) throw NumericError("forward: non-finite logits");
  row_softmax_inplace(z2);

  if (cache != nullptr) {
    cache->x_in = std::move(x_in);
    cache->z1 = std::move(z1);
    cache->h1 = std::move(h1);
    cache->mask_h = drop ? std::move(mask_h) : Matrix();
  }
  return ClassDistributionMatrix(std::move(z2));
}

double cross_entropy(const ClassDistributionMatrix& p, const LabeledNodes& labeled) {
  if (labeled.empty()) throw DataError("cross_entropy: empty label set");
  double acc = 0.0;
  for (const auto& [node, cls] : labeled) {
    acc += -std::log(std::max(p.p(node, static_cast<std::size_t>(cls)), 1e-12));
  }
  return acc / static_cast<double>(labeled.size());
}

double gcn_loss(const ClassDistributionMatrix& p, const LabelSet& labels, const GcnModel& model,
                double weight_decay) {
  LabeledNodes labeled;
  for (NodeId i = 0; i < labels.assignments.size(); ++i) {
    if (labels.assignments[i] != LabelSet::kUnlabeled) labeled.emplace_back(i, labels.assignments[i]);
  }
  if (labeled.empty()) throw DataError("gcn_loss: empty label set");
  return cross_entropy(p, labeled) +
         0.5 * weight_decay * (frobenius_squared(model.w1) + frobenius_squared(model.w2));
}

Gradients gcn_gradients(const GcnModel& model, const CsrMatrix& a_hat, const LabeledNodes& labeled,
                        double weight_decay, const ForwardCache& cache,
                        const ClassDistributionMatrix& p) {
  const std::size_t n = p.n_nodes();
  const std::size_t c = p.n_classes();
  const double inv = 1.0 / static_cast<double>(labeled.size());

  // dL/dZ2 = (P - Y) / |L| on labeled rows
  Matrix dz2(n, c);
  for (const auto& [node, cls] : labeled) {
    const auto prow = p.row(node);
    auto grow = dz2.row(node);
    for (std::size_t j = 0; j < c; ++j) grow[j] = prow[j] * inv;
    grow[static_cast<std::size_t>(cls)] -= inv;
  }

  // A_hat is symmetric, so (A_hat M)^T G = M^T (A_hat G)
  Matrix g2 = csr_matmul(a_hat, dz2);
  Matrix dw2 = matmul_at_b(cache.h1, g2);
  for (std::size_t i = 0; i < dw2.data.size(); ++i) dw2.data[i] += weight_decay * model.w2.data[i];

  Matrix dh1 = matmul_a_bt(g2, model.w2);
  const bool masked = cache.mask_h.data.size() == dh1.data.size();
  for (std::size_t i = 0; i < dh1.data.size(); ++i) {
    double g = dh1.data[i];
    if (masked) g *= cache.mask_h.data[i];
    dh1.data[i] = cache.z1.data[i] > 0.0 ? g : 0.0;
  }

  Matrix g1 = csr_matmul(a_hat, dh1);
  Matrix dw1 = matmul_at_b(cache.x_in, g1);
  for (std::size_t i = 0; i < dw1.data.size(); ++i) dw1.data[i] += weight_decay * model.w1.data[i];

  return {std::move(dw1), std::move(dw2)};
}

namespace {

Matrix glorot_uniform(std::size_t rows, std::size_t cols, Rng& rng) {
  Matrix m(rows, cols);
  const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
  for (double& v : m.data) v = rng.uniform(-limit, limit);
  return m;
}

struct Split {
  LabeledNodes train;
  LabeledNodes val;
};

// 95/5 split of the labeled nodes, stratified by class when every class that
// has labels has at least two of them. Validation always gets at least one
// node and training keeps at least one.
Split split_labels(const LabelSet& labels, double val_fraction, Rng& rng) {
  std::vector<std::vector<NodeId>> by_class(labels.n_classes);
  std::size_t total = 0;
  for (NodeId i = 0; i < labels.assignments.size(); ++i) {
    const int a = labels.assignments[i];
    if (a != LabelSet::kUnlabeled) {
      by_class[static_cast<std::size_t>(a)].push_back(i);
      ++total;
    }
  }
  if (total < 2) throw DataError("training needs at least 2 labeled nodes");

  const std::size_t n_val = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::llround(val_fraction * static_cast<double>(total))), 1,
      total - 1);

  bool stratify = true;
  for (const auto& nodes : by_class) {
    if (nodes.size() == 1) stratify = false;
  }

  Split split;
  if (stratify) {
    // proportional validation quota per class, remainders to the largest
    // fractional parts, capped so each class keeps a training node
    std::vector<std::size_t> quota(labels.n_classes, 0);
    std::vector<std::pair<double, std::size_t>> remainder;
    std::size_t assigned = 0;
    for (std::size_t cls = 0; cls < labels.n_classes; ++cls) {
      if (by_class[cls].empty()) continue;
      const double exact = val_fraction * static_cast<double>(by_class[cls].size());
      quota[cls] = std::min<std::size_t>(static_cast<std::size_t>(exact),
                                         by_class[cls].size() - 1);
      assigned += quota[cls];
      remainder.emplace_back(-(exact - std::floor(exact)), cls);
    }
    std::sort(remainder.begin(), remainder.end());
    std::size_t safety = 0;
    while (assigned < n_val && safety < 2 * labels.n_classes + 2) {
      bool progressed = false;
      for (const auto& [neg_frac, cls] : remainder) {
        if (assigned >= n_val) break;
        if (quota[cls] + 1 < by_class[cls].size()) {
          ++quota[cls];
          ++assigned;
          progressed = true;
        }
      }
      if (!progressed) break;
      ++safety;
    }
    for (std::size_t cls = 0; cls < labels.n_classes; ++cls) {
      auto nodes = by_class[cls];
      rng.shuffle(nodes);
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        auto& side = i < quota[cls] ? split.val : split.train;
        side.emplace_back(nodes[i], static_cast<int>(cls));
      }
    }
  } else {
    std::vector<NodeId> nodes;
    nodes.reserve(total);
    for (NodeId i = 0; i < labels.assignments.size(); ++i) {
      if (labels.assignments[i] != LabelSet::kUnlabeled) nodes.push_back(i);
    }
    rng.shuffle(nodes);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      auto& side = i < n_val ? split.val : split.train;
      side.emplace_back(nodes[i], labels.assignments[nodes[i]]);
    }
  }
  if (split.val.empty() || split.train.empty()) {
    throw DataError("label split produced an empty partition");
  }
  // deterministic evaluation order
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.val.begin(), split.val.end());
  return split;
}

struct AdamState {
  Matrix m;
  Matrix v;
  explicit AdamState(const Matrix& shape) : m(shape.rows, shape.cols), v(shape.rows, shape.cols) {}
};

void adam_step(Matrix& w, const Matrix& grad, AdamState& state, double lr, std::size_t t) {
  constexpr double beta1 = 0.9;
  constexpr double beta2 = 0.999;
  constexpr double eps = 1e-8;
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t));
  for (std::size_t i = 0; i < w.data.size(); ++i) {
    const double g = grad.data[i];
    state.m.data[i] = beta1 * state.m.data[i] + (1.0 - beta1) * g;
    state.v.data[i] = beta2 * state.v.data[i] + (1.0 - beta2) * g * g;
    const double m_hat = state.m.data[i] / bc1;
    const double v_hat = state.v.data[i] / bc2;
    w.data[i] -= lr * m_hat / (std::sqrt(v_hat) + eps);
  }
}

double regularizer(const GcnModel& model, double weight_decay) {
  return 0.5 * weight_decay * (frobenius_squared(model.w1) + frobenius_squared(model.w2));
}

}  // namespace

TrainResult gcn_train(const AttributedGraph& graph, const LabelSet& labels,
                      const TrainConfig& config) {
  config.validate();
  if (labels.n_classes < 1) throw DataError("training needs at least one class");

  Rng rng(config.seed);
  const Split split = split_labels(labels, config.val_fraction, rng);
  const CsrMatrix a_hat = graph.normalized_adjacency();
  const Matrix& x = graph.attributes();

  GcnModel model{glorot_uniform(x.cols, config.hidden_dim, rng),
                 glorot_uniform(config.hidden_dim, labels.n_classes, rng)};

  AdamState adam1(model.w1);
  AdamState adam2(model.w2);

  TrainResult result;
  {
    const auto p0 = gcn_forward(model, a_hat, x, false, 0.0, nullptr);
    result.initial_train_loss =
        cross_entropy(p0, split.train) + regularizer(model, config.weight_decay);
  }

  GcnModel best = model;
  double best_val = std::numeric_limits<double>::infinity();
  std::size_t best_epoch = 0;
  std::size_t since_improvement = 0;

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    result.epochs_run = epoch;

    ForwardCache cache;
    const auto p_train =
        gcn_forward(model, a_hat, x, true, config.dropout_rate, &rng, &cache);
    const Gradients grads =
        gcn_gradients(model, a_hat, split.train, config.weight_decay, cache, p_train);
    adam_step(model.w1, grads.dw1, adam1, config.learning_rate, epoch);
    adam_step(model.w2, grads.dw2, adam2, config.learning_rate, epoch);

    const auto p_eval = gcn_forward(model, a_hat, x, false, 0.0, nullptr);
    const double val_loss = cross_entropy(p_eval, split.val);
    result.val_loss_history.push_back(val_loss);

    if (val_loss < best_val) {
      best_val = val_loss;
      best = model;
      best_epoch = epoch;
      since_improvement = 0;
    } else {
      ++since_improvement;
      if (since_improvement >= config.patience) break;
    }
  }

  result.model = std::move(best);
  result.best_epoch = best_epoch;
  result.best_val_loss = best_val;
  result.p = gcn_forward(result.model, a_hat, x, false, 0.0, nullptr);
  return result;
}

}  // namespace clad
