#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "clad/errors.hpp"
#include "clad/evaluation.hpp"
#include "clad/gcn.hpp"
#include "clad/injection.hpp"
#include "clad/kmeans.hpp"
#include "clad/labels.hpp"
#include "clad/scores.hpp"
#include "clad/synthetic.hpp"

namespace py = pybind11;
using namespace clad;

namespace {

Matrix to_matrix(const py::array_t<double, py::array::c_style | py::array::forcecast>& arr) {
  if (arr.ndim() != 2) throw py::value_error("expected a 2-d array");
  Matrix m(static_cast<std::size_t>(arr.shape(0)), static_cast<std::size_t>(arr.shape(1)));
  std::copy_n(arr.data(), m.data.size(), m.data.begin());
  return m;
}

py::array_t<double> from_matrix(const Matrix& m) {
  py::array_t<double> arr({m.rows, m.cols});
  std::copy_n(m.data.data(), m.data.size(), arr.mutable_data());
  return arr;
}

template <typename T>
py::array_t<T> from_vector(const std::vector<T>& v) {
  py::array_t<T> arr(v.size());
  std::copy_n(v.data(), v.size(), arr.mutable_data());
  return arr;
}

std::shared_ptr<AttributedGraph> build_graph(
    const py::array_t<std::int64_t, py::array::c_style | py::array::forcecast>& edges,
    const py::array_t<double, py::array::c_style | py::array::forcecast>& attributes) {
  if (edges.ndim() != 2 || (edges.shape(0) > 0 && edges.shape(1) != 2)) {
    throw py::value_error("edges must have shape (m, 2)");
  }
  std::vector<std::pair<NodeId, NodeId>> edge_list;
  edge_list.reserve(static_cast<std::size_t>(edges.shape(0)));
  for (py::ssize_t e = 0; e < edges.shape(0); ++e) {
    const std::int64_t u = edges.data()[2 * e];
    const std::int64_t v = edges.data()[2 * e + 1];
    if (u < 0 || v < 0) throw py::value_error("edge endpoints must be non-negative");
    edge_list.emplace_back(static_cast<NodeId>(u), static_cast<NodeId>(v));
  }
  return std::make_shared<AttributedGraph>(static_cast<std::size_t>(attributes.shape(0)),
                                           edge_list, to_matrix(attributes));
}

LabelSet labels_from_array(
    const py::array_t<std::int64_t, py::array::c_style | py::array::forcecast>& labels,
    std::size_t n_classes) {
  if (labels.ndim() != 1) throw py::value_error("labels must be 1-d");
  LabelSet set(static_cast<std::size_t>(labels.shape(0)), n_classes);
  for (py::ssize_t i = 0; i < labels.shape(0); ++i) {
    const std::int64_t v = labels.data()[i];
    if (v >= 0) set.set(static_cast<NodeId>(i), static_cast<int>(v));
  }
  return set;
}

py::array_t<std::int64_t> labels_to_array(const LabelSet& labels) {
  py::array_t<std::int64_t> arr(labels.assignments.size());
  for (std::size_t i = 0; i < labels.assignments.size(); ++i) {
    arr.mutable_data()[i] = labels.assignments[i];
  }
  return arr;
}

AnomalyGroundTruth truth_from_array(
    const py::array_t<std::int64_t, py::array::c_style | py::array::forcecast>& flags) {
  if (flags.ndim() != 1) throw py::value_error("flags must be 1-d");
  AnomalyGroundTruth truth(static_cast<std::size_t>(flags.shape(0)));
  for (py::ssize_t i = 0; i < flags.shape(0); ++i) {
    const std::int64_t v = flags.data()[i];
    if (v < 0 || v > 2) throw py::value_error("flags must be 0, 1 or 2");
    truth.flags[static_cast<std::size_t>(i)] = static_cast<AnomalyFlag>(v);
  }
  return truth;
}

py::array_t<std::int64_t> truth_to_array(const AnomalyGroundTruth& truth) {
  py::array_t<std::int64_t> arr(truth.flags.size());
  for (std::size_t i = 0; i < truth.flags.size(); ++i) {
    arr.mutable_data()[i] = static_cast<std::int64_t>(truth.flags[i]);
  }
  return arr;
}

}  // namespace

PYBIND11_MODULE(_clad, m) {
  m.doc() = "class-label-aware graph anomaly detection";

  py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

  py::class_<AttributedGraph, std::shared_ptr<AttributedGraph>>(m, "Graph")
      .def(py::init(&build_graph), py::arg("edges"), py::arg("attributes"))
      .def_property_readonly("n_nodes", &AttributedGraph::n_nodes)
      .def_property_readonly("n_edges", &AttributedGraph::n_edges)
      .def_property_readonly("n_features", &AttributedGraph::n_features)
      .def("degree", &AttributedGraph::degree, py::arg("node"))
      .def("neighbors",
           [](const AttributedGraph& g, NodeId i) {
             const auto nbrs = g.neighbors(i);
             return std::vector<NodeId>(nbrs.begin(), nbrs.end());
           },
           py::arg("node"))
      .def("has_edge", &AttributedGraph::has_edge, py::arg("u"), py::arg("v"))
      .def("attributes", [](const AttributedGraph& g) { return from_matrix(g.attributes()); })
      .def("edges",
           [](const AttributedGraph& g) {
             const auto edges = g.edge_list();
             py::array_t<std::int64_t> arr({edges.size(), std::size_t{2}});
             for (std::size_t e = 0; e < edges.size(); ++e) {
               arr.mutable_data()[2 * e] = static_cast<std::int64_t>(edges[e].first);
               arr.mutable_data()[2 * e + 1] = static_cast<std::int64_t>(edges[e].second);
             }
             return arr;
           })
      .def("normalized_adjacency", [](const AttributedGraph& g) {
        const CsrMatrix a = g.normalized_adjacency();
        return py::make_tuple(from_vector(a.indptr), from_vector(a.indices),
                              from_vector(a.values));
      });

  m.def(
      "make_benchmark",
      [](std::size_t n_nodes, std::size_t n_communities, std::size_t n_features,
         double intra_degree, double inter_degree, double degree_spread, double center_scale,
         double attr_noise, double noise_spread, std::uint64_t seed) {
        BenchmarkConfig config{n_nodes,      n_communities, n_features, intra_degree,
                               inter_degree, degree_spread, center_scale, attr_noise,
                               noise_spread, seed};
        Benchmark bench = make_benchmark(config);
        auto graph = std::make_shared<AttributedGraph>(std::move(bench.graph));
        return py::make_tuple(graph, labels_to_array(bench.labels));
      },
      py::arg("n_nodes") = 3000, py::arg("n_communities") = 5, py::arg("n_features") = 20,
      py::arg("intra_degree") = 5.5, py::arg("inter_degree") = 0.7,
      py::arg("degree_spread") = 1.25, py::arg("center_scale") = 1.4,
      py::arg("attr_noise") = 1.0, py::arg("noise_spread") = 0.6, py::arg("seed") = 0,
      "Planted-community benchmark; returns (graph, community_labels).");

  m.def(
      "inject_anomalies",
      [](const std::shared_ptr<AttributedGraph>& graph, std::size_t clique_size,
         std::size_t n_cliques, std::size_t n_attribute_anomalies, std::size_t candidate_pool,
         std::uint64_t seed) {
        InjectionConfig config{clique_size, n_cliques, n_attribute_anomalies, candidate_pool,
                               seed};
        InjectionResult result = inject_anomalies(*graph, config);
        auto injected = std::make_shared<AttributedGraph>(std::move(result.graph));
        return py::make_tuple(injected, truth_to_array(result.truth), result.edges_added);
      },
      py::arg("graph"), py::arg("clique_size") = 15, py::arg("n_cliques") = 5,
      py::arg("n_attribute_anomalies") = 75, py::arg("candidate_pool") = 50, py::arg("seed") = 0,
      "Plant anomalies; returns (graph, flags, edges_added) with flags 0/1/2.");

  m.def(
      "kmeans",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& points,
         std::size_t k, std::uint64_t seed, std::size_t max_iters, double tol) {
        Rng rng(seed);
        const ClusterModel model = kmeans(to_matrix(points), k, rng, max_iters, tol);
        return py::make_tuple(from_matrix(model.centroids), from_vector(model.assignments),
                              model.inertia);
      },
      py::arg("points"), py::arg("k"), py::arg("seed") = 0, py::arg("max_iters") = 100,
      py::arg("tol") = 1e-6, "Lloyd k-means with k-means++ seeding.");

  m.def(
      "pseudo_labels",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& points,
         std::size_t k, std::size_t per_cluster, std::uint64_t seed) {
        Rng rng(seed);
        const Matrix pts = to_matrix(points);
        const ClusterModel model = kmeans(pts, k, rng);
        return labels_to_array(select_pseudo_labels(model, pts, per_cluster));
      },
      py::arg("points"), py::arg("k") = 5, py::arg("per_cluster") = 50, py::arg("seed") = 0,
      "K-means pseudo-labels (-1 marks unlabeled nodes).");

  m.def(
      "train_gcn",
      [](const std::shared_ptr<AttributedGraph>& graph,
         const py::array_t<std::int64_t, py::array::c_style | py::array::forcecast>& labels,
         std::size_t n_classes, std::size_t hidden_dim, double learning_rate, double weight_decay,
         double dropout, std::size_t max_epochs, std::size_t patience, double val_fraction,
         std::uint64_t seed) {
        TrainConfig config{hidden_dim, learning_rate, weight_decay, dropout,
                           max_epochs, patience,      val_fraction, seed};
        const TrainResult result = gcn_train(*graph, labels_from_array(labels, n_classes), config);
        py::dict info;
        info["best_epoch"] = result.best_epoch;
        info["epochs_run"] = result.epochs_run;
        info["best_val_loss"] = result.best_val_loss;
        info["initial_train_loss"] = result.initial_train_loss;
        return py::make_tuple(from_matrix(result.p.p), info);
      },
      py::arg("graph"), py::arg("labels"), py::arg("n_classes"), py::arg("hidden_dim") = 64,
      py::arg("learning_rate") = 0.01, py::arg("weight_decay") = 5e-4, py::arg("dropout") = 0.5,
      py::arg("max_epochs") = 300, py::arg("patience") = 30, py::arg("val_fraction") = 0.05,
      py::arg("seed") = 0,
      "Semi-supervised GCN training; labels use -1 for unlabeled. Returns (P, info).");

  m.def(
      "anomaly_scores",
      [](const std::shared_ptr<AttributedGraph>& graph,
         const py::array_t<double, py::array::c_style | py::array::forcecast>& p, double alpha,
         const std::string& metric) {
        StructuralMetric sm = StructuralMetric::JsdPlus;
        if (metric == "jsd") sm = StructuralMetric::Jsd;
        else if (metric == "jsd2") sm = StructuralMetric::Jsd2;
        else if (metric != "jsd_plus") throw py::value_error("metric must be jsd|jsd2|jsd_plus");
        const ClassDistributionMatrix cdm(to_matrix(p));
        const AnomalyScores scores = compute_anomaly_scores(*graph, cdm, alpha, sm);
        py::dict out;
        out["struc_raw"] = from_vector(scores.struc_raw);
        out["attr_raw"] = from_vector(scores.attr_raw);
        out["struc"] = from_vector(scores.struc);
        out["attr"] = from_vector(scores.attr);
        out["final"] = from_vector(scores.final_score);
        out["ranking"] = from_vector(scores.ranking);
        out["rank"] = from_vector(scores.rank);
        return out;
      },
      py::arg("graph"), py::arg("p"), py::arg("alpha"), py::arg("metric") = "jsd_plus",
      "Structural + attribute quantifiers, min-max scaling and fusion.");

  m.def(
      "diagnostics",
      [](const std::shared_ptr<AttributedGraph>& graph,
         const py::array_t<double, py::array::c_style | py::array::forcecast>& p) {
        const ClassDistributionMatrix cdm(to_matrix(p));
        const auto rows = compute_diagnostics(*graph, cdm);
        std::vector<std::size_t> degree(rows.size()), gamma(rows.size());
        std::vector<double> vjsd(rows.size()), vjsd2(rows.size()), vplus(rows.size()),
            ved(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
          degree[i] = rows[i].degree;
          gamma[i] = rows[i].gamma;
          vjsd[i] = rows[i].jsd;
          vjsd2[i] = rows[i].jsd2;
          vplus[i] = rows[i].jsd_plus;
          ved[i] = rows[i].ed;
        }
        py::dict out;
        out["degree"] = from_vector(degree);
        out["gamma"] = from_vector(gamma);
        out["jsd"] = from_vector(vjsd);
        out["jsd2"] = from_vector(vjsd2);
        out["jsd_plus"] = from_vector(vplus);
        out["ed"] = from_vector(ved);
        return out;
      },
      py::arg("graph"), py::arg("p"), "Per-node degree, gamma, jsd, jsd2, jsd_plus and ed.");

  m.def(
      "roc_auc",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& scores,
         const py::array_t<std::int64_t, py::array::c_style | py::array::forcecast>& positives) {
        std::vector<double> s(scores.data(), scores.data() + scores.shape(0));
        std::vector<NodeId> pos;
        for (py::ssize_t i = 0; i < positives.shape(0); ++i) {
          pos.push_back(static_cast<NodeId>(positives.data()[i]));
        }
        return roc_auc(s, pos);
      },
      py::arg("scores"), py::arg("positives"),
      "Mann-Whitney ROC-AUC; positives are node indices.");

  m.def(
      "alpha_sweep",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& struc,
         const py::array_t<double, py::array::c_style | py::array::forcecast>& attr,
         const py::array_t<std::int64_t, py::array::c_style | py::array::forcecast>& flags) {
        std::vector<double> s(struc.data(), struc.data() + struc.shape(0));
        std::vector<double> a(attr.data(), attr.data() + attr.shape(0));
        const auto grid = default_alpha_grid();
        const AlphaSweepResult result = alpha_sweep(s, a, truth_from_array(flags), grid);
        py::list entries;
        for (const auto& e : result.entries) entries.append(py::make_tuple(e.alpha, e.auc));
        py::dict out;
        out["entries"] = entries;
        out["best_alpha"] = result.best_alpha;
        out["best_auc"] = result.best_auc;
        return out;
      },
      py::arg("struc"), py::arg("attr"), py::arg("flags"),
      "AUC across the 0.0..1.0 alpha grid; flags 0 benign, 1 structural, 2 attribute.");
}
