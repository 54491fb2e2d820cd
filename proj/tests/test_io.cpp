#include <doctest.h>

#include <cmath>

#include "clad/errors.hpp"
#include "clad/io.hpp"
#include "clad/rng.hpp"
#include "clad/scores.hpp"
#include "test_util.hpp"

using namespace clad;
using clad_test::TempDir;
using clad_test::read_file;
using clad_test::write_file;

TEST_CASE("load_graph deduplicates symmetric duplicates") {
  TempDir dir;
  write_file(dir.file("edges.txt"), "0 1\n1 0\n");
  write_file(dir.file("attrs.csv"), "1.0,2.0\n3.0,4.0\n");
  const auto g = load_graph(dir.file("edges.txt"), dir.file("attrs.csv"));
  CHECK(g.n_nodes() == 2);
  CHECK(g.n_edges() == 1);
  CHECK(g.attributes()(1, 1) == 4.0);
}

TEST_CASE("load_graph drops self-loops") {
  TempDir dir;
  write_file(dir.file("edges.txt"), "0 0\n");
  write_file(dir.file("attrs.csv"), "1.0\n2.0\n");
  const auto g = load_graph(dir.file("edges.txt"), dir.file("attrs.csv"));
  CHECK(g.n_edges() == 0);
  CHECK(g.dropped_self_loops() == 1);
}

TEST_CASE("attribute rows fix the node count") {
  TempDir dir;
  write_file(dir.file("edges.txt"), "0 2\n");
  write_file(dir.file("attrs.csv"), "1\n2\n3\n");
  const auto g = load_graph(dir.file("edges.txt"), dir.file("attrs.csv"));
  CHECK(g.n_nodes() == 3);
  CHECK(g.n_edges() == 1);
}

TEST_CASE("load_graph reports malformed input with line numbers") {
  TempDir dir;
  write_file(dir.file("attrs.csv"), "1\n2\n");

  write_file(dir.file("edges.txt"), "0 1\n0\n");
  CHECK_THROWS_WITH_AS(load_graph(dir.file("edges.txt"), dir.file("attrs.csv")),
                       doctest::Contains(":2"), DataError);

  write_file(dir.file("edges.txt"), "0 5\n");
  CHECK_THROWS_AS(load_graph(dir.file("edges.txt"), dir.file("attrs.csv")), DataError);

  write_file(dir.file("edges.txt"), "0 1 2\n");
  CHECK_THROWS_AS(load_graph(dir.file("edges.txt"), dir.file("attrs.csv")), DataError);

  write_file(dir.file("edges.txt"), "0 1\n");
  write_file(dir.file("ragged.csv"), "1,2\n3\n");
  CHECK_THROWS_WITH_AS(load_graph(dir.file("edges.txt"), dir.file("ragged.csv")),
                       doctest::Contains(":2"), DataError);
}

TEST_CASE("edge list comments and blank lines are skipped") {
  TempDir dir;
  write_file(dir.file("edges.txt"), "# a comment\n0 1 # trailing\n\n1 2\n");
  write_file(dir.file("attrs.csv"), "1\n2\n3\n");
  const auto g = load_graph(dir.file("edges.txt"), dir.file("attrs.csv"));
  CHECK(g.n_edges() == 2);
}

TEST_CASE("labels load and validate") {
  TempDir dir;
  write_file(dir.file("labels.csv"), "0,2\n5,0\n");
  const auto labels = load_labels(dir.file("labels.csv"), 3, 6);
  CHECK(labels.n_labeled() == 2);
  CHECK(labels.assignments[0] == 2);
  CHECK(labels.assignments[5] == 0);
  CHECK(labels.assignments[1] == LabelSet::kUnlabeled);

  write_file(dir.file("bad.csv"), "0,3\n");
  CHECK_THROWS_AS(load_labels(dir.file("bad.csv"), 3, 6), DataError);

  write_file(dir.file("dup.csv"), "0,1\n0,2\n");
  CHECK_THROWS_AS(load_labels(dir.file("dup.csv"), 3, 6), DataError);

  write_file(dir.file("empty.csv"), "");
  const auto empty = load_labels(dir.file("empty.csv"), 3, 6);
  CHECK(empty.n_labeled() == 0);
  CHECK(empty.n_classes == 3);
}

TEST_CASE("ground truth round trip") {
  TempDir dir;
  AnomalyGroundTruth truth(5);
  truth.flags[1] = AnomalyFlag::Structural;
  truth.flags[4] = AnomalyFlag::Attribute;
  save_ground_truth(truth, dir.file("truth.csv"));
  const auto loaded = load_ground_truth(dir.file("truth.csv"), 5);
  CHECK(loaded.flags == truth.flags);
  CHECK(loaded.count(AnomalyFlag::Structural) == 1);
  CHECK(loaded.n_anomalies() == 2);
}

TEST_CASE("save_scores orders rows by rank with id tie-break") {
  TempDir dir;
  SUBCASE("single node") {
    const auto scores = fuse(std::vector<double>{0.3}, std::vector<double>{0.3}, 0.5);
    save_scores(scores, dir.file("scores.csv"));
    CHECK(read_file(dir.file("scores.csv")) ==
          "node_id,struc,attr,final,rank\n0,0.29999999999999999,0.29999999999999999,"
          "0.29999999999999999,1\n");
  }
  SUBCASE("ties break by node id") {
    const auto scores =
        fuse(std::vector<double>{0.5, 0.5}, std::vector<double>{0.5, 0.5}, 1.0);
    save_scores(scores, dir.file("scores.csv"));
    const std::string body = read_file(dir.file("scores.csv"));
    CHECK(body.find("\n0,") < body.find("\n1,"));
    CHECK(scores.rank == std::vector<std::size_t>{1, 2});
  }
  SUBCASE("descending final score") {
    const auto scores =
        fuse(std::vector<double>{0.9, 0.1, 0.5}, std::vector<double>{0.9, 0.1, 0.5}, 1.0);
    CHECK(scores.ranking == std::vector<NodeId>{0, 2, 1});
    CHECK(scores.rank == std::vector<std::size_t>{1, 3, 2});
  }
}

TEST_CASE("rank column is a permutation of 1..N") {
  Rng rng(5);
  std::vector<double> struc(37), attr(37);
  for (auto& v : struc) v = rng.uniform();
  for (auto& v : attr) v = rng.uniform();
  const auto scores = fuse(struc, attr, 0.7);
  std::vector<bool> seen(scores.rank.size() + 1, false);
  for (const std::size_t r : scores.rank) {
    CHECK(r >= 1);
    CHECK(r <= scores.rank.size());
    CHECK(!seen[r]);
    seen[r] = true;
  }
}

TEST_CASE("graph save/load round-trips bit-exactly") {
  TempDir dir;
  Rng rng(13);
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId i = 0; i < 20; ++i) {
    for (NodeId j = i + 1; j < 20; ++j) {
      if (rng.uniform() < 0.2) edges.emplace_back(i, j);
    }
  }
  Matrix attrs(20, 3);
  for (double& v : attrs.data) v = rng.normal() * std::pow(10.0, rng.uniform(-8, 8));
  const AttributedGraph g(20, edges, std::move(attrs));
  save_graph(g, dir.file("edges.txt"), dir.file("attrs.csv"));
  const auto loaded = load_graph(dir.file("edges.txt"), dir.file("attrs.csv"));
  CHECK(loaded.edge_list() == g.edge_list());
  REQUIRE(loaded.attributes().data.size() == g.attributes().data.size());
  for (std::size_t i = 0; i < g.attributes().data.size(); ++i) {
    CHECK(loaded.attributes().data[i] == g.attributes().data[i]);
  }
}

TEST_CASE("checkpoint round trip") {
  TempDir dir;
  Rng rng(17);
  GcnModel model{Matrix(3, 4), Matrix(4, 2)};
  for (double& v : model.w1.data) v = rng.normal();
  for (double& v : model.w2.data) v = rng.normal();
  save_checkpoint(model, dir.file("model.txt"));
  const auto loaded = load_checkpoint(dir.file("model.txt"));
  CHECK(loaded.w1.data == model.w1.data);
  CHECK(loaded.w2.data == model.w2.data);

  write_file(dir.file("bad.txt"), "not-a-checkpoint 9\n");
  CHECK_THROWS_AS(load_checkpoint(dir.file("bad.txt")), DataError);
}

TEST_CASE("unreadable and unwritable paths are data errors") {
  CHECK_THROWS_AS(load_matrix_csv("/nonexistent/dir/attrs.csv"), DataError);
  const auto scores = fuse(std::vector<double>{0.1}, std::vector<double>{0.2}, 0.5);
  CHECK_THROWS_AS(save_scores(scores, "/nonexistent/dir/scores.csv"), DataError);
}
