#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "clad/io.hpp"
#include "test_util.hpp"

using clad_test::TempDir;
using clad_test::read_file;
using clad_test::write_file;

namespace {

int run_cli(const std::string& args, const std::string& log) {
  const std::string command = std::string(CLAD_CLI_PATH) + " " + args + " >" + log + " 2>&1";
  const int status = std::system(command.c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("cli end to end: synth, inject, label, run") {
  TempDir dir("cli");
  const std::string log = dir.file("log.txt");

  CHECK(run_cli("synth --nodes 400 --seed 5 --out-dir " + dir.path.string() + "/clean", log) == 0);
  CHECK(std::filesystem::exists(dir.path / "clean" / "edges.txt"));
  CHECK(std::filesystem::exists(dir.path / "clean" / "attrs.csv"));
  CHECK(std::filesystem::exists(dir.path / "clean" / "labels.csv"));

  CHECK(run_cli("inject --edges " + dir.path.string() + "/clean/edges.txt --attrs " +
                    dir.path.string() + "/clean/attrs.csv --clique-size 5 --cliques 2 " +
                    "--attr-anomalies 10 --seed 5 --out-dir " + dir.path.string() + "/injected",
                log) == 0);
  CHECK(std::filesystem::exists(dir.path / "injected" / "truth.csv"));

  CHECK(run_cli("label --edges " + dir.path.string() + "/injected/edges.txt --attrs " +
                    dir.path.string() + "/injected/attrs.csv --labels-in " + dir.path.string() +
                    "/clean/labels.csv --n-classes 5 --mode fraction --fraction 0.3 --seed 5 " +
                    "--out " + dir.path.string() + "/labels30.csv",
                log) == 0);
  const std::string labels = read_file(dir.file("labels30.csv"));
  CHECK(std::count(labels.begin(), labels.end(), '\n') == 120);  // 0.3 * 400

  write_file(dir.file("run.cfg"), "edges=" + dir.path.string() + "/injected/edges.txt\n" +
                                      "attrs=" + dir.path.string() + "/injected/attrs.csv\n" +
                                      "labels=" + dir.path.string() + "/labels30.csv\n" +
                                      "truth=" + dir.path.string() + "/injected/truth.csv\n" +
                                      "label_mode=file\nn_classes=5\nhidden_dim=16\n" +
                                      "max_epochs=40\npatience=10\nalpha=0.5\nseed=9\n");

  CHECK(run_cli("run --config " + dir.file("run.cfg") + " --out-dir " + dir.path.string() +
                    "/out_a",
                log) == 0);
  CHECK(run_cli("run --config " + dir.file("run.cfg") + " --out-dir " + dir.path.string() +
                    "/out_b",
                log) == 0);
  for (const char* name : {"scores.csv", "report.csv", "model.txt"}) {
    CHECK(read_file((dir.path / "out_a" / name).string()) ==
          read_file((dir.path / "out_b" / name).string()));
  }

  // eval recomputes the same AUC rows as the run-produced report
  CHECK(run_cli("eval --scores " + dir.path.string() + "/out_a/scores.csv --truth " +
                    dir.path.string() + "/injected/truth.csv --report-out " + dir.path.string() +
                    "/eval_report.csv",
                log) == 0);
  const std::string from_eval = read_file(dir.file("eval_report.csv"));
  const std::string from_run = read_file((dir.path / "out_a" / "report.csv").string());
  for (const std::string& row : {std::string("auc_overall"), std::string("auc_structural"),
                                 std::string("auc_attribute")}) {
    const auto line_of = [&row](const std::string& text) {
      const auto at = text.find(row);
      return text.substr(at, text.find('\n', at) - at);
    };
    CHECK(line_of(from_eval) == line_of(from_run));
  }
}

TEST_CASE("cli exit codes") {
  TempDir dir("cli_exit");
  const std::string log = dir.file("log.txt");

  // usage error: unknown flag
  CHECK(run_cli("score --bogus", log) == 1);
  // usage error: missing required subcommand
  CHECK(run_cli("", log) == 1);
  // data error: missing input file
  CHECK(run_cli("inject --edges /nonexistent/e.txt --attrs /nonexistent/a.csv", log) == 2);
  const std::string message = read_file(log);
  CHECK(message.find("error:") != std::string::npos);
  // help exits zero
  CHECK(run_cli("--help", log) == 0);
}

TEST_CASE("cli no-op injection preserves the graph") {
  TempDir dir("cli_noop");
  const std::string log = dir.file("log.txt");
  CHECK(run_cli("synth --nodes 150 --seed 2 --out-dir " + dir.path.string() + "/clean", log) == 0);
  CHECK(run_cli("inject --edges " + dir.path.string() + "/clean/edges.txt --attrs " +
                    dir.path.string() + "/clean/attrs.csv --cliques 0 --attr-anomalies 0 " +
                    "--out-dir " + dir.path.string() + "/same",
                log) == 0);
  CHECK(read_file((dir.path / "clean" / "edges.txt").string()) ==
        read_file((dir.path / "same" / "edges.txt").string()));
  CHECK(read_file((dir.path / "clean" / "attrs.csv").string()) ==
        read_file((dir.path / "same" / "attrs.csv").string()));
  CHECK(read_file((dir.path / "same" / "truth.csv").string()).empty());
}
