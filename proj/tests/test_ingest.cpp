#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "benchpred/config.hpp"
#include "benchpred/error.hpp"
#include "benchpred/ingest.hpp"
#include "test_support.hpp"

using namespace benchpred;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("benchpred_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

RunReport tiny_report() {
  RunReport report;
  report.config_json = "{\"note\":\"test\"}";
  TrialReport trial;
  trial.benchmark = "bench";
  trial.method = MethodId::aipw;
  trial.trial = 0;
  trial.seed = 123456789012345ull;
  trial.n = 3;
  trial.core_set = {4, 1, 7};
  TargetRecord r;
  r.model = "target-a";
  r.true_mean = 0.625;
  r.estimate = 0.6000000000001234;
  r.gap = std::abs(r.true_mean - r.estimate);
  r.sigma = 0.4841229182759271;
  r.normalized_gap = r.gap / r.sigma;
  r.normalized_defined = true;
  r.similarity = 0.312499999999312;
  r.similarity_defined = true;
  trial.targets.push_back(r);
  TargetRecord r2 = r;
  r2.model = "target-b";
  r2.estimate = 0.7071067811865476;
  r2.gap = std::abs(r2.true_mean - r2.estimate);
  r2.normalized_gap = r2.gap / r2.sigma;
  trial.targets.push_back(r2);
  trial.trial_eg = 0.5 * (trial.targets[0].gap + trial.targets[1].gap);
  report.trials.push_back(trial);

  TrialReport baseline = report.trials[0];
  baseline.method = MethodId::random_sampling;
  report.trials.push_back(baseline);
  report.summary = aggregate(report.trials);
  return report;
}

}  // namespace

TEST_CASE("load_csv: binary detection and shape") {
  TempDir dir;
  const std::string path = dir.file("scores.csv");
  write_file(path,
             "model_id,q1,q2,q3,q4\n"
             "model-a,1,0,1,1\n"
             "model-b,0,0,1,0\n"
             "model-c,1,1,1,1\n");
  const BenchmarkBundle bundle = load_csv(path);
  CHECK(bundle.matrix.models() == 3);
  CHECK(bundle.matrix.datapoints() == 4);
  CHECK(bundle.matrix.binary_flag);
  CHECK(bundle.matrix.model_ids[1] == "model-b");
  CHECK(bundle.matrix.scores(1, 2) == 1.0);
}

TEST_CASE("load_csv: fractional score clears the binary flag") {
  TempDir dir;
  const std::string path = dir.file("scores.csv");
  write_file(path,
             "model_id,q1,q2\n"
             "a,0.37,1\n"
             "b,0,1\n");
  CHECK_FALSE(load_csv(path).matrix.binary_flag);
}

TEST_CASE("load_csv: malformed rows carry the line number") {
  TempDir dir;
  const std::string path = dir.file("scores.csv");
  write_file(path,
             "model_id,q1,q2,q3\n"
             "a,1,0,1\n"
             "b,1,0\n");
  CHECK_THROWS_WITH_AS(load_csv(path), doctest::Contains("line 3"), Error);

  write_file(path, "model,q1\na,1\n");
  CHECK_THROWS_WITH_AS(load_csv(path), doctest::Contains("model_id"), Error);

  write_file(path, "model_id,q1\na,1\nb,x\n");
  CHECK_THROWS_WITH_AS(load_csv(path), doctest::Contains("line 3"), Error);
}

TEST_CASE("load_csv: out-of-range scores are data errors") {
  TempDir dir;
  const std::string path = dir.file("scores.csv");
  write_file(path,
             "model_id,q1,q2\n"
             "a,1,1.2\n"
             "b,0,1\n");
  CHECK_THROWS_WITH_AS(load_csv(path), doctest::Contains("out-of-range"), Error);
}

TEST_CASE("score csv round-trip is bit-exact and deterministic") {
  TempDir dir;
  Rng rng(3);
  BenchmarkBundle bundle;
  bundle.name = "round";
  bundle.matrix = test::make_score_matrix(test::random_matrix(5, 9, rng));
  const std::string path = dir.file("round.csv");
  save_csv(bundle, path);
  const BenchmarkBundle again = load_csv(path);
  CHECK((again.matrix.scores.array() == bundle.matrix.scores.array()).all());
  const BenchmarkBundle twice = load_csv(path);
  CHECK((again.matrix.scores.array() == twice.matrix.scores.array()).all());
}

TEST_CASE("report json round-trip preserves every numeric field exactly") {
  TempDir dir;
  const RunReport report = tiny_report();
  const std::string path = dir.file("report.json");
  save_report(report, path, ReportFormat::json);
  const RunReport loaded = load_report(path);
  REQUIRE(loaded.trials.size() == report.trials.size());
  for (std::size_t t = 0; t < report.trials.size(); ++t) {
    const TrialReport& a = report.trials[t];
    const TrialReport& b = loaded.trials[t];
    CHECK(a.benchmark == b.benchmark);
    CHECK(a.method == b.method);
    CHECK(a.seed == b.seed);
    CHECK(a.core_set == b.core_set);
    CHECK(a.trial_eg == b.trial_eg);
    REQUIRE(a.targets.size() == b.targets.size());
    for (std::size_t i = 0; i < a.targets.size(); ++i) {
      CHECK(a.targets[i].true_mean == b.targets[i].true_mean);
      CHECK(a.targets[i].estimate == b.targets[i].estimate);
      CHECK(a.targets[i].gap == b.targets[i].gap);
      CHECK(a.targets[i].sigma == b.targets[i].sigma);
      CHECK(a.targets[i].normalized_gap == b.targets[i].normalized_gap);
      CHECK(a.targets[i].similarity == b.targets[i].similarity);
    }
  }
}

TEST_CASE("report json carries the documented keys") {
  TempDir dir;
  const std::string path = dir.file("report.json");
  save_report(tiny_report(), path, ReportFormat::json);
  std::ifstream in(path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  for (const char* key : {"\"benchmark\"", "\"method\"", "\"trial\"", "\"seed\"", "\"n\"",
                          "\"estimates\"", "\"gap\"", "\"config\"", "\"summary\""}) {
    CHECK(text.find(key) != std::string::npos);
  }
}

TEST_CASE("report csv round-trip holds to nine decimals") {
  TempDir dir;
  const RunReport report = tiny_report();
  const std::string path = dir.file("report.csv");
  save_report(report, path, ReportFormat::csv);
  const RunReport loaded = load_report(path);
  REQUIRE(loaded.trials.size() == report.trials.size());
  for (std::size_t t = 0; t < report.trials.size(); ++t) {
    REQUIRE(loaded.trials[t].targets.size() == report.trials[t].targets.size());
    for (std::size_t i = 0; i < report.trials[t].targets.size(); ++i) {
      const TargetRecord& a = report.trials[t].targets[i];
      const TargetRecord& b = loaded.trials[t].targets[i];
      CHECK(std::abs(a.true_mean - b.true_mean) <= 5e-10);
      CHECK(std::abs(a.estimate - b.estimate) <= 5e-10);
      CHECK(std::abs(a.gap - b.gap) <= 5e-10);
      CHECK(std::abs(a.normalized_gap - b.normalized_gap) <= 5e-10);
      CHECK(std::abs(a.similarity - b.similarity) <= 5e-10);
    }
  }
}

TEST_CASE("save_report: empty collections are rejected") {
  TempDir dir;
  RunReport empty;
  CHECK_THROWS_WITH_AS(save_report(empty, dir.file("x.json"), ReportFormat::json),
                       doctest::Contains("nothing"), Error);
}

TEST_CASE("save_report: unwritable path raises io-error") {
  const RunReport report = tiny_report();
  CHECK_THROWS_WITH_AS(save_report(report, "/nonexistent-dir/report.json", ReportFormat::json),
                       doctest::Contains("cannot write"), Error);
}

TEST_CASE("experiment config: parsing, defaults, and unknown keys") {
  TempDir dir;
  write_file(dir.file("scores.csv"),
             "model_id,q1,q2,q3\n"
             "a,1,0,1\n"
             "b,0,1,1\n"
             "c,1,1,0\n"
             "d,0,0,1\n");
  const std::string config_text = R"({
    "benchmarks": [{"name": "demo", "path": "scores.csv"}],
    "methods": ["random-sampling", {"id": "aipw", "ridge_lambda": 2.5}],
    "n": 2,
    "trials": 4,
    "split": {"kind": "interpolation", "source_fraction": 0.5},
    "seed": 99
  })";
  write_file(dir.file("exp.json"), config_text);
  const ExperimentConfig config = load_experiment_config(dir.file("exp.json"));
  CHECK(config.benchmarks.size() == 1);
  CHECK(config.benchmarks[0].matrix.models() == 4);
  CHECK(config.methods.size() == 2);
  CHECK(config.methods[1].method_id == MethodId::aipw);
  CHECK(config.methods[1].hyper.aipw_ridge_lambda == 2.5);
  CHECK(config.n == 2);
  CHECK(config.base_seed == 99);

  // effective config is fully explicit and stable
  const std::string effective = effective_config_json(config);
  CHECK(effective.find("\"ridge_lambda\":2.5") != std::string::npos);
  CHECK(effective == effective_config_json(config));

  write_file(dir.file("bad.json"), R"({"benchmarks": [], "typo_key": 1})");
  CHECK_THROWS_AS(load_experiment_config(dir.file("bad.json")), Error);
}
