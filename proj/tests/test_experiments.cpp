#include <algorithm>
#include <cmath>
#include <filesystem>
#include <regex>
#include <string>

#include <unistd.h>

#include "doctest.h"

#include "cpce/errors.hpp"
#include "cpce/experiments.hpp"
#include "cpce/io.hpp"

using namespace cpce;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small(const std::string& command) {
  ExperimentConfig c = ExperimentConfig::defaults_for(command);
  c.n = 4;
  c.runs = 2;
  c.iterations = 15;
  c.layers = 2;
  c.seed = 3;
  return c;
}

std::vector<std::pair<double, double>> markers(const std::string& svg) {
  std::vector<std::pair<double, double>> out;
  const std::regex re(R"re(data-x="([^"]+)" data-y="([^"]+)")re");
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), re); it != std::sregex_iterator(); ++it)
    out.emplace_back(std::stod((*it)[1]), std::stod((*it)[2]));
  return out;
}

}  // namespace

TEST_CASE("depth sweep") {
  CHECK(depth_sweep(16) == std::vector<std::size_t>{4, 8, 12, 16});
  CHECK(depth_sweep(9) == std::vector<std::size_t>{3, 5, 7, 9});
  CHECK(depth_sweep(2) == std::vector<std::size_t>{1, 2});
  CHECK(depth_sweep(1) == std::vector<std::size_t>{1});
}

TEST_CASE("config json round trip and unknown keys") {
  ExperimentConfig c = small("complete");
  c.fractions = {0.2, 0.6};
  c.c_schedule = CSchedule::parse("uniform:0.5");
  c.kind = EstimatorKind::E;
  const ExperimentConfig back = merge_json(ExperimentConfig::defaults_for("complete"), to_json(c));
  CHECK(to_json(back) == to_json(c));
  CHECK_THROWS_AS(merge_json(c, nlohmann::json{{"bogus", 1}}), InputError);
  CHECK(merge_json(c, nlohmann::json{{"iters", 7}}).iterations == 7);
}

TEST_CASE("config validation") {
  ExperimentConfig c = small("lowrank");
  c.rank = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = small("complete");
  c.fractions = {1.5};
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = small("estimate");
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = small("bogus");
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  CHECK_NOTHROW(small("convergence").validate());
}

TEST_CASE("experiments are deterministic") {
  for (const char* cmd : {"convergence", "lowrank", "complete", "nearsingular"}) {
    const ExperimentConfig c = small(cmd);
    const Artifacts a = run_experiment(c);
    const Artifacts b = run_experiment(c);
    CHECK(a.files == b.files);
    CHECK_FALSE(a.files.empty());
  }
}

TEST_CASE("convergence output shape") {
  const Artifacts a = run_experiment(small("convergence"));
  const CsvTable t = parse_csv_table(a.files.at("convergence.csv"));
  CHECK(t.rows.size() == 15);
  for (std::size_t k = 1; k < t.rows.size(); ++k) {
    CHECK(t.number(k, "c_mean_best_mae") <= t.number(k - 1, "c_mean_best_mae"));
    CHECK(t.number(k, "e_mean_best_mae") <= t.number(k - 1, "e_mean_best_mae"));
  }
  const CsvTable s = parse_csv_table(a.files.at("convergence_summary.csv"));
  CHECK(s.rows.size() == 2);
}

TEST_CASE("lowrank sweep covers every rank") {
  const Artifacts a = run_experiment(small("lowrank"));
  const CsvTable t = parse_csv_table(a.files.at("lowrank.csv"));
  REQUIRE(t.rows.size() == 4);
  const CsvTable runs = parse_csv_table(a.files.at("lowrank_runs.csv"));
  for (std::size_t k = 0; k < runs.rows.size(); ++k)
    CHECK(runs.number(k, "eigenvalues_above_1e-8") <= runs.number(k, "r"));
}

TEST_CASE("gradvar rows follow the depth sweep") {
  ExperimentConfig c = ExperimentConfig::defaults_for("gradvar");
  c.qubits = {3};
  c.samples = 30;
  c.iterations = 5;
  c.runs = 1;
  const CsvTable t = parse_csv_table(run_experiment(c).files.at("gradvar.csv"));
  REQUIRE(t.rows.size() == depth_sweep(9).size());
  for (std::size_t k = 0; k < t.rows.size(); ++k) {
    CHECK(t.number(k, "layers") == static_cast<double>(depth_sweep(9)[k]));
    CHECK(t.number(k, "ratio") ==
          doctest::Approx(t.number(k, "variance") / t.number(k, "bound")).epsilon(1e-12));
  }
}

TEST_CASE("plots match their CSV data") {
  ExperimentConfig c = small("complete");
  c.svg = true;
  Artifacts a = run_experiment(c);
  finalize_artifacts(c, a);
  REQUIRE(a.files.count("completion.svg"));
  CHECK_FALSE(a.files.count("completion_runs.svg"));
  const CsvTable t = parse_csv_table(a.files.at("completion.csv"));
  auto pts = markers(a.files.at("completion.svg"));
  REQUIRE(pts.size() == t.rows.size());
  std::vector<std::pair<double, double>> want;
  for (const char* kind : {"c", "e"})
    for (std::size_t k = 0; k < t.rows.size(); ++k)
      if (t.rows[k][t.column("kind")] == kind)
        want.emplace_back(t.number(k, "fraction"), t.number(k, "mean_final_mae"));
  CHECK(pts == want);

  const Artifacts conv = run_experiment(small("convergence"));
  const std::string svg = *plot_csv(conv.files.at("convergence.csv"));
  const CsvTable ct = parse_csv_table(conv.files.at("convergence.csv"));
  pts = markers(svg);
  REQUIRE(pts.size() == 2 * ct.rows.size());
  for (std::size_t k = 0; k < ct.rows.size(); ++k) {
    CHECK(pts[k].second == ct.number(k, "c_mean_best_mae"));
    CHECK(pts[ct.rows.size() + k].second == ct.number(k, "e_mean_best_mae"));
  }
  CHECK_FALSE(plot_csv("a,b\n1,2\n").has_value());
}

TEST_CASE("provenance records config and artifacts") {
  ExperimentConfig c = small("nearsingular");
  Artifacts a = run_experiment(c);
  finalize_artifacts(c, a);
  const auto j = nlohmann::json::parse(a.files.at("provenance.json"));
  CHECK(j["command"] == "nearsingular");
  CHECK(j["seeds"]["base"] == 3);
  CHECK(j["seeds"]["runs"] == std::vector<int>{3, 4});
  CHECK(j["version"] == kVersion);
  CHECK(std::find(j["artifacts"].begin(), j["artifacts"].end(), "nearsingular.csv") != j["artifacts"].end());
  const ExperimentConfig again = merge_json(ExperimentConfig::defaults_for("nearsingular"), j["config"]);
  CHECK(run_experiment(again).files == run_experiment(c).files);

  const fs::path dir = fs::temp_directory_path() / ("cpce-exp-" + std::to_string(::getpid()));
  fs::remove_all(dir);
  write_artifacts(dir, a);
  CHECK(read_text_file(dir / "nearsingular.csv") == a.files.at("nearsingular.csv"));
  fs::remove_all(dir);
}

TEST_CASE("estimate from a file") {
  const fs::path dir = fs::temp_directory_path() / ("cpce-est-" + std::to_string(::getpid()));
  fs::create_directories(dir);
  write_text_file(dir / "t.csv", matrix_to_csv(random_psd(4, 2)));
  ExperimentConfig c = small("estimate");
  c.input = (dir / "t.csv").string();
  const Artifacts a = run_experiment(c);
  CHECK_FALSE(a.files.empty());
  c.input = (dir / "missing.csv").string();
  CHECK_THROWS_AS(run_experiment(c), InputError);
  fs::remove_all(dir);
}
