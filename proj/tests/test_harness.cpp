#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "invertor/error.hpp"
#include "invertor/harness.hpp"
#include "invertor/well_log.hpp"
#include "support/temp_dir.hpp"

using namespace invertor;
using testing::TempDir;

namespace {

// A 10-lobe, 7-well synthetic dataset written into `dir` as data.csv.
void write_dataset(const TempDir& dir, std::uint64_t seed = 1, std::size_t lobes = 10) {
  const auto dataset = make_synthetic_dataset(seed, lobes, 7);
  write_well_logs(dir / "data.csv", dataset.logs);
}

ExperimentConfig lobe_config(const TempDir& dir, const std::string& extra) {
  return parse_config_text(R"({"simulator": "lobe", "gamma": 1, "horizon": 10,
                               "base_seed": 1000, "data_path": "data.csv", )" +
                               extra + "}",
                           dir.path());
}

RunSummary summary_of(std::string label, MethodKind kind, std::vector<double> scores) {
  RunSummary s;
  s.label = std::move(label);
  s.method = kind;
  for (std::size_t k = 0; k < scores.size(); ++k) {
    RunRecord r;
    r.run = k;
    r.final_logscore = scores[k];
    s.runs.push_back(r);
  }
  return s;
}

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("parse_config reads the 30-run MH protocol") {
  TempDir dir;
  write_dataset(dir);
  testing::write_file(dir / "mh.json", R"({
    "simulator": "lobe", "method": "mh", "iterations": 500, "gamma": 1,
    "horizon": 10, "runs": 30, "base_seed": 7, "data_path": "data.csv",
    "output_dir": "out", "parallel_chains": 2
  })");
  const auto c = parse_config(dir / "mh.json");
  CHECK(c.simulator == SimulatorKind::lobe);
  CHECK(c.method.kind == MethodKind::mh);
  CHECK(c.method.iterations == 500);
  CHECK(c.kernel.gamma == 1.0);
  CHECK(c.kernel.norm == Norm::euclidean);
  CHECK(c.runs == 30);
  CHECK(c.base_seed == 7);
  CHECK(c.parallel_chains == 2);
  CHECK(c.data_path == (dir / "data.csv").lexically_normal());
  CHECK(c.output_dir == (dir / "out").lexically_normal());
  CHECK(c.lobe.terminal_penalty);
  CHECK(c.label == "mh");
}

TEST_CASE("parse_config rejects bad configs with a useful message") {
  TempDir dir;
  write_dataset(dir);
  CHECK(error_of([&] { lobe_config(dir, R"("method": "mh", "runs": 0)"); })
            .find("runs") != std::string::npos);
  CHECK(error_of([&] { lobe_config(dir, R"("method": "mh", "runs": 3, "particels": 10)"); }) ==
        "unknown config key 'particels'");
  CHECK(error_of([&] { lobe_config(dir, R"("method": "annealing", "runs": 3)"); })
            .find("annealing") != std::string::npos);
  CHECK(error_of([&] { lobe_config(dir, R"("method": "mh", "runs": "30")"); })
            .find("'runs'") != std::string::npos);
  CHECK(error_of([&] { lobe_config(dir, R"("method": "mh", "runs": -1)"); })
            .find("'runs'") != std::string::npos);
  CHECK(error_of([&] { lobe_config(dir, R"("method": "pgibbs", "runs": 1, "particles": 1)"); }) !=
        "");
  CHECK(error_of([&] {
          parse_config_text(R"({"simulator": "lobe", "method": "mh", "gamma": 1, "runs": 1,
                                "base_seed": 0, "data_path": "data.csv"})",
                            dir.path());
        }) == "missing required key 'horizon'");
  CHECK(error_of([&] {
          parse_config_text(R"({"simulator": "lobe", "method": "mh", "gamma": 1, "runs": 1,
                                "base_seed": 0, "horizon": 3, "data_path": "nope.csv"})",
                            dir.path());
        }).find("does not exist") != std::string::npos);
  CHECK(error_of([&] { parse_config_text("{\"simulator\": ", dir.path()); })
            .find("JSON") != std::string::npos);
  CHECK(error_of([&] { lobe_config(dir, R"("method": "mh", "runs": 1, "gamma": -1)"); }) != "");
}

TEST_CASE("oracle configs carry their observations inline") {
  const auto c = parse_config_text(R"({"simulator": "oracle", "method": "hybrid", "gamma": 1,
                                       "runs": 1, "base_seed": 0, "oracle_data": [0.1, -0.2, 0.4],
                                       "cycles": 5, "inner_sweeps": 1, "mh_per_cycle": 5})",
                                   ".");
  CHECK(c.horizon == 3);
  CHECK(c.oracle_data == std::vector<double>{0.1, -0.2, 0.4});
  CHECK(c.method.kind == MethodKind::hybrid);
  CHECK(error_of([] {
          parse_config_text(R"({"simulator": "oracle", "method": "mh", "gamma": 1, "runs": 1,
                                "base_seed": 0, "oracle_data": [0.1], "horizon": 2})",
                            ".");
        }) != "");
  CHECK(error_of([] {
          parse_config_text(R"({"simulator": "oracle", "method": "mh", "gamma": 1, "runs": 1,
                                "base_seed": 0, "oracle_data": [0.1], "grid_size": 8})",
                            ".");
        }) == "key 'grid_size' needs simulator 'lobe'");
}

TEST_CASE("30 MH runs on 10 lobes write 30 trajectories of 500 rows") {
  TempDir dir;
  write_dataset(dir);
  const auto config = lobe_config(dir, R"("method": "mh", "iterations": 500, "runs": 30,
                                          "output_dir": "out")");
  const auto summary = run_experiment(config);
  REQUIRE(summary.runs.size() == 30);
  for (const auto& r : summary.runs) {
    CHECK(r.seed == 1000 + r.run);
    char name[32];
    std::snprintf(name, sizeof name, "run_%03zu.csv", r.run);
    std::ifstream in(dir / "out" / "trajectories" / name);
    REQUIRE(in);
    const auto rows = read_trajectory(in);
    CHECK(rows.size() == 500);
    CHECK(rows.back().logscore == r.final_logscore);
    CHECK(rows.back().simulator_calls == r.simulator_calls);
  }
  std::ifstream scores(dir / "out" / "final_scores.csv");
  std::string line;
  std::size_t lines = 0;
  while (std::getline(scores, line)) ++lines;
  CHECK(lines == 31);
  CHECK(std::filesystem::is_regular_file(dir / "out" / "best_fit.csv"));
  CHECK_NOTHROW(read_well_logs(dir / "out" / "best_fit.csv"));
}

TEST_CASE("reruns and different pool sizes give byte-identical outputs") {
  TempDir dir;
  write_dataset(dir);
  auto config = lobe_config(dir, R"("method": "pgibbs", "iterations": 5, "particles": 6,
                                    "runs": 5, "output_dir": "a")");
  run_experiment(config);
  config.output_dir = dir / "b";
  run_experiment(config);
  config.output_dir = dir / "c";
  config.parallel_chains = 3;
  run_experiment(config);
  CHECK(testing::same_tree(dir / "a", dir / "b"));
  CHECK(testing::same_tree(dir / "a", dir / "c"));
}

TEST_CASE("adding runs does not perturb earlier runs") {
  TempDir dir;
  write_dataset(dir);
  auto config = lobe_config(dir, R"("method": "mh", "iterations": 50, "runs": 3)");
  const auto few = run_experiment(config);
  config.runs = 6;
  const auto more = run_experiment(config);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(few.runs[k].final_logscore == more.runs[k].final_logscore);
    CHECK(few.runs[k].final_params == more.runs[k].final_params);
  }
}

TEST_CASE("output files round-trip through their readers") {
  TempDir dir;
  write_dataset(dir);
  const auto config = lobe_config(dir, R"("method": "mh", "iterations": 40, "runs": 2,
                                          "output_dir": "out")");
  const auto summary = run_experiment(config);

  std::ifstream traj(dir / "out" / "trajectories" / "run_001.csv");
  const auto rows = read_trajectory(traj);
  REQUIRE(rows.size() == summary.runs[1].trajectory.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& a = rows[i];
    const auto& b = summary.runs[1].trajectory[i];
    CHECK(a.logscore == b.logscore);
    CHECK(a.accepted == b.accepted);
    CHECK(std::isnan(a.ess));
    CHECK(a.simulator_calls == b.simulator_calls);
  }

  std::ifstream params(dir / "out" / "params" / "run_000.csv");
  CHECK(read_params(params) == summary.runs[0].final_params);

  const auto back = read_summary_jsonl(dir / "out" / "summary.jsonl");
  CHECK(back.label == "mh");
  CHECK(back.method == MethodKind::mh);
  CHECK(back.gamma == 1.0);
  REQUIRE(back.runs.size() == 2);
  for (std::size_t k = 0; k < 2; ++k) {
    CHECK(back.runs[k].final_logscore == summary.runs[k].final_logscore);
    CHECK(back.runs[k].acceptance_rate == summary.runs[k].acceptance_rate);
    CHECK(back.runs[k].simulator_calls == summary.runs[k].simulator_calls);
    CHECK(back.runs[k].seed == summary.runs[k].seed);
  }
}

TEST_CASE("non-finite values survive the summary file") {
  auto s = summary_of("x", MethodKind::particle_gibbs, {-INFINITY, -2.5});
  std::stringstream io;
  write_summary_jsonl(io, s);
  const auto back = read_summary_jsonl(io);
  CHECK(back.runs[0].final_logscore == -INFINITY);
  CHECK(back.runs[1].final_logscore == -2.5);
  std::stringstream empty;
  CHECK_THROWS_AS(read_summary_jsonl(empty), ConfigError);
}

TEST_CASE("malformed trajectory files are rejected") {
  std::stringstream bad_header("iter,logscore\n");
  CHECK_THROWS_AS(read_trajectory(bad_header), ConfigError);
  std::stringstream bad_row("iteration,logscore,accepted,ess,simulator_calls\n1,-1,2,nan,3\n");
  CHECK_THROWS_AS(read_trajectory(bad_row), ConfigError);
  std::stringstream skipped("iteration,logscore,accepted,ess,simulator_calls\n2,-1,1,nan,3\n");
  CHECK_THROWS_AS(read_trajectory(skipped), ConfigError);
}

TEST_CASE("30 identical scores in 10 bins land in one bin") {
  const std::vector<RunSummary> s{summary_of("mh", MethodKind::mh, std::vector<double>(30, -4.0))};
  const auto h = emit_histogram_data(s, 10);
  REQUIRE(h.size() == 10);
  std::size_t nonzero = 0;
  for (const auto& bin : h) {
    if (bin.count > 0) {
      ++nonzero;
      CHECK(bin.count == 30);
      CHECK(bin.low <= -4.0);
      CHECK(-4.0 < bin.high);
    }
  }
  CHECK(nonzero == 1);
}

TEST_CASE("scores -1, -2, -3 in 3 bins give counts 1, 1, 1") {
  const std::vector<RunSummary> s{summary_of("mh", MethodKind::mh, {-1.0, -2.0, -3.0})};
  const auto h = emit_histogram_data(s, 3);
  REQUIRE(h.size() == 3);
  CHECK(h.front().low == -3.0);
  CHECK(h.back().high == -1.0);
  for (const auto& bin : h) CHECK(bin.count == 1);
}

TEST_CASE("histogram bins are low-inclusive, high-exclusive, last bin closed") {
  const std::vector<RunSummary> s{summary_of("mh", MethodKind::mh, {0.0, 1.0, 2.0, 2.0, 4.0})};
  const auto h = emit_histogram_data(s, 4);
  REQUIRE(h.size() == 4);
  CHECK(h[0].count == 1);
  CHECK(h[1].count == 1);
  CHECK(h[2].count == 2);
  CHECK(h[3].count == 1);
  std::ostringstream csv;
  write_histogram(csv, h);
  CHECK(csv.str() == "bin_low,bin_high,count\n0,1,1\n1,2,1\n2,3,2\n3,4,1\n");
}

TEST_CASE("histogram preconditions") {
  CHECK_THROWS_AS(emit_histogram_data({}, 10), ConfigError);
  const std::vector<RunSummary> s{summary_of("mh", MethodKind::mh, {-1.0})};
  CHECK_THROWS_AS(emit_histogram_data(s, 0), ConfigError);
  const std::vector<RunSummary> bad{summary_of("pg", MethodKind::particle_gibbs, {-INFINITY})};
  CHECK_THROWS_AS(emit_histogram_data(bad, 4), DomainError);
  const auto script = histogram_plot_script("mh.csv");
  CHECK(script.find("\"mh.csv\"") != std::string::npos);
  CHECK(script.find("\"mh.png\"") != std::string::npos);
}

TEST_CASE("quantiles interpolate linearly") {
  CHECK(quantile({3.0, 1.0, 2.0}, 0.5) == 2.0);
  CHECK(quantile({1.0, 2.0, 3.0, 4.0}, 0.5) == 2.5);
  CHECK(quantile({1.0, 2.0, 3.0, 4.0, 5.0}, 0.25) == 2.0);
  CHECK(quantile({7.0}, 0.75) == 7.0);
  CHECK_THROWS_AS(quantile({}, 0.5), ConfigError);
}

TEST_CASE("compare ranks by median and checks seqMH >= PG >= MH") {
  const std::vector<RunSummary> good{summary_of("mh", MethodKind::mh, {-9, -5, -1}),
                                     summary_of("seq", MethodKind::seq_mh, {-3, -2, -2.5}),
                                     summary_of("pg", MethodKind::particle_gibbs, {-4, -3, -3.5})};
  const auto report = compare_summaries(good);
  REQUIRE(report.rows.size() == 3);
  CHECK(report.rows[0].label == "seq");
  CHECK(report.rows[1].label == "pg");
  CHECK(report.rows[2].label == "mh");
  CHECK(report.rows[2].iqr() == 4.0);
  CHECK(report.expected_order_holds == true);
  CHECK(report.widest_iqr == "mh");

  const std::vector<RunSummary> bad{summary_of("mh", MethodKind::mh, {-1}),
                                    summary_of("pg", MethodKind::particle_gibbs, {-2})};
  CHECK(compare_summaries(bad).expected_order_holds == false);

  const std::vector<RunSummary> single{summary_of("mh", MethodKind::mh, {-1, -2})};
  const auto one = compare_summaries(single);
  CHECK(one.rows.size() == 1);
  CHECK_FALSE(one.expected_order_holds.has_value());
}

TEST_CASE("compare_methods runs configs on shared data and rejects mismatches") {
  TempDir dir;
  write_dataset(dir);
  const auto flat = lobe_config(dir, R"("method": "mh", "iterations": 30, "runs": 5,
                                        "gamma": 0)");
  const std::vector<ExperimentConfig> one{flat};
  const auto report = compare_methods(one);
  REQUIRE(report.rows.size() == 1);
  CHECK(report.rows[0].median == 0.0);

  auto other = lobe_config(dir, R"("method": "seq_mh", "inner_sweeps": 2, "runs": 5)");
  const std::vector<ExperimentConfig> mixed_gamma{flat, other};
  CHECK_THROWS_AS(compare_methods(mixed_gamma), ConfigError);

  const auto dataset = make_synthetic_dataset(2, 10, 7);
  write_well_logs(dir / "other.csv", dataset.logs);
  other = lobe_config(dir, R"("method": "seq_mh", "runs": 5, "gamma": 0)");
  other.data_path = dir / "other.csv";
  const std::vector<ExperimentConfig> mixed_data{flat, other};
  CHECK(error_of([&] { check_comparable(mixed_data); }).find("well data") != std::string::npos);
}

TEST_CASE("oracle experiments report TV against enumeration") {
  TempDir dir;
  const auto config = parse_config_text(
      R"({"simulator": "oracle", "method": "mh", "iterations": 20000, "gamma": 1, "runs": 1,
          "base_seed": 3, "oracle_data": [0.1, -0.2, 0.4], "check_oracle": true,
          "output_dir": "out"})",
      dir.path());
  const auto summary = run_experiment(config);
  REQUIRE(summary.oracle.has_value());
  CHECK(summary.oracle->samples == 20000);
  CHECK(summary.oracle->site_tv.size() == 3);
  CHECK(summary.oracle->passed());
  CHECK(summary.oracle->max_site_tv <= summary.oracle->joint_tv + 1e-12);
  CHECK(std::filesystem::is_regular_file(dir / "out" / "oracle_check.json"));
}
