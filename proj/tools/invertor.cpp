#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "invertor/error.hpp"
#include "invertor/harness.hpp"
#include "invertor/lobe.hpp"
#include "invertor/well_log.hpp"

namespace fs = std::filesystem;
using namespace invertor;

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 1;
constexpr int kDegeneracy = 2;

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("invertor");
  logger->set_pattern("[%l] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* level = std::getenv("INVERTOR_LOG")) {
    const auto parsed = spdlog::level::from_str(level);
    // from_str maps unknown names to off; only honour it when asked for.
    if (parsed != spdlog::level::off || std::string(level) == "off") spdlog::set_level(parsed);
  }
}

void print_run(const RunSummary& s) {
  const auto scores = s.final_scores();
  double calls = 0.0;
  double accept = 0.0;
  for (const auto& r : s.runs) {
    calls += static_cast<double>(r.simulator_calls);
    accept += r.acceptance_rate;
  }
  const double n = static_cast<double>(s.runs.size());
  std::printf("%s: %zu runs, median final log-score %.6g (IQR %.6g), mean acceptance %.4f, "
              "mean simulator calls %.1f, %.2fs\n",
              s.label.c_str(), s.runs.size(), quantile(scores, 0.5),
              quantile(scores, 0.75) - quantile(scores, 0.25), accept / n, calls / n,
              s.wall_seconds);
}

int report_oracle(const RunSummary& s) {
  if (!s.oracle) return kOk;
  const auto& c = *s.oracle;
  std::printf("oracle check: site-marginal TV %.4f (joint %.4f) over %zu samples, threshold %.2f: %s\n",
              c.max_site_tv, c.joint_tv, c.samples, c.threshold, c.passed() ? "PASS" : "FAIL");
  return c.passed() ? kOk : kValidation;
}

int cmd_run(const std::string& path, bool check_oracle) {
  auto config = parse_config(path);
  if (check_oracle) {
    if (config.simulator != SimulatorKind::oracle) {
      throw ConfigError("--check-oracle needs simulator 'oracle'");
    }
    config.check_oracle = true;
  }
  const auto summary = run_experiment(config);
  print_run(summary);
  return report_oracle(summary);
}

int cmd_compare(const std::vector<std::string>& paths, const std::string& out) {
  std::vector<ExperimentConfig> configs;
  for (const auto& p : paths) configs.push_back(parse_config(p));
  const auto report = compare_methods(configs);
  write_comparison(std::cout, report);
  if (!out.empty()) {
    std::ofstream file(out, std::ios::binary);
    if (!file) throw ConfigError("cannot write " + out);
    write_comparison(file, report);
  }
  if (report.expected_order_holds) {
    std::printf("median order seqMH >= PG >= MH: %s\n", *report.expected_order_holds ? "yes" : "no");
  }
  std::printf("largest IQR: %s\n", report.widest_iqr.c_str());
  return kOk;
}

int cmd_make_data(std::uint64_t seed, std::size_t lobes, std::size_t wells, const fs::path& out,
                  std::size_t grid_size) {
  LobeConfig config;
  config.grid_size = grid_size;
  const auto dataset = make_synthetic_dataset(seed, lobes, wells, config);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  write_well_logs(out, dataset.logs);
  auto truth_path = out;
  truth_path.replace_extension(".truth.csv");
  std::ofstream truth(truth_path, std::ios::binary);
  if (!truth) throw ConfigError("cannot write " + truth_path.string());
  write_params(truth, dataset.truth);
  std::printf("wrote %s and %s\n", out.c_str(), truth_path.c_str());
  return kOk;
}

int cmd_hist(const std::vector<std::string>& paths, std::size_t bins, const fs::path& out) {
  std::vector<RunSummary> summaries;
  for (const auto& p : paths) summaries.push_back(read_summary_jsonl(fs::path(p)));
  const auto histogram = emit_histogram_data(summaries, bins);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  {
    std::ofstream csv(out, std::ios::binary);
    if (!csv) throw ConfigError("cannot write " + out.string());
    write_histogram(csv, histogram);
  }
  auto script_path = out;
  script_path.replace_extension(".py");
  std::ofstream script(script_path, std::ios::binary);
  if (!script) throw ConfigError("cannot write " + script_path.string());
  script << histogram_plot_script(out.filename().string());
  std::printf("wrote %s and %s\n", out.c_str(), script_path.c_str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Simulator inversion by MCMC over sequential simulator traces"};
  app.require_subcommand(1);

  std::string config_path;
  bool check_oracle = false;
  auto* run = app.add_subcommand("run", "Run one experiment config");
  run->add_option("config", config_path, "Experiment config (JSON)")->required();
  run->add_flag("--check-oracle", check_oracle, "Assert oracle TV < 0.05 against enumeration");

  std::vector<std::string> compare_paths;
  std::string compare_out;
  auto* compare = app.add_subcommand("compare", "Run several configs and rank the methods");
  compare->add_option("configs", compare_paths, "Experiment configs")->required();
  compare->add_option("--out", compare_out, "Also write the ranking CSV here");

  std::string oracle_path;
  auto* oracle = app.add_subcommand("oracle-check", "Run an oracle config and check it");
  oracle->add_option("config", oracle_path, "Oracle experiment config")->required();

  std::uint64_t seed = 0;
  std::size_t lobes = 10;
  std::size_t wells = 7;
  std::size_t grid_size = LobeConfig{}.grid_size;
  std::string data_out;
  auto* make = app.add_subcommand("make-data", "Write a synthetic well-log dataset");
  make->add_option("--seed", seed, "Random seed")->required();
  make->add_option("--lobes", lobes, "Number of lobes")->required()->check(CLI::PositiveNumber);
  make->add_option("--wells", wells, "Number of wells")->required()->check(CLI::PositiveNumber);
  make->add_option("--grid-size", grid_size, "Lateral grid cells")->check(CLI::PositiveNumber);
  make->add_option("--out", data_out, "Output CSV (truth goes to <stem>.truth.csv)")->required();

  std::vector<std::string> summary_paths;
  std::size_t bins = 10;
  std::string hist_out = "histogram.csv";
  auto* hist = app.add_subcommand("hist", "Histogram final log-scores from summary files");
  hist->add_option("summaries", summary_paths, "summary.jsonl files")->required();
  hist->add_option("--bins", bins, "Number of bins")->required();
  hist->add_option("--out", hist_out, "Output CSV (plot script goes next to it)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (*run) return cmd_run(config_path, check_oracle);
    if (*compare) return cmd_compare(compare_paths, compare_out);
    if (*oracle) return cmd_run(oracle_path, true);
    if (*make) return cmd_make_data(seed, lobes, wells, data_out, grid_size);
    if (*hist) return cmd_hist(summary_paths, bins, hist_out);
  } catch (const DegeneracyError& e) {
    spdlog::error("degenerate sweep at step {}: {}", e.step(), e.what());
    return kDegeneracy;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kValidation;
  }
  return kOk;
}
