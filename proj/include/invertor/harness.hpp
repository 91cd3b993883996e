#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "invertor/contract.hpp"
#include "invertor/engines.hpp"
#include "invertor/likelihood.hpp"
#include "invertor/lobe.hpp"
#include "invertor/method.hpp"

namespace invertor {

enum class SimulatorKind { lobe, oracle };

std::string_view to_string(SimulatorKind kind);
SimulatorKind parse_simulator_kind(std::string_view name);

// One experiment: `runs` independent chains of one method on one dataset.
// Paths are absolute once parsed (relative ones resolve against the config
// file's directory).
struct ExperimentConfig {
  SimulatorKind simulator = SimulatorKind::lobe;
  MethodSpec method;
  KernelConfig kernel;
  std::size_t horizon = 0;
  std::size_t runs = 1;
  std::uint64_t base_seed = 0;
  std::filesystem::path data_path;    // lobe: well log CSV
  std::vector<double> oracle_data;    // oracle: observations o_1..o_T
  std::filesystem::path output_dir;   // empty: write nothing
  std::size_t parallel_chains = 1;
  LobeConfig lobe;                    // terminal_penalty defaults to on here
  bool check_oracle = false;
  std::string label;                  // defaults to the method name
};

// Flat JSON object. Throws ConfigError on unknown keys (naming the key),
// missing required keys, wrong types and invalid values.
ExperimentConfig parse_config(const std::filesystem::path& path);
ExperimentConfig parse_config_text(std::string_view json, const std::filesystem::path& base_dir);

// Site-marginal and joint total variation between the pooled full-horizon
// samples of all runs and exact enumeration.
struct OracleCheck {
  std::vector<double> site_tv;
  double max_site_tv = 0.0;
  double joint_tv = 0.0;
  std::size_t samples = 0;
  double threshold = 0.05;
  bool passed() const { return max_site_tv < threshold; }
};

struct RunRecord {
  std::size_t run = 0;
  std::uint64_t seed = 0;
  double final_logscore = 0.0;
  double acceptance_rate = 0.0;
  std::uint64_t simulator_calls = 0;
  double wall_seconds = 0.0;  // logged, never written to output files
  std::vector<DiagnosticsRecord> trajectory;
  std::vector<ParamStep> final_params;
};

struct RunSummary {
  std::string label;
  MethodKind method = MethodKind::mh;
  SimulatorKind simulator = SimulatorKind::lobe;
  double gamma = 1.0;
  std::vector<RunRecord> runs;
  std::optional<OracleCheck> oracle;
  double wall_seconds = 0.0;

  std::vector<double> final_scores() const;
};

// Runs chain k with seed base_seed + k on a pool of parallel_chains workers.
// When output_dir is set, writes (all byte-deterministic):
//   trajectories/run_NNN.csv  iteration,logscore,accepted,ess,simulator_calls
//   params/run_NNN.csv        final parameters, one row per step
//   final_scores.csv          run,seed,final_logscore,acceptance_rate,simulator_calls
//   summary.jsonl             one JSON object per run
//   best_fit.csv              lobe only: well columns of the best final trace
//   oracle_check.json         when check_oracle is set
// The first failing chain's exception (by run index) is rethrown.
RunSummary run_experiment(const ExperimentConfig& config);

// File formats.
void write_trajectory(std::ostream& out, std::span<const DiagnosticsRecord> trajectory);
std::vector<DiagnosticsRecord> read_trajectory(std::istream& in);
void write_params(std::ostream& out, std::span<const ParamStep> params);
std::vector<ParamStep> read_params(std::istream& in);
void write_final_scores(std::ostream& out, const RunSummary& summary);
void write_summary_jsonl(std::ostream& out, const RunSummary& summary);

// Per-run records read back from summary.jsonl (trajectories not included).
RunSummary read_summary_jsonl(std::istream& in);
RunSummary read_summary_jsonl(const std::filesystem::path& path);

struct HistogramBin {
  double low = 0.0;
  double high = 0.0;
  std::size_t count = 0;
};

// Equal-width bins over [min, max] of the final scores. Bins are
// low-inclusive and high-exclusive except the last, which is closed. When all
// scores are equal the range is widened to [v - 0.5, v + 0.5].
// Throws ConfigError when bins < 1 or there are no scores, DomainError on a
// non-finite score.
std::vector<HistogramBin> emit_histogram_data(std::span<const RunSummary> summaries,
                                              std::size_t bins);
void write_histogram(std::ostream& out, std::span<const HistogramBin> histogram);
// matplotlib script that reads `csv_name` from its own directory.
std::string histogram_plot_script(std::string_view csv_name);

struct ComparisonRow {
  std::string label;
  MethodKind method = MethodKind::mh;
  std::size_t runs = 0;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double iqr() const { return q3 - q1; }
};

struct ComparisonReport {
  std::vector<ComparisonRow> rows;  // ranked by median, best first
  // Median ordering seqMH >= PG >= MH over the kinds present; nullopt when
  // fewer than two of the three are present.
  std::optional<bool> expected_order_holds;
  // Label of the row with the largest IQR.
  std::string widest_iqr;
};

// Linear-interpolation sample quantile (p in [0, 1]).
double quantile(std::vector<double> values, double p);

// Throws ConfigError unless every config uses the same simulator, data,
// horizon and kernel.
void check_comparable(std::span<const ExperimentConfig> configs);
ComparisonReport compare_summaries(std::span<const RunSummary> summaries);
ComparisonReport compare_methods(std::span<const ExperimentConfig> configs);
void write_comparison(std::ostream& out, const ComparisonReport& report);

}  // namespace invertor
