#include "invertor/harness.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <string>
#include <thread>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "invertor/csv.hpp"
#include "invertor/error.hpp"
#include "invertor/oracle.hpp"
#include "invertor/well_log.hpp"

namespace invertor {
namespace {

using ordered_json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

template <SequentialSimulator Sim>
using ObserverFactory = std::function<ChainObserver<Sim>(std::size_t run)>;

template <SequentialSimulator Sim>
RunRecord run_one(const InversionProblem<Sim>& problem, const ExperimentConfig& config,
                  std::size_t run, const ChainObserver<Sim>& observe) {
  const auto start = Clock::now();
  RunRecord record;
  record.run = run;
  record.seed = config.base_seed + run;
  Rng rng(record.seed);
  auto result = run_method(problem, config.method, rng, observe);
  record.final_logscore = result.final_trace.total_logscore;
  record.acceptance_rate = result.acceptance_rate();
  record.simulator_calls = result.simulator_calls;
  record.trajectory = std::move(result.diagnostics);
  record.final_params = std::move(result.final_trace.params);
  record.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  spdlog::debug("{} run {} seed {}: final log-score {} in {:.3f}s", config.label, run,
                record.seed, record.final_logscore, record.wall_seconds);
  return record;
}

template <SequentialSimulator Sim>
std::vector<RunRecord> run_chains(const InversionProblem<Sim>& problem,
                                  const ExperimentConfig& config,
                                  const ObserverFactory<Sim>& observer_for) {
  std::vector<RunRecord> records(config.runs);
  std::vector<std::exception_ptr> errors(config.runs);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < config.runs; k = next++) {
      try {
        records[k] = run_one(problem, config, k, observer_for ? observer_for(k) : nullptr);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    const std::size_t workers = std::min(config.parallel_chains, config.runs);
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
  }
  for (const auto& error : errors) {
    if (error) std::rethrow_exception(error);
  }
  return records;
}

std::size_t tuple_count(std::size_t horizon) {
  std::size_t n = 1;
  for (std::size_t t = 0; t < horizon; ++t) n *= 4;
  return n;
}

OracleCheck check_against_enumeration(const OracleSimulator& sim, const OracleData& data,
                                      const KernelConfig& kernel,
                                      const std::vector<std::vector<std::size_t>>& samples) {
  const auto table = oracle_enumerate(sim, data, kernel);
  const std::size_t T = sim.horizon();
  std::vector<std::size_t> pooled;
  for (const auto& s : samples) pooled.insert(pooled.end(), s.begin(), s.end());
  if (pooled.empty()) throw ConfigError("oracle check collected no full-horizon samples");

  OracleCheck check;
  check.samples = pooled.size();
  check.joint_tv = total_variation(empirical_distribution(pooled, tuple_count(T)),
                                   table.probabilities);
  const auto exact = table.site_marginals();
  for (std::size_t site = 0; site < T; ++site) {
    const std::size_t stride = tuple_count(T - 1 - site);
    std::array<double, 4> empirical{};
    for (std::size_t index : pooled) empirical[(index / stride) % 4] += 1.0;
    for (double& p : empirical) p /= static_cast<double>(pooled.size());
    check.site_tv.push_back(total_variation(empirical, exact[site]));
  }
  check.max_site_tv = *std::max_element(check.site_tv.begin(), check.site_tv.end());
  return check;
}

std::string run_file(std::size_t run) {
  char name[32];
  std::snprintf(name, sizeof name, "run_%03zu.csv", run);
  return name;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  return out;
}

ordered_json number_or_text(double value) {
  if (std::isfinite(value)) return value;
  return format_double(value);
}

double number_from(const nlohmann::json& value, std::string_view key) {
  if (value.is_number()) return value.get<double>();
  if (value.is_string()) return parse_double(value.get<std::string>(), key);
  throw ConfigError("summary field '" + std::string(key) + "' is not a number");
}

std::vector<std::string_view> expect_fields(std::string_view line, std::size_t count,
                                            std::string_view what) {
  auto fields = split_csv(line);
  if (fields.size() != count) {
    throw ConfigError(std::string(what) + ": expected " + std::to_string(count) +
                      " fields in '" + std::string(line) + "'");
  }
  return fields;
}

void write_outputs(const ExperimentConfig& config, const RunSummary& summary,
                   const std::function<void(const std::filesystem::path&)>& extra) {
  const auto& dir = config.output_dir;
  std::filesystem::create_directories(dir / "trajectories");
  std::filesystem::create_directories(dir / "params");
  for (const auto& run : summary.runs) {
    auto traj = open_output(dir / "trajectories" / run_file(run.run));
    write_trajectory(traj, run.trajectory);
    auto params = open_output(dir / "params" / run_file(run.run));
    write_params(params, run.final_params);
  }
  auto scores = open_output(dir / "final_scores.csv");
  write_final_scores(scores, summary);
  auto jsonl = open_output(dir / "summary.jsonl");
  write_summary_jsonl(jsonl, summary);
  if (summary.oracle) {
    const auto& check = *summary.oracle;
    ordered_json doc;
    doc["samples"] = check.samples;
    doc["site_tv"] = check.site_tv;
    doc["max_site_tv"] = check.max_site_tv;
    doc["joint_tv"] = check.joint_tv;
    doc["threshold"] = check.threshold;
    doc["passed"] = check.passed();
    auto out = open_output(dir / "oracle_check.json");
    out << doc.dump(2) << '\n';
  }
  if (extra) extra(dir);
}

std::size_t best_run(const RunSummary& summary) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < summary.runs.size(); ++k) {
    if (summary.runs[k].final_logscore > summary.runs[best].final_logscore) best = k;
  }
  return best;
}

}  // namespace

std::vector<double> RunSummary::final_scores() const {
  std::vector<double> out;
  out.reserve(runs.size());
  for (const auto& r : runs) out.push_back(r.final_logscore);
  return out;
}

RunSummary run_experiment(const ExperimentConfig& config) {
  if (config.runs == 0) throw ConfigError("runs must be at least 1");
  if (config.parallel_chains == 0) throw ConfigError("parallel_chains must be at least 1");
  validate(config.method);
  validate(config.kernel);

  const auto start = Clock::now();
  RunSummary summary;
  summary.label = config.label.empty() ? std::string(to_string(config.method.kind)) : config.label;
  summary.method = config.method.kind;
  summary.simulator = config.simulator;
  summary.gamma = config.kernel.gamma;

  if (config.simulator == SimulatorKind::lobe) {
    const auto logs = read_well_logs(config.data_path);
    const auto sim = LobeSimulator::for_logs(logs, config.horizon, config.lobe);
    const InversionProblem<LobeSimulator> problem(sim, logs, config.kernel);
    summary.runs = run_chains<LobeSimulator>(problem, config, nullptr);
    const auto& best = summary.runs[best_run(summary)];
    auto best_fit = [&, params = best.final_params](const std::filesystem::path& dir) {
      CallCounter unused;
      const auto trace = trace_from_params(problem, params, unused);
      WellLogSet fit;
      for (std::size_t l = 0; l < sim.wells().size(); ++l) {
        fit.wells.push_back({sim.wells()[l].id, sim.wells()[l].x, column(*trace.states.back(), l)});
      }
      auto out = open_output(dir / "best_fit.csv");
      write_well_logs(out, fit);
    };
    if (!config.output_dir.empty()) write_outputs(config, summary, best_fit);
  } else {
    if (config.oracle_data.size() != config.horizon) {
      throw ConfigError("oracle horizon does not match the number of observations");
    }
    const OracleSimulator sim(config.horizon);
    const OracleData data{config.oracle_data};
    const InversionProblem<OracleSimulator> problem(sim, data, config.kernel);
    std::vector<std::vector<std::size_t>> samples(config.runs);
    ObserverFactory<OracleSimulator> observer_for;
    if (config.check_oracle) {
      observer_for = [&](std::size_t run) -> ChainObserver<OracleSimulator> {
        return [&samples, run, T = config.horizon](const TraceFor<OracleSimulator>& trace) {
          if (trace.steps() == T) samples[run].push_back(oracle_tuple_index(trace.params));
        };
      };
    }
    summary.runs = run_chains<OracleSimulator>(problem, config, observer_for);
    if (config.check_oracle) {
      summary.oracle = check_against_enumeration(sim, data, config.kernel, samples);
      spdlog::info("{}: oracle site-marginal TV {} (joint {}) over {} samples", summary.label,
                   summary.oracle->max_site_tv, summary.oracle->joint_tv, summary.oracle->samples);
    }
    if (!config.output_dir.empty()) write_outputs(config, summary, nullptr);
  }
  summary.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  spdlog::info("{}: {} runs in {:.2f}s", summary.label, summary.runs.size(), summary.wall_seconds);
  return summary;
}

void write_trajectory(std::ostream& out, std::span<const DiagnosticsRecord> trajectory) {
  out << "iteration,logscore,accepted,ess,simulator_calls\n";
  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    const auto& r = trajectory[i];
    out << i + 1 << ',' << format_double(r.logscore) << ',' << (r.accepted ? 1 : 0) << ','
        << format_double(r.ess) << ',' << r.simulator_calls << '\n';
  }
}

std::vector<DiagnosticsRecord> read_trajectory(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "iteration,logscore,accepted,ess,simulator_calls") {
    throw ConfigError("trajectory: bad header");
  }
  std::vector<DiagnosticsRecord> out;
  while (std::getline(in, line)) {
    const auto f = expect_fields(line, 5, "trajectory");
    if (parse_integer(f[0], "iteration") != static_cast<long long>(out.size() + 1)) {
      throw ConfigError("trajectory: iterations out of order at '" + line + "'");
    }
    const auto accepted = parse_integer(f[2], "accepted");
    if (accepted != 0 && accepted != 1) throw ConfigError("trajectory: accepted must be 0 or 1");
    out.push_back({parse_double(f[1], "logscore"), accepted == 1, parse_double(f[3], "ess"),
                   static_cast<std::uint64_t>(parse_integer(f[4], "simulator_calls"))});
  }
  return out;
}

void write_params(std::ostream& out, std::span<const ParamStep> params) {
  const std::size_t n = params.empty() ? 0 : params.front().values.size();
  out << "step";
  for (std::size_t i = 1; i <= n; ++i) out << ",u" << i;
  out << '\n';
  for (std::size_t t = 0; t < params.size(); ++t) {
    out << t + 1;
    for (double v : params[t].values) out << ',' << format_double(v);
    out << '\n';
  }
}

std::vector<ParamStep> read_params(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || !line.starts_with("step")) {
    throw ConfigError("params: bad header");
  }
  const std::size_t columns = split_csv(line).size();
  std::vector<ParamStep> out;
  while (std::getline(in, line)) {
    const auto f = expect_fields(line, columns, "params");
    if (parse_integer(f[0], "step") != static_cast<long long>(out.size() + 1)) {
      throw ConfigError("params: steps out of order at '" + line + "'");
    }
    ParamStep step;
    for (std::size_t i = 1; i < f.size(); ++i) step.values.push_back(parse_double(f[i], "u"));
    out.push_back(std::move(step));
  }
  return out;
}

void write_final_scores(std::ostream& out, const RunSummary& summary) {
  out << "run,seed,final_logscore,acceptance_rate,simulator_calls\n";
  for (const auto& r : summary.runs) {
    out << r.run << ',' << r.seed << ',' << format_double(r.final_logscore) << ','
        << format_double(r.acceptance_rate) << ',' << r.simulator_calls << '\n';
  }
}

void write_summary_jsonl(std::ostream& out, const RunSummary& summary) {
  for (const auto& r : summary.runs) {
    ordered_json line;
    line["label"] = summary.label;
    line["method"] = std::string(to_string(summary.method));
    line["simulator"] = std::string(to_string(summary.simulator));
    line["gamma"] = number_or_text(summary.gamma);
    line["run"] = r.run;
    line["seed"] = r.seed;
    line["iterations"] = r.trajectory.size();
    line["final_logscore"] = number_or_text(r.final_logscore);
    line["acceptance_rate"] = number_or_text(r.acceptance_rate);
    line["simulator_calls"] = r.simulator_calls;
    out << line.dump() << '\n';
  }
}

RunSummary read_summary_jsonl(std::istream& in) {
  RunSummary summary;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("summary: ") + e.what());
    }
    try {
      if (summary.runs.empty()) {
        summary.label = obj.at("label").get<std::string>();
        summary.method = parse_method_kind(obj.at("method").get<std::string>());
        summary.simulator = parse_simulator_kind(obj.at("simulator").get<std::string>());
        summary.gamma = number_from(obj.at("gamma"), "gamma");
      }
      RunRecord r;
      r.run = obj.at("run").get<std::size_t>();
      r.seed = obj.at("seed").get<std::uint64_t>();
      r.final_logscore = number_from(obj.at("final_logscore"), "final_logscore");
      r.acceptance_rate = number_from(obj.at("acceptance_rate"), "acceptance_rate");
      r.simulator_calls = obj.at("simulator_calls").get<std::uint64_t>();
      summary.runs.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("summary: ") + e.what());
    }
  }
  if (summary.runs.empty()) throw ConfigError("summary has no run records");
  return summary;
}

RunSummary read_summary_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open summary " + path.string());
  return read_summary_jsonl(in);
}

}  // namespace invertor
