#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "invertor/csv.hpp"
#include "invertor/error.hpp"
#include "invertor/harness.hpp"
#include "invertor/well_log.hpp"

namespace invertor {
namespace {

bool same_lobe_config(const LobeConfig& a, const LobeConfig& b) {
  return a.grid_size == b.grid_size && a.sample_spacing == b.sample_spacing &&
         a.compensation == b.compensation && a.terminal_penalty == b.terminal_penalty;
}

}  // namespace

std::vector<HistogramBin> emit_histogram_data(std::span<const RunSummary> summaries,
                                              std::size_t bins) {
  if (bins < 1) throw ConfigError("histogram needs at least one bin");
  std::vector<double> scores;
  for (const auto& s : summaries) {
    for (const auto& r : s.runs) {
      if (!std::isfinite(r.final_logscore)) {
        throw DomainError(s.label + " run " + std::to_string(r.run) + " has a non-finite score");
      }
      scores.push_back(r.final_logscore);
    }
  }
  if (scores.empty()) throw ConfigError("histogram needs at least one summary with runs");

  auto [lo, hi] = std::minmax_element(scores.begin(), scores.end());
  double low = *lo;
  double high = *hi;
  if (low == high) {
    low -= 0.5;
    high += 0.5;
  }
  const double width = (high - low) / static_cast<double>(bins);
  std::vector<HistogramBin> out(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    out[b].low = low + static_cast<double>(b) * width;
    out[b].high = b + 1 == bins ? high : low + static_cast<double>(b + 1) * width;
  }
  for (double v : scores) {
    // Interior edges at or below v; the last bin also takes v == high.
    const auto b = std::upper_bound(out.begin(), out.end() - 1, v,
                                    [](double x, const HistogramBin& bin) { return x < bin.high; }) -
                   out.begin();
    ++out[static_cast<std::size_t>(b)].count;
  }
  return out;
}

void write_histogram(std::ostream& out, std::span<const HistogramBin> histogram) {
  out << "bin_low,bin_high,count\n";
  for (const auto& bin : histogram) {
    out << format_double(bin.low) << ',' << format_double(bin.high) << ',' << bin.count << '\n';
  }
}

std::string histogram_plot_script(std::string_view csv_name) {
  std::string script =
      "import csv\n"
      "import pathlib\n"
      "\n"
      "import matplotlib\n"
      "\n"
      "matplotlib.use(\"Agg\")\n"
      "import matplotlib.pyplot as plt\n"
      "\n"
      "here = pathlib.Path(__file__).resolve().parent\n"
      "with open(here / \"@CSV@\", newline=\"\") as f:\n"
      "    rows = list(csv.DictReader(f))\n"
      "low = [float(r[\"bin_low\"]) for r in rows]\n"
      "high = [float(r[\"bin_high\"]) for r in rows]\n"
      "count = [int(r[\"count\"]) for r in rows]\n"
      "\n"
      "fig, ax = plt.subplots(figsize=(5, 3.5))\n"
      "ax.bar(low, count, width=[h - l for l, h in zip(low, high)], align=\"edge\",\n"
      "       edgecolor=\"black\")\n"
      "ax.set_xlabel(\"final log-score\")\n"
      "ax.set_ylabel(\"runs\")\n"
      "fig.tight_layout()\n"
      "fig.savefig(here / \"@PNG@\", dpi=150)\n";
  const std::string csv(csv_name);
  const std::string png = std::filesystem::path(csv).replace_extension(".png").string();
  script.replace(script.find("@CSV@"), 5, csv);
  script.replace(script.find("@PNG@"), 5, png);
  return script;
}

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw ConfigError("quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("quantile level must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double pos = p * static_cast<double>(values.size() - 1);
  const auto i = static_cast<std::size_t>(pos);
  if (i + 1 >= values.size()) return values.back();
  const double frac = pos - static_cast<double>(i);
  return values[i] + frac * (values[i + 1] - values[i]);
}

void check_comparable(std::span<const ExperimentConfig> configs) {
  if (configs.empty()) throw ConfigError("compare needs at least one config");
  const auto& first = configs.front();
  std::optional<WellLogSet> first_logs;
  if (first.simulator == SimulatorKind::lobe) first_logs = read_well_logs(first.data_path);
  for (std::size_t i = 1; i < configs.size(); ++i) {
    const auto& c = configs[i];
    const std::string which = "config " + std::to_string(i + 1) + " (" + c.label + ")";
    if (c.simulator != first.simulator) throw ConfigError(which + " uses a different simulator");
    if (c.horizon != first.horizon) throw ConfigError(which + " uses a different horizon");
    if (c.kernel.gamma != first.kernel.gamma || c.kernel.norm != first.kernel.norm) {
      throw ConfigError(which + " uses a different kernel");
    }
    if (c.simulator == SimulatorKind::lobe) {
      if (!same_lobe_config(c.lobe, first.lobe)) {
        throw ConfigError(which + " uses different lobe settings");
      }
      if (read_well_logs(c.data_path) != *first_logs) {
        throw ConfigError(which + " uses different well data");
      }
    } else if (c.oracle_data != first.oracle_data) {
      throw ConfigError(which + " uses different oracle data");
    }
  }
}

ComparisonReport compare_summaries(std::span<const RunSummary> summaries) {
  ComparisonReport report;
  for (const auto& s : summaries) {
    const auto scores = s.final_scores();
    report.rows.push_back({s.label, s.method, scores.size(), quantile(scores, 0.5),
                           quantile(scores, 0.25), quantile(scores, 0.75)});
  }
  if (report.rows.empty()) return report;

  const auto widest = std::max_element(
      report.rows.begin(), report.rows.end(),
      [](const ComparisonRow& a, const ComparisonRow& b) { return a.iqr() < b.iqr(); });
  report.widest_iqr = widest->label;

  std::vector<double> chain;
  for (auto kind : {MethodKind::seq_mh, MethodKind::particle_gibbs, MethodKind::mh}) {
    const auto row = std::find_if(report.rows.begin(), report.rows.end(),
                                  [kind](const ComparisonRow& r) { return r.method == kind; });
    if (row != report.rows.end()) chain.push_back(row->median);
  }
  if (chain.size() >= 2) {
    report.expected_order_holds = std::is_sorted(chain.rbegin(), chain.rend());
  }

  std::stable_sort(report.rows.begin(), report.rows.end(),
                   [](const ComparisonRow& a, const ComparisonRow& b) { return a.median > b.median; });
  return report;
}

ComparisonReport compare_methods(std::span<const ExperimentConfig> configs) {
  check_comparable(configs);
  std::vector<RunSummary> summaries;
  for (const auto& c : configs) summaries.push_back(run_experiment(c));
  return compare_summaries(summaries);
}

void write_comparison(std::ostream& out, const ComparisonReport& report) {
  out << "rank,label,method,runs,median,q1,q3,iqr\n";
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const auto& r = report.rows[i];
    out << i + 1 << ',' << r.label << ',' << to_string(r.method) << ',' << r.runs << ','
        << format_double(r.median) << ',' << format_double(r.q1) << ','
        << format_double(r.q3) << ',' << format_double(r.iqr()) << '\n';
  }
}

}  // namespace invertor
