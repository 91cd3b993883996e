#include "invertor/well_log.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "invertor/csv.hpp"
#include "invertor/error.hpp"

namespace invertor {
namespace {

constexpr const char* kHeader = "well_id,x,height_m,porosity";

}  // namespace

void validate(const WellLogSet& logs) {
  if (logs.wells.empty()) throw ConfigError("well log set has no wells");
  for (std::size_t w = 0; w < logs.wells.size(); ++w) {
    const auto& log = logs.wells[w];
    if (w > 0 && log.id <= logs.wells[w - 1].id) {
      throw ConfigError("well ids must be unique and ascending (well " + std::to_string(log.id) +
                        ")");
    }
    for (std::size_t i = 0; i < log.samples.size(); ++i) {
      const auto& s = log.samples[i];
      if (!(s.porosity >= 0.0 && s.porosity <= 1.0)) {
        throw ConfigError("well " + std::to_string(log.id) + ": porosity " +
                          format_double(s.porosity) + " outside [0, 1]");
      }
      if (!std::isfinite(s.height)) {
        throw ConfigError("well " + std::to_string(log.id) + ": non-finite height");
      }
      if (i > 0 && !(s.height > log.samples[i - 1].height)) {
        throw ConfigError("well " + std::to_string(log.id) +
                          ": heights must strictly increase at " + format_double(s.height));
      }
    }
  }
}

double interpolate_porosity(const WellLog& log, double height) {
  const auto& s = log.samples;
  if (s.empty()) return 0.0;
  if (height <= s.front().height) return s.front().porosity;
  if (height >= s.back().height) return s.back().porosity;
  const auto upper = std::upper_bound(s.begin(), s.end(), height,
                                      [](double h, const WellSample& x) { return h < x.height; });
  const auto& hi = *upper;
  const auto& lo = *(upper - 1);
  if (lo.height == height) return lo.porosity;
  return lo.porosity + (hi.porosity - lo.porosity) * (height - lo.height) / (hi.height - lo.height);
}

void write_well_logs(std::ostream& out, const WellLogSet& logs) {
  out << kHeader << '\n';
  for (const auto& log : logs.wells) {
    for (const auto& s : log.samples) {
      out << log.id << ',' << log.x << ',' << format_double(s.height) << ','
          << format_double(s.porosity) << '\n';
    }
  }
}

void write_well_logs(const std::filesystem::path& path, const WellLogSet& logs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open " + path.string() + " for writing");
  write_well_logs(out, logs);
}

WellLogSet read_well_logs(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kHeader) {
    throw ConfigError(std::string("well log CSV must start with header '") + kHeader + "'");
  }
  WellLogSet logs;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 4) {
      throw ConfigError("well log row " + std::to_string(row) + ": expected 4 fields");
    }
    const int id = static_cast<int>(parse_integer(fields[0], "well_id"));
    const int x = static_cast<int>(parse_integer(fields[1], "x"));
    const WellSample sample{parse_double(fields[2], "height_m"),
                            parse_double(fields[3], "porosity")};
    if (logs.wells.empty() || logs.wells.back().id != id) {
      if (!logs.wells.empty() && id < logs.wells.back().id) {
        throw ConfigError("well log row " + std::to_string(row) + ": rows not sorted by well_id");
      }
      logs.wells.push_back(WellLog{id, x, {}});
    } else if (logs.wells.back().x != x) {
      throw ConfigError("well log row " + std::to_string(row) + ": well " + std::to_string(id) +
                        " changes location");
    }
    logs.wells.back().samples.push_back(sample);
  }
  validate(logs);
  return logs;
}

WellLogSet read_well_logs(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open well log file " + path.string());
  return read_well_logs(in);
}

}  // namespace invertor
