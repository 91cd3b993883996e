#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

namespace invertor {

struct WellSample {
  double height = 0.0;  // m
  double porosity = 0.0;

  friend bool operator==(const WellSample&, const WellSample&) = default;
};

// One well log: height-ordered porosity samples at lateral grid cell x.
struct WellLog {
  int id = 0;
  int x = 0;
  std::vector<WellSample> samples;

  double top() const noexcept { return samples.empty() ? 0.0 : samples.back().height; }

  friend bool operator==(const WellLog&, const WellLog&) = default;
};

// The real data r: one log per well location g_l.
struct WellLogSet {
  std::vector<WellLog> wells;

  friend bool operator==(const WellLogSet&, const WellLogSet&) = default;
};

// Throws ConfigError unless there is at least one well, ids are unique and
// ascending, heights strictly increase and porosities lie in [0, 1].
void validate(const WellLogSet& logs);

// Porosity at `height`, linearly interpolated between samples and held
// constant beyond the first and last sample. An empty log reads as 0.
double interpolate_porosity(const WellLog& log, double height);

// CSV with header `well_id,x,height_m,porosity`, rows sorted by
// (well_id, height_m), LF line endings.
void write_well_logs(std::ostream& out, const WellLogSet& logs);
void write_well_logs(const std::filesystem::path& path, const WellLogSet& logs);
WellLogSet read_well_logs(std::istream& in);
WellLogSet read_well_logs(const std::filesystem::path& path);

}  // namespace invertor
