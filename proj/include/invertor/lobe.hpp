#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

#include "invertor/contract.hpp"
#include "invertor/likelihood.hpp"
#include "invertor/random.hpp"
#include "invertor/well_log.hpp"

namespace invertor {

// Synthetic lobe-stacking forward model.
//
// The lateral grid is one-dimensional with `grid_size` cells. Each step
// deposits one parabolic lobe whose thickness is reduced where the surface is
// already high (compensational stacking), and records porosity samples at the
// wells on a global height grid of spacing `sample_spacing`.
struct LobeConfig {
  std::size_t grid_size = 64;
  double sample_spacing = 0.05;  // m
  double compensation = 0.5;     // beta
  // Adds |generated column top - real log top| to each well's distance on the
  // final step, so under-filled or over-filled columns are penalized.
  bool terminal_penalty = false;
};

// u_t decoded into physical quantities.
struct LobeParams {
  double center = 0.0;          // cell coordinate x_c in [0, G - 1]
  double half_width = 4.0;      // cells, in [4, 24]
  double amplitude = 0.2;       // m, in [0.2, 2.0]
  double base_porosity = 0.05;  // in [0.05, 0.35]
  double decay = 0.0;           // in [0, 0.5]

  // Raw components (c, w, a, p0, q), each in [0, 1].
  static LobeParams from_raw(const ParamStep& raw, std::size_t grid_size);
};

struct WellLocation {
  int id = 0;
  int x = 0;

  friend bool operator==(const WellLocation&, const WellLocation&) = default;
};

// o_{t,l}: what lobe t left at one well, between heights base and top.
struct EmissionSegment {
  int well_id = 0;
  double base = 0.0;
  double top = 0.0;
  std::vector<WellSample> samples;

  friend bool operator==(const EmissionSegment&, const EmissionSegment&) = default;
};

using LobeEmission = std::vector<EmissionSegment>;

// One lobe's segments, linked to everything deposited before it.
struct LobeDeposit {
  std::shared_ptr<const LobeDeposit> below;
  LobeEmission segments;
};

struct LobeState {
  std::vector<double> surface;                  // H(x), one entry per cell
  std::shared_ptr<const LobeDeposit> deposits;  // newest lobe first; null at s_0
  std::size_t step = 0;

  friend bool operator==(const LobeState& a, const LobeState& b);
};

// The full deposited record at well index `well`, bottom to top.
std::vector<WellSample> column(const LobeState& state, std::size_t well);

// Deterministic lobe deposition (the forward map Psi).
LobeState lobe_simulate(const LobeConfig& config, const std::vector<WellLocation>& wells,
                        const LobeState& state, const LobeParams& params);

// Segments deposited by the step from `before` to `after` (the emission map
// Phi). Throws CoherenceError unless `after` was produced from `before`.
LobeEmission lobe_emit(const LobeState& before, const LobeState& after);

// Norm between a segment's samples and the real log interpolated at the same
// heights. An empty segment scores 0.
double lobe_distance(const EmissionSegment& segment, const WellLog& log, Norm norm = Norm::euclidean);

// L wells spread evenly over the grid, ids 1..L.
std::vector<WellLocation> spread_wells(std::size_t count, std::size_t grid_size);

class LobeSimulator {
 public:
  using State = LobeState;
  using Emission = LobeEmission;
  using Data = WellLogSet;

  static constexpr std::size_t kParamDim = 5;

  LobeSimulator(std::vector<WellLocation> wells, std::size_t horizon, LobeConfig config = {});

  // A simulator whose wells are those of `logs`.
  static LobeSimulator for_logs(const WellLogSet& logs, std::size_t horizon,
                                LobeConfig config = {});

  std::size_t param_dim() const noexcept { return kParamDim; }
  std::size_t horizon() const noexcept { return horizon_; }
  const LobeConfig& config() const noexcept { return config_; }
  const std::vector<WellLocation>& wells() const noexcept { return wells_; }

  LobeState initialize() const;
  double log_prob_init(const LobeState& state) const;
  ParamStep sample_params(Rng& rng) const;
  double log_prob_params(const ParamStep& params) const;
  LobeState simulate(const LobeState& state, const ParamStep& params) const;
  double log_prob_sim(const LobeState& next, const LobeState& state, const ParamStep& params) const;
  LobeEmission emit(const LobeState& state) const;
  double log_prob_emit(const LobeEmission& emission, const LobeState& state) const;
  std::vector<double> well_distances(std::size_t step, const LobeEmission& emission,
                                     const WellLogSet& data, Norm norm) const;
  void check_data(const WellLogSet& data) const;

  // Height of the highest sample at or below `height` on the sample grid.
  double quantized_top(double height) const;

 private:
  std::vector<WellLocation> wells_;
  std::size_t horizon_;
  LobeConfig config_;
};

struct SyntheticDataset {
  WellLogSet logs;
  std::vector<ParamStep> truth;  // held out; for evaluation only
};

// Forward-simulates `lobes` steps from `seed` and concatenates the per-step
// emissions into continuous logs. Draws are repeated (from the same stream)
// until every well received at least one sample.
SyntheticDataset make_synthetic_dataset(std::uint64_t seed, std::size_t lobes, std::size_t wells,
                                        LobeConfig config = {});

}  // namespace invertor
