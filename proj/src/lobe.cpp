#include "invertor/lobe.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "invertor/error.hpp"

namespace invertor {
namespace {

// Index of the highest grid sample at or below `height`. The tolerance keeps
// heights such as 3 * 0.05 on the sample they were computed from.
long long sample_index(double height, double spacing) {
  return static_cast<long long>(std::floor(height / spacing + 1e-9));
}

EmissionSegment make_segment(const LobeConfig& config, int well_id, double base, double top,
                             const LobeParams& params) {
  EmissionSegment segment{well_id, base, top, {}};
  const double thickness = top - base;
  if (!(thickness > 0.0)) return segment;
  const double dh = config.sample_spacing;
  const long long first = sample_index(base, dh) + 1;
  const long long last = sample_index(top, dh);
  for (long long k = first; k <= last; ++k) {
    const double h = static_cast<double>(k) * dh;
    const double z = std::clamp((h - base) / thickness, 0.0, 1.0);
    segment.samples.push_back({h, params.base_porosity * (1.0 - params.decay * z)});
  }
  return segment;
}

}  // namespace

LobeParams LobeParams::from_raw(const ParamStep& raw, std::size_t grid_size) {
  if (raw.values.size() != LobeSimulator::kParamDim) {
    throw ConfigError("lobe parameters need 5 components");
  }
  const auto& u = raw.values;
  LobeParams p;
  p.center = u[0] * static_cast<double>(grid_size - 1);
  p.half_width = 4.0 + 20.0 * u[1];
  p.amplitude = 0.2 + 1.8 * u[2];
  p.base_porosity = 0.05 + 0.30 * u[3];
  p.decay = 0.5 * u[4];
  return p;
}

bool operator==(const LobeState& a, const LobeState& b) {
  if (a.step != b.step || a.surface != b.surface) return false;
  const LobeDeposit* x = a.deposits.get();
  const LobeDeposit* y = b.deposits.get();
  while (x != y) {
    if (x == nullptr || y == nullptr || x->segments != y->segments) return false;
    x = x->below.get();
    y = y->below.get();
  }
  return true;
}

std::vector<WellSample> column(const LobeState& state, std::size_t well) {
  std::vector<const LobeDeposit*> lobes;
  for (const LobeDeposit* d = state.deposits.get(); d != nullptr; d = d->below.get()) {
    lobes.push_back(d);
  }
  std::vector<WellSample> out;
  for (auto it = lobes.rbegin(); it != lobes.rend(); ++it) {
    const auto& samples = (*it)->segments.at(well).samples;
    out.insert(out.end(), samples.begin(), samples.end());
  }
  return out;
}

LobeState lobe_simulate(const LobeConfig& config, const std::vector<WellLocation>& wells,
                        const LobeState& state, const LobeParams& params) {
  const auto& surface = state.surface;
  const double floor_height = *std::min_element(surface.begin(), surface.end());

  LobeState next;
  next.step = state.step + 1;
  next.surface.resize(surface.size());
  std::vector<double> thickness(surface.size());
  for (std::size_t x = 0; x < surface.size(); ++x) {
    const double r = (static_cast<double>(x) - params.center) / params.half_width;
    const double shape = params.amplitude * (1.0 - r * r);
    const double relief = config.compensation * (surface[x] - floor_height);
    thickness[x] = std::max(0.0, shape - relief);
    next.surface[x] = surface[x] + thickness[x];
  }

  auto deposit = std::make_shared<LobeDeposit>();
  deposit->below = state.deposits;
  deposit->segments.reserve(wells.size());
  for (const auto& well : wells) {
    const auto cell = static_cast<std::size_t>(well.x);
    deposit->segments.push_back(
        make_segment(config, well.id, surface[cell], next.surface[cell], params));
  }
  next.deposits = std::move(deposit);
  return next;
}

LobeEmission lobe_emit(const LobeState& before, const LobeState& after) {
  if (after.deposits == nullptr || after.step != before.step + 1 ||
      after.deposits->below != before.deposits) {
    throw CoherenceError("lobe_emit: state_after is not one step past state_before");
  }
  return after.deposits->segments;
}

double lobe_distance(const EmissionSegment& segment, const WellLog& log, Norm norm) {
  if (segment.samples.empty()) return 0.0;
  double sum_sq = 0.0;
  for (const auto& s : segment.samples) {
    const double diff = s.porosity - interpolate_porosity(log, s.height);
    sum_sq += diff * diff;
  }
  if (norm == Norm::length_normalized) sum_sq /= static_cast<double>(segment.samples.size());
  return std::sqrt(sum_sq);
}

std::vector<WellLocation> spread_wells(std::size_t count, std::size_t grid_size) {
  if (count == 0) throw ConfigError("need at least one well");
  if (count > grid_size) throw ConfigError("more wells than grid cells");
  std::vector<WellLocation> wells;
  for (std::size_t l = 0; l < count; ++l) {
    const auto x = (l + 1) * grid_size / (count + 1);
    wells.push_back({static_cast<int>(l + 1), static_cast<int>(x)});
  }
  return wells;
}

LobeSimulator::LobeSimulator(std::vector<WellLocation> wells, std::size_t horizon,
                             LobeConfig config)
    : wells_(std::move(wells)), horizon_(horizon), config_(config) {
  if (horizon_ == 0) throw ConfigError("lobe horizon must be positive");
  if (config_.grid_size < 2) throw ConfigError("lobe grid needs at least 2 cells");
  if (!(config_.sample_spacing > 0.0)) throw ConfigError("sample spacing must be positive");
  if (wells_.empty()) throw ConfigError("lobe simulator needs at least one well");
  for (const auto& w : wells_) {
    if (w.x < 0 || static_cast<std::size_t>(w.x) >= config_.grid_size) {
      throw ConfigError("well " + std::to_string(w.id) + " at x=" + std::to_string(w.x) +
                        " lies outside the grid");
    }
  }
}

LobeSimulator LobeSimulator::for_logs(const WellLogSet& logs, std::size_t horizon,
                                      LobeConfig config) {
  std::vector<WellLocation> wells;
  for (const auto& log : logs.wells) wells.push_back({log.id, log.x});
  return LobeSimulator(std::move(wells), horizon, config);
}

LobeState LobeSimulator::initialize() const {
  return LobeState{std::vector<double>(config_.grid_size, 0.0), nullptr, 0};
}

double LobeSimulator::log_prob_init(const LobeState& state) const {
  return state == initialize() ? 0.0 : -INFINITY;
}

ParamStep LobeSimulator::sample_params(Rng& rng) const {
  ParamStep u;
  u.values.resize(kParamDim);
  for (auto& v : u.values) v = rng.uniform();
  return u;
}

double LobeSimulator::log_prob_params(const ParamStep& params) const {
  if (params.values.size() != kParamDim) return -INFINITY;
  for (double v : params.values) {
    if (!(v >= 0.0 && v <= 1.0)) return -INFINITY;
  }
  return 0.0;
}

LobeState LobeSimulator::simulate(const LobeState& state, const ParamStep& params) const {
  return lobe_simulate(config_, wells_, state, LobeParams::from_raw(params, config_.grid_size));
}

double LobeSimulator::log_prob_sim(const LobeState& next, const LobeState& state,
                                   const ParamStep& params) const {
  return simulate(state, params) == next ? 0.0 : -INFINITY;
}

LobeEmission LobeSimulator::emit(const LobeState& state) const {
  if (state.deposits == nullptr) {
    LobeEmission empty;
    for (const auto& w : wells_) empty.push_back({w.id, 0.0, 0.0, {}});
    return empty;
  }
  return state.deposits->segments;
}

double LobeSimulator::log_prob_emit(const LobeEmission& emission, const LobeState& state) const {
  return emit(state) == emission ? 0.0 : -INFINITY;
}

double LobeSimulator::quantized_top(double height) const {
  const auto k = sample_index(height, config_.sample_spacing);
  return k <= 0 ? 0.0 : static_cast<double>(k) * config_.sample_spacing;
}

std::vector<double> LobeSimulator::well_distances(std::size_t step, const LobeEmission& emission,
                                                  const WellLogSet& data, Norm norm) const {
  if (emission.size() != data.wells.size()) {
    throw ConfigError("emission has " + std::to_string(emission.size()) + " wells, data has " +
                      std::to_string(data.wells.size()));
  }
  std::vector<double> out(emission.size());
  for (std::size_t l = 0; l < emission.size(); ++l) {
    out[l] = lobe_distance(emission[l], data.wells[l], norm);
    if (config_.terminal_penalty && step == horizon_) {
      out[l] += std::abs(quantized_top(emission[l].top) - data.wells[l].top());
    }
  }
  return out;
}

void LobeSimulator::check_data(const WellLogSet& data) const {
  validate(data);
  if (data.wells.size() != wells_.size()) {
    throw ConfigError("data has " + std::to_string(data.wells.size()) +
                      " wells, simulator has " + std::to_string(wells_.size()));
  }
  for (std::size_t l = 0; l < wells_.size(); ++l) {
    if (data.wells[l].id != wells_[l].id || data.wells[l].x != wells_[l].x) {
      throw ConfigError("data well " + std::to_string(data.wells[l].id) + " at x=" +
                        std::to_string(data.wells[l].x) + " does not match simulator well " +
                        std::to_string(wells_[l].id) + " at x=" + std::to_string(wells_[l].x));
    }
  }
}

SyntheticDataset make_synthetic_dataset(std::uint64_t seed, std::size_t lobes, std::size_t wells,
                                        LobeConfig config) {
  const LobeSimulator sim(spread_wells(wells, config.grid_size), lobes, config);
  // Salted so a chain seeded with the same number does not replay the truth.
  Rng rng(seed ^ 0x6c6f62652d646174ULL);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    SyntheticDataset dataset;
    auto state = sim.initialize();
    for (std::size_t t = 0; t < lobes; ++t) {
      dataset.truth.push_back(sim.sample_params(rng));
      state = sim.simulate(state, dataset.truth.back());
    }
    bool all_filled = true;
    for (std::size_t l = 0; l < sim.wells().size(); ++l) {
      WellLog log{sim.wells()[l].id, sim.wells()[l].x, column(state, l)};
      all_filled = all_filled && !log.samples.empty();
      dataset.logs.wells.push_back(std::move(log));
    }
    if (all_filled) return dataset;
  }
  throw ConfigError("could not generate a dataset with every well filled");
}

}  // namespace invertor
