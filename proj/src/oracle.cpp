#include "invertor/oracle.hpp"

#include <cmath>
#include <string>

#include "invertor/error.hpp"
#include "invertor/resample.hpp"
#include "invertor/trace.hpp"

namespace invertor {

OracleSimulator::OracleSimulator(std::size_t horizon) : horizon_(horizon) {
  if (horizon_ == 0) throw ConfigError("oracle horizon must be positive");
}

double OracleSimulator::log_prob_init(const OracleState& state) const {
  return state == initialize() ? 0.0 : -INFINITY;
}

ParamStep OracleSimulator::sample_params(Rng& rng) const {
  return ParamStep{{kGrid[rng.below(kGrid.size())]}};
}

double OracleSimulator::log_prob_params(const ParamStep& params) const {
  if (params.values.size() != 1) return -INFINITY;
  for (double g : kGrid) {
    if (params.values[0] == g) return -std::log(static_cast<double>(kGrid.size()));
  }
  return -INFINITY;
}

OracleState OracleSimulator::simulate(const OracleState& state, const ParamStep& params) const {
  return {state.level + (params.values.at(0) - 0.5), state.step + 1};
}

double OracleSimulator::log_prob_sim(const OracleState& next, const OracleState& state,
                                     const ParamStep& params) const {
  return simulate(state, params) == next ? 0.0 : -INFINITY;
}

double OracleSimulator::log_prob_emit(double emission, const OracleState& state) const {
  return emission == state.level ? 0.0 : -INFINITY;
}

std::vector<double> OracleSimulator::well_distances(std::size_t step, double emission,
                                                    const OracleData& data, Norm) const {
  if (step < 1 || step > data.observations.size()) {
    throw IndexError("oracle step " + std::to_string(step) + " has no observation");
  }
  return {std::abs(emission - data.observations[step - 1])};
}

void OracleSimulator::check_data(const OracleData& data) const {
  if (data.observations.size() != horizon_) {
    throw ConfigError("oracle data has " + std::to_string(data.observations.size()) +
                      " observations, horizon is " + std::to_string(horizon_));
  }
  for (double r : data.observations) {
    if (!std::isfinite(r)) throw ConfigError("oracle observations must be finite");
  }
}

std::size_t OracleSimulator::grid_index(double value) {
  for (std::size_t i = 0; i < kGrid.size(); ++i) {
    if (kGrid[i] == value) return i;
  }
  throw DomainError("value " + std::to_string(value) + " is not an oracle grid point");
}

std::vector<std::array<double, 4>> PosteriorTable::site_marginals() const {
  std::vector<std::array<double, 4>> out(horizon, std::array<double, 4>{});
  for (std::size_t index = 0; index < probabilities.size(); ++index) {
    std::size_t rest = index;
    for (std::size_t t = horizon; t >= 1; --t) {
      out[t - 1][rest % 4] += probabilities[index];
      rest /= 4;
    }
  }
  return out;
}

std::size_t oracle_tuple_index(std::span<const ParamStep> params) {
  std::size_t index = 0;
  for (const auto& block : params) {
    index = index * 4 + OracleSimulator::grid_index(block.values.at(0));
  }
  return index;
}

std::vector<ParamStep> oracle_tuple(std::size_t index, std::size_t horizon) {
  std::vector<ParamStep> out(horizon);
  for (std::size_t t = horizon; t >= 1; --t) {
    out[t - 1] = ParamStep{{OracleSimulator::kGrid[index % 4]}};
    index /= 4;
  }
  return out;
}

PosteriorTable oracle_enumerate(const OracleSimulator& sim, const OracleData& data,
                                const KernelConfig& kernel) {
  constexpr double kLimit = 1e6;
  if (std::pow(4.0, static_cast<double>(sim.horizon())) > kLimit) {
    throw ConfigError("refusing to enumerate 4^" + std::to_string(sim.horizon()) + " tuples");
  }
  const InversionProblem<OracleSimulator> problem(sim, data, kernel);
  std::size_t cells = 1;
  for (std::size_t t = 0; t < sim.horizon(); ++t) cells *= 4;

  std::vector<double> log_joint(cells);
  CallCounter counter;
  for (std::size_t index = 0; index < cells; ++index) {
    const auto params = oracle_tuple(index, sim.horizon());
    const auto trace = trace_from_params(problem, params, counter);
    double log_prior = sim.log_prob_init(*trace.states[0]);
    for (const auto& block : params) log_prior += sim.log_prob_params(block);
    log_joint[index] = log_prior + trace.total_logscore;
  }
  return PosteriorTable{sim.horizon(), normalized_weights(log_joint)};
}

OracleData oracle_data_from_tuple(const OracleSimulator& sim, std::span<const ParamStep> params) {
  OracleData data;
  auto state = sim.initialize();
  for (const auto& block : params) {
    state = sim.simulate(state, block);
    data.observations.push_back(sim.emit(state));
  }
  return data;
}

double total_variation(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw ConfigError("total variation of different-length tables");
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) sum += std::abs(p[i] - q[i]);
  return 0.5 * sum;
}

std::vector<double> empirical_distribution(std::span<const std::size_t> tuple_indices,
                                           std::size_t cells) {
  std::vector<double> out(cells, 0.0);
  if (tuple_indices.empty()) return out;
  for (auto index : tuple_indices) out.at(index) += 1.0;
  for (auto& v : out) v /= static_cast<double>(tuple_indices.size());
  return out;
}

}  // namespace invertor
