#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "invertor/contract.hpp"
#include "invertor/likelihood.hpp"
#include "invertor/random.hpp"

namespace invertor {

// A random walk small enough to enumerate: one parameter per step drawn
// uniformly from a 4-point grid, s_t = s_{t-1} + (u_t - 0.5), o_t = s_t and
// distance |o_t - r_t|.
struct OracleState {
  double level = 0.0;
  std::size_t step = 0;

  friend bool operator==(const OracleState&, const OracleState&) = default;
};

struct OracleData {
  std::vector<double> observations;  // r_1..r_T
};

class OracleSimulator {
 public:
  using State = OracleState;
  using Emission = double;
  using Data = OracleData;

  static constexpr std::array<double, 4> kGrid{0.125, 0.375, 0.625, 0.875};

  explicit OracleSimulator(std::size_t horizon = 3);

  std::size_t param_dim() const noexcept { return 1; }
  std::size_t horizon() const noexcept { return horizon_; }

  OracleState initialize() const { return {}; }
  double log_prob_init(const OracleState& state) const;
  ParamStep sample_params(Rng& rng) const;
  double log_prob_params(const ParamStep& params) const;
  OracleState simulate(const OracleState& state, const ParamStep& params) const;
  double log_prob_sim(const OracleState& next, const OracleState& state,
                      const ParamStep& params) const;
  double emit(const OracleState& state) const { return state.level; }
  double log_prob_emit(double emission, const OracleState& state) const;
  std::vector<double> well_distances(std::size_t step, double emission, const OracleData& data,
                                     Norm norm) const;
  void check_data(const OracleData& data) const;

  // Position of `value` on the grid; throws DomainError off the grid.
  static std::size_t grid_index(double value);

 private:
  std::size_t horizon_;
};

// Exact posterior over every parameter tuple, indexed in base 4 with step 1 as
// the most significant digit.
struct PosteriorTable {
  std::size_t horizon = 0;
  std::vector<double> probabilities;

  // Per-step marginal over the grid: [t - 1][grid index].
  std::vector<std::array<double, 4>> site_marginals() const;
};

// Index of a full parameter tuple in PosteriorTable order.
std::size_t oracle_tuple_index(std::span<const ParamStep> params);

// The parameter blocks of tuple `index` for a given horizon.
std::vector<ParamStep> oracle_tuple(std::size_t index, std::size_t horizon);

// Scores all 4^T tuples through the simulator procedures and normalizes.
// Refuses (ConfigError) when there are more than 10^6 tuples.
PosteriorTable oracle_enumerate(const OracleSimulator& sim, const OracleData& data,
                                const KernelConfig& kernel);

// Observations produced by a given tuple (a noise-free dataset).
OracleData oracle_data_from_tuple(const OracleSimulator& sim, std::span<const ParamStep> params);

// 0.5 * sum |p - q|; throws ConfigError on length mismatch.
double total_variation(std::span<const double> p, std::span<const double> q);

// Empirical tuple frequencies over a collection of sampled tuple indices.
std::vector<double> empirical_distribution(std::span<const std::size_t> tuple_indices,
                                           std::size_t cells);

}  // namespace invertor
