#pragma once

#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "invertor/error.hpp"
#include "invertor/likelihood.hpp"
#include "invertor/random.hpp"

namespace invertor {

// One per-step parameter block u_t.
struct ParamStep {
  std::vector<double> values;

  friend bool operator==(const ParamStep&, const ParamStep&) = default;
};

// Counts state-producing simulator procedure calls for one chain.
struct CallCounter {
  std::uint64_t initialize = 0;
  std::uint64_t simulate = 0;

  std::uint64_t state_calls() const noexcept { return initialize + simulate; }
};

// The procedural interface a pluggable sequential simulator satisfies.
//
//   initialize()            s_0                      log_prob_init(s_0)
//   sample_params(rng)      u_t                      log_prob_params(u_t)
//   simulate(s, u)          s_t                      log_prob_sim(s_t, s, u)
//   emit(s)                 o_t                      log_prob_emit(o_t, s)
//   well_distances(t, o, r, norm)   per-location distances feeding k_gamma
//
// simulate and emit must be deterministic and pure. The probability
// counterparts are returned in log space. check_data throws ConfigError when
// the data does not fit the simulator (wrong length, wrong well locations).
template <typename S>
concept SequentialSimulator =
    requires(const S& sim, const typename S::State& state, const typename S::Emission& emission,
             const typename S::Data& data, const ParamStep& params, Rng& rng, std::size_t step,
             Norm norm) {
      { sim.param_dim() } -> std::convertible_to<std::size_t>;
      { sim.horizon() } -> std::convertible_to<std::size_t>;
      { sim.initialize() } -> std::same_as<typename S::State>;
      { sim.log_prob_init(state) } -> std::convertible_to<double>;
      { sim.sample_params(rng) } -> std::same_as<ParamStep>;
      { sim.log_prob_params(params) } -> std::convertible_to<double>;
      { sim.simulate(state, params) } -> std::same_as<typename S::State>;
      { sim.log_prob_sim(state, state, params) } -> std::convertible_to<double>;
      { sim.emit(state) } -> std::same_as<typename S::Emission>;
      { sim.log_prob_emit(emission, state) } -> std::convertible_to<double>;
      { sim.well_distances(step, emission, data, norm) } -> std::same_as<std::vector<double>>;
      sim.check_data(data);
    };

// A simulator bound to the real data and the kernel: everything an inference
// engine needs to score a trace. Holds references; the simulator and data must
// outlive it.
template <SequentialSimulator Sim>
class InversionProblem {
 public:
  using Simulator = Sim;
  using State = typename Sim::State;
  using Emission = typename Sim::Emission;
  using Data = typename Sim::Data;

  InversionProblem(const Sim& sim, const Data& data, KernelConfig kernel)
      : sim_(&sim), data_(&data), kernel_(kernel) {
    validate(kernel_);
    if (sim.param_dim() == 0) throw ConfigError("simulator param_dim must be positive");
    if (sim.horizon() == 0) throw ConfigError("simulator horizon must be positive");
    sim.check_data(data);
  }

  const Sim& simulator() const noexcept { return *sim_; }
  const Data& data() const noexcept { return *data_; }
  const KernelConfig& kernel() const noexcept { return kernel_; }
  std::size_t horizon() const { return sim_->horizon(); }
  std::size_t param_dim() const { return sim_->param_dim(); }

  // log k_gamma(o_t, r_t) aggregated over locations; step is 1-based.
  double step_loglik(std::size_t step, const Emission& emission) const {
    const auto distances = sim_->well_distances(step, emission, *data_, kernel_.norm);
    return step_log_likelihood(distances, kernel_);
  }

  // Comp_Distance_Likelihood: the Bernoulli success probability in [0, 1].
  double distance_likelihood(std::size_t step, const Emission& emission) const {
    return std::exp(step_loglik(step, emission));
  }

 private:
  const Sim* sim_;
  const Data* data_;
  KernelConfig kernel_;
};

}  // namespace invertor
