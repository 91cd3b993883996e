#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "invertor/contract.hpp"
#include "invertor/method.hpp"
#include "invertor/resample.hpp"
#include "invertor/trace.hpp"

namespace invertor {

// One recorded iteration of a chain.
struct DiagnosticsRecord {
  double logscore = 0.0;
  bool accepted = false;  // MH: proposal accepted; PG: a non-retained particle selected
  double ess = std::numeric_limits<double>::quiet_NaN();  // PG: smallest per-step ESS
  std::uint64_t simulator_calls = 0;  // cumulative state calls, including initialization
};

template <typename TraceT>
struct ChainResult {
  TraceT final_trace;
  std::vector<DiagnosticsRecord> diagnostics;
  std::uint64_t acceptance_count = 0;
  std::uint64_t simulator_calls = 0;
  std::uint64_t seed = 0;

  std::vector<double> logscore_trajectory() const {
    std::vector<double> out;
    out.reserve(diagnostics.size());
    for (const auto& record : diagnostics) out.push_back(record.logscore);
    return out;
  }

  double acceptance_rate() const {
    return diagnostics.empty() ? 0.0
                               : static_cast<double>(acceptance_count) / diagnostics.size();
  }
};

template <SequentialSimulator Sim>
using ChainResultFor = ChainResult<TraceFor<Sim>>;

// Called with the current trace after every recorded iteration.
template <SequentialSimulator Sim>
using ChainObserver = std::function<void(const TraceFor<Sim>&)>;

// ---------------------------------------------------------------------------
// Single-site Metropolis-Hastings
// ---------------------------------------------------------------------------

template <typename TraceT>
struct Transition {
  TraceT trace;
  bool accepted = false;
  Site site;
};

// One random-scan MH transition over the steps currently in the trace.
//
// The site is uniform over the steps() * n scalar sites (or the steps() blocks
// in block mode) and the proposal is a fresh prior draw, so the acceptance
// ratio reduces to the likelihood ratio of the recomputed suffix.
template <SequentialSimulator Sim>
Transition<TraceFor<Sim>> mh_transition(const InversionProblem<Sim>& problem,
                                        const TraceFor<Sim>& trace, Rng& rng,
                                        CallCounter& counter,
                                        SiteMode mode = SiteMode::scalar) {
  if (!trace.coherent()) throw CoherenceError("MH transition on a stale trace");
  if (trace.steps() == 0) throw IndexError("MH transition on an empty trace");
  const std::size_t n = problem.param_dim();

  Site site;
  TraceFor<Sim> proposal;
  if (mode == SiteMode::scalar) {
    const auto flat = rng.below(trace.steps() * n);
    site = Site{flat / n + 1, flat % n};
    const ParamStep fresh = problem.simulator().sample_params(rng);
    proposal = edit_site(problem, trace, site, fresh.values[site.component]);
  } else {
    site = Site{rng.below(trace.steps()) + 1, 0};
    proposal = edit_block(problem, trace, site.step, problem.simulator().sample_params(rng));
  }
  proposal = recompute_suffix(problem, std::move(proposal), site.step, counter);

  double old_suffix = 0.0;
  double new_suffix = 0.0;
  for (std::size_t t = site.step; t <= trace.steps(); ++t) {
    old_suffix += trace.step_loglik[t - 1];
    new_suffix += proposal.step_loglik[t - 1];
  }
  double log_alpha;
  if (old_suffix == -INFINITY) {
    log_alpha = new_suffix == -INFINITY ? 0.0 : INFINITY;
  } else {
    log_alpha = new_suffix - old_suffix;
  }
  const double alpha = std::exp(std::min(0.0, log_alpha));
  const double u = rng.uniform();
  if (u < alpha) return {std::move(proposal), true, site};
  return {trace, false, site};
}

namespace detail {

template <typename TraceT>
void record(ChainResult<TraceT>& result, const TraceT& trace, bool accepted,
            const CallCounter& counter, double ess,
            const std::function<void(const TraceT&)>& observe) {
  result.diagnostics.push_back({trace.total_logscore, accepted, ess, counter.state_calls()});
  if (accepted) ++result.acceptance_count;
  if (observe) observe(trace);
}

template <typename TraceT>
ChainResult<TraceT> finish(TraceT trace, ChainResult<TraceT> result, const CallCounter& counter,
                           const Rng& rng) {
  result.final_trace = std::move(trace);
  result.simulator_calls = counter.state_calls();
  result.seed = rng.seed();
  return result;
}

}  // namespace detail

// `iterations` MH transitions from a forward-sampled trace.
template <SequentialSimulator Sim>
ChainResultFor<Sim> run_mh(const InversionProblem<Sim>& problem, std::size_t iterations, Rng& rng,
                           SiteMode mode = SiteMode::scalar,
                           const ChainObserver<Sim>& observe = {}) {
  if (iterations == 0) throw ConfigError("iterations must be >= 1");
  CallCounter counter;
  ChainResultFor<Sim> result;
  result.diagnostics.reserve(iterations);
  auto trace = init_trace(problem, rng, counter);
  for (std::size_t k = 0; k < iterations; ++k) {
    auto step = mh_transition(problem, trace, rng, counter, mode);
    trace = std::move(step.trace);
    detail::record(result, trace, step.accepted, counter, NAN, observe);
  }
  return detail::finish(std::move(trace), std::move(result), counter, rng);
}

// Sequential MH: observations are incorporated one step at a time, and after
// step t is added, per_step_transitions * t MH transitions run over the t
// incorporated steps. Total transitions: per_step_transitions * T(T+1)/2.
template <SequentialSimulator Sim>
ChainResultFor<Sim> run_sequential_mh(const InversionProblem<Sim>& problem,
                                      std::size_t per_step_transitions, Rng& rng,
                                      SiteMode mode = SiteMode::scalar,
                                      const ChainObserver<Sim>& observe = {}) {
  if (per_step_transitions == 0) throw ConfigError("per-step transitions must be >= 1");
  CallCounter counter;
  ChainResultFor<Sim> result;
  const std::size_t horizon = problem.horizon();
  result.diagnostics.reserve(per_step_transitions * horizon * (horizon + 1) / 2);
  auto trace = empty_trace(problem, counter);
  for (std::size_t t = 1; t <= horizon; ++t) {
    trace = extend_trace(problem, std::move(trace), rng, counter);
    for (std::size_t k = 0; k < per_step_transitions * t; ++k) {
      auto step = mh_transition(problem, trace, rng, counter, mode);
      trace = std::move(step.trace);
      detail::record(result, trace, step.accepted, counter, NAN, observe);
    }
  }
  return detail::finish(std::move(trace), std::move(result), counter, rng);
}

// ---------------------------------------------------------------------------
// Conditional SMC / particle Gibbs
// ---------------------------------------------------------------------------

// The full particle population of one conditional SMC pass, kept so callers can
// inspect any particle's ancestral line. Particle 0 is the retained trajectory.
template <typename State, typename Emission>
struct ParticleSystem {
  std::shared_ptr<const State> initial;
  // Indexed [t - 1][p] for step t.
  std::vector<std::vector<ParamStep>> params;
  std::vector<std::vector<std::shared_ptr<const State>>> states;
  std::vector<std::vector<std::shared_ptr<const Emission>>> emissions;
  std::vector<std::vector<double>> log_weights;
  // ancestors[t - 1][p]: index at step t - 1 that particle p at step t extends.
  // Step 1 extends the shared initial state, so its row is all zeros.
  std::vector<std::vector<std::size_t>> ancestors;

  std::size_t steps() const noexcept { return params.size(); }
  std::size_t particles() const noexcept { return params.empty() ? 0 : params.front().size(); }

  // The ancestral line ending at particle p of the final step, as a trace.
  Trace<State, Emission> trajectory(std::size_t p) const {
    const std::size_t T = steps();
    Trace<State, Emission> trace;
    trace.params.resize(T);
    trace.states.resize(T + 1);
    trace.emissions.resize(T);
    trace.step_loglik.resize(T);
    trace.states[0] = initial;
    std::size_t index = p;
    for (std::size_t t = T; t >= 1; --t) {
      trace.params[t - 1] = params[t - 1][index];
      trace.states[t] = states[t - 1][index];
      trace.emissions[t - 1] = emissions[t - 1][index];
      trace.step_loglik[t - 1] = log_weights[t - 1][index];
      index = ancestors[t - 1][index];
    }
    trace.total_logscore = detail::sum_logliks(trace.step_loglik);
    return trace;
  }
};

template <SequentialSimulator Sim>
using ParticleSystemFor = ParticleSystem<typename Sim::State, typename Sim::Emission>;

// Runs the particle population of one conditional SMC sweep without the final
// selection. Costs (particles - 1) * steps simulate calls.
//
// Particle 0 follows the retained trajectory with ancestor 0 at every step.
// Particles 1..P-1 resample ancestors from the previous step's weights, then
// extend them with a prior draw. The incremental log-weight at step t is the
// step observation log-likelihood: the prior proposal cancels and the
// deterministic transitions contribute nothing.
template <SequentialSimulator Sim>
ParticleSystemFor<Sim> run_conditional_smc(const InversionProblem<Sim>& problem,
                                           const TraceFor<Sim>& retained, std::size_t particles,
                                           Rng& rng, CallCounter& counter,
                                           ResamplingScheme scheme = ResamplingScheme::multinomial) {
  if (particles < 2) throw ConfigError("conditional SMC needs at least 2 particles");
  if (!retained.coherent()) throw CoherenceError("retained trace is stale");
  if (retained.steps() == 0) throw IndexError("retained trace has no steps");
  const auto& sim = problem.simulator();
  const std::size_t T = retained.steps();

  ParticleSystemFor<Sim> system;
  system.initial = retained.states[0];
  system.params.assign(T, std::vector<ParamStep>(particles));
  system.states.assign(T, std::vector<std::shared_ptr<const typename Sim::State>>(particles));
  system.emissions.assign(T,
                          std::vector<std::shared_ptr<const typename Sim::Emission>>(particles));
  system.log_weights.assign(T, std::vector<double>(particles));
  system.ancestors.assign(T, std::vector<std::size_t>(particles, 0));

  for (std::size_t t = 1; t <= T; ++t) {
    auto& ancestors = system.ancestors[t - 1];
    if (t > 1) {
      const auto drawn = resample(scheme, system.log_weights[t - 2], particles - 1, rng);
      std::copy(drawn.begin(), drawn.end(), ancestors.begin() + 1);
    }
    system.params[t - 1][0] = retained.params[t - 1];
    system.states[t - 1][0] = retained.states[t];
    system.emissions[t - 1][0] = retained.emissions[t - 1];
    system.log_weights[t - 1][0] = retained.step_loglik[t - 1];
    for (std::size_t p = 1; p < particles; ++p) {
      const auto& parent = t == 1 ? system.initial : system.states[t - 2][ancestors[p]];
      ParamStep block = sim.sample_params(rng);
      auto state = std::make_shared<const typename Sim::State>(sim.simulate(*parent, block));
      ++counter.simulate;
      auto emission = std::make_shared<const typename Sim::Emission>(sim.emit(*state));
      system.log_weights[t - 1][p] = problem.step_loglik(t, *emission);
      system.params[t - 1][p] = std::move(block);
      system.states[t - 1][p] = std::move(state);
      system.emissions[t - 1][p] = std::move(emission);
    }
    const auto& weights = system.log_weights[t - 1];
    if (std::all_of(weights.begin(), weights.end(), [](double w) { return w == -INFINITY; })) {
      throw DegeneracyError("every particle has zero weight at step " + std::to_string(t), t);
    }
  }
  return system;
}

template <typename TraceT>
struct SweepOutcome {
  TraceT trace;
  std::size_t selected = 0;  // final-step particle index; 0 keeps the retained line
  double min_ess = 0.0;
};

// One particle Gibbs kernel application: conditional SMC around `retained`,
// then a trajectory drawn from the final normalized weights.
template <SequentialSimulator Sim>
SweepOutcome<TraceFor<Sim>> csmc_sweep(const InversionProblem<Sim>& problem,
                                       const TraceFor<Sim>& retained, std::size_t particles,
                                       Rng& rng, CallCounter& counter,
                                       ResamplingScheme scheme = ResamplingScheme::multinomial) {
  const auto system = run_conditional_smc(problem, retained, particles, rng, counter, scheme);
  double min_ess = static_cast<double>(particles);
  for (const auto& weights : system.log_weights) {
    min_ess = std::min(min_ess, effective_sample_size(weights));
  }
  const std::size_t selected = sample_index(system.log_weights.back(), rng);
  return {system.trajectory(selected), selected, min_ess};
}

// `sweeps` conditional SMC sweeps from a forward-sampled retained trace.
template <SequentialSimulator Sim>
ChainResultFor<Sim> run_particle_gibbs(const InversionProblem<Sim>& problem,
                                       std::size_t particles, std::size_t sweeps, Rng& rng,
                                       ResamplingScheme scheme = ResamplingScheme::multinomial,
                                       const ChainObserver<Sim>& observe = {}) {
  if (sweeps == 0) throw ConfigError("sweeps must be >= 1");
  if (particles < 2) throw ConfigError("particles must be >= 2");
  CallCounter counter;
  ChainResultFor<Sim> result;
  result.diagnostics.reserve(sweeps);
  auto trace = init_trace(problem, rng, counter);
  for (std::size_t k = 0; k < sweeps; ++k) {
    auto outcome = csmc_sweep(problem, trace, particles, rng, counter, scheme);
    trace = std::move(outcome.trace);
    detail::record(result, trace, outcome.selected != 0, counter, outcome.min_ess, observe);
  }
  return detail::finish(std::move(trace), std::move(result), counter, rng);
}

// `cycles` repetitions of (pg_sweeps conditional SMC sweeps, then
// mh_transitions single-site MH transitions) on one evolving trace. Every
// sweep and every transition is recorded.
template <SequentialSimulator Sim>
ChainResultFor<Sim> run_hybrid(const InversionProblem<Sim>& problem, std::size_t particles,
                               std::size_t pg_sweeps, std::size_t mh_transitions,
                               std::size_t cycles, Rng& rng, SiteMode mode = SiteMode::scalar,
                               ResamplingScheme scheme = ResamplingScheme::multinomial,
                               const ChainObserver<Sim>& observe = {}) {
  if (pg_sweeps == 0 || mh_transitions == 0 || cycles == 0) {
    throw ConfigError("hybrid sweeps, MH transitions and cycles must all be >= 1");
  }
  if (particles < 2) throw ConfigError("particles must be >= 2");
  CallCounter counter;
  ChainResultFor<Sim> result;
  result.diagnostics.reserve(cycles * (pg_sweeps + mh_transitions));
  auto trace = init_trace(problem, rng, counter);
  for (std::size_t c = 0; c < cycles; ++c) {
    for (std::size_t k = 0; k < pg_sweeps; ++k) {
      auto outcome = csmc_sweep(problem, trace, particles, rng, counter, scheme);
      trace = std::move(outcome.trace);
      detail::record(result, trace, outcome.selected != 0, counter, outcome.min_ess, observe);
    }
    for (std::size_t k = 0; k < mh_transitions; ++k) {
      auto step = mh_transition(problem, trace, rng, counter, mode);
      trace = std::move(step.trace);
      detail::record(result, trace, step.accepted, counter, NAN, observe);
    }
  }
  return detail::finish(std::move(trace), std::move(result), counter, rng);
}

// Dispatches on spec.kind.
template <SequentialSimulator Sim>
ChainResultFor<Sim> run_method(const InversionProblem<Sim>& problem, const MethodSpec& spec,
                               Rng& rng, const ChainObserver<Sim>& observe = {}) {
  validate(spec);
  switch (spec.kind) {
    case MethodKind::mh:
      return run_mh(problem, spec.iterations, rng, spec.site_mode, observe);
    case MethodKind::seq_mh:
      return run_sequential_mh(problem, spec.inner_sweeps, rng, spec.site_mode, observe);
    case MethodKind::particle_gibbs:
      return run_particle_gibbs(problem, spec.particles, spec.iterations, rng, spec.resampling,
                                observe);
    case MethodKind::hybrid:
      return run_hybrid(problem, spec.particles, spec.inner_sweeps, spec.mh_per_cycle,
                        spec.cycles, rng, spec.site_mode, spec.resampling, observe);
  }
  throw ConfigError("unknown method kind");
}

}  // namespace invertor
