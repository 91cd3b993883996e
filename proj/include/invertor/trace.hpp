#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstring>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

#include "invertor/contract.hpp"

namespace invertor {

// A full realization of the sequential model.
//
// Steps are 1-based to match the model: params[t - 1] is u_t, states[t] is s_t
// (states[0] is the initial state), emissions[t - 1] is o_t and
// step_loglik[t - 1] is log k_gamma(o_t, r_t). States and emissions are
// immutable and shared between copies, so copying a trace costs O(T) pointer
// copies and never aliases mutable data.
template <typename State, typename Emission>
struct Trace {
  std::vector<ParamStep> params;
  std::vector<std::shared_ptr<const State>> states;
  std::vector<std::shared_ptr<const Emission>> emissions;
  std::vector<double> step_loglik;
  double total_logscore = 0.0;
  // First step whose cached state is out of date; 0 when the trace is coherent.
  std::size_t stale_from = 0;

  std::size_t steps() const noexcept { return params.size(); }
  bool coherent() const noexcept { return stale_from == 0; }
};

template <SequentialSimulator Sim>
using TraceFor = Trace<typename Sim::State, typename Sim::Emission>;

// A scalar parameter site u_{step, component}; step is 1-based.
struct Site {
  std::size_t step = 1;
  std::size_t component = 0;
};

namespace detail {

template <typename Problem, typename T>
void simulate_step(const Problem& problem, T& trace, std::size_t t, CallCounter& counter) {
  const auto& sim = problem.simulator();
  auto state = std::make_shared<const typename Problem::State>(
      sim.simulate(*trace.states[t - 1], trace.params[t - 1]));
  ++counter.simulate;
  auto emission = std::make_shared<const typename Problem::Emission>(sim.emit(*state));
  trace.step_loglik[t - 1] = problem.step_loglik(t, *emission);
  trace.states[t] = std::move(state);
  trace.emissions[t - 1] = std::move(emission);
}

inline double sum_logliks(const std::vector<double>& logliks) {
  return std::accumulate(logliks.begin(), logliks.end(), 0.0);
}

template <typename Problem>
void check_block(const Problem& problem, const ParamStep& block) {
  if (block.values.size() != problem.param_dim()) {
    throw ConfigError("parameter block has " + std::to_string(block.values.size()) +
                      " components, simulator expects " + std::to_string(problem.param_dim()));
  }
}

}  // namespace detail

// A trace holding only s_0. Costs one initialize call.
template <SequentialSimulator Sim>
TraceFor<Sim> empty_trace(const InversionProblem<Sim>& problem, CallCounter& counter) {
  TraceFor<Sim> trace;
  trace.states.push_back(
      std::make_shared<const typename Sim::State>(problem.simulator().initialize()));
  ++counter.initialize;
  return trace;
}

// Appends step steps()+1 with u drawn from the prior. Costs one simulate call.
template <SequentialSimulator Sim>
TraceFor<Sim> extend_trace(const InversionProblem<Sim>& problem, TraceFor<Sim> trace, Rng& rng,
                           CallCounter& counter) {
  if (!trace.coherent()) throw CoherenceError("cannot extend a stale trace");
  if (trace.steps() >= problem.horizon()) {
    throw IndexError("trace already spans the horizon of " + std::to_string(problem.horizon()));
  }
  ParamStep block = problem.simulator().sample_params(rng);
  detail::check_block(problem, block);
  trace.params.push_back(std::move(block));
  trace.states.emplace_back();
  trace.emissions.emplace_back();
  trace.step_loglik.push_back(0.0);
  detail::simulate_step(problem, trace, trace.steps(), counter);
  trace.total_logscore = detail::sum_logliks(trace.step_loglik);
  return trace;
}

// Forward ancestral sample of the whole model: T + 1 state calls.
template <SequentialSimulator Sim>
TraceFor<Sim> init_trace(const InversionProblem<Sim>& problem, Rng& rng, CallCounter& counter) {
  auto trace = empty_trace(problem, counter);
  for (std::size_t t = 1; t <= problem.horizon(); ++t) {
    trace = extend_trace(problem, std::move(trace), rng, counter);
  }
  return trace;
}

// Builds a coherent trace from explicit parameter blocks.
template <SequentialSimulator Sim>
TraceFor<Sim> trace_from_params(const InversionProblem<Sim>& problem,
                                const std::vector<ParamStep>& params, CallCounter& counter) {
  if (params.size() > problem.horizon()) {
    throw ConfigError("got " + std::to_string(params.size()) + " parameter blocks for horizon " +
                      std::to_string(problem.horizon()));
  }
  auto trace = empty_trace(problem, counter);
  for (const auto& block : params) detail::check_block(problem, block);
  trace.params = params;
  trace.states.resize(params.size() + 1);
  trace.emissions.resize(params.size());
  trace.step_loglik.assign(params.size(), 0.0);
  for (std::size_t t = 1; t <= params.size(); ++t) detail::simulate_step(problem, trace, t, counter);
  trace.total_logscore = detail::sum_logliks(trace.step_loglik);
  return trace;
}

// Re-runs the simulator from step t0 to the end of the trace. Steps before t0
// are untouched; costs steps() - t0 + 1 simulate calls.
template <SequentialSimulator Sim>
TraceFor<Sim> recompute_suffix(const InversionProblem<Sim>& problem, TraceFor<Sim> trace,
                               std::size_t t0, CallCounter& counter) {
  if (t0 < 1 || t0 > trace.steps()) {
    throw IndexError("suffix start " + std::to_string(t0) + " outside [1, " +
                     std::to_string(trace.steps()) + "]");
  }
  if (!trace.coherent() && trace.stale_from < t0) {
    throw CoherenceError("trace is stale from step " + std::to_string(trace.stale_from) +
                         ", before suffix start " + std::to_string(t0));
  }
  for (std::size_t t = t0; t <= trace.steps(); ++t) detail::simulate_step(problem, trace, t, counter);
  trace.total_logscore = detail::sum_logliks(trace.step_loglik);
  trace.stale_from = 0;
  return trace;
}

// Replaces u_{site.step, site.component}; the suffix from site.step is left
// stale for the caller to recompute.
template <SequentialSimulator Sim>
TraceFor<Sim> edit_site(const InversionProblem<Sim>& problem, TraceFor<Sim> trace, Site site,
                        double value) {
  if (site.step < 1 || site.step > trace.steps()) {
    throw IndexError("site step " + std::to_string(site.step) + " outside [1, " +
                     std::to_string(trace.steps()) + "]");
  }
  if (site.component >= problem.param_dim()) {
    throw IndexError("site component " + std::to_string(site.component) + " outside [0, " +
                     std::to_string(problem.param_dim()) + ")");
  }
  ParamStep block = trace.params[site.step - 1];
  block.values[site.component] = value;
  if (!(problem.simulator().log_prob_params(block) > -INFINITY)) {
    throw DomainError("value " + std::to_string(value) + " outside the prior support");
  }
  trace.params[site.step - 1] = std::move(block);
  trace.stale_from = trace.coherent() ? site.step : std::min(trace.stale_from, site.step);
  return trace;
}

// Replaces the whole block u_step; leaves the suffix stale.
template <SequentialSimulator Sim>
TraceFor<Sim> edit_block(const InversionProblem<Sim>& problem, TraceFor<Sim> trace,
                         std::size_t step, ParamStep block) {
  if (step < 1 || step > trace.steps()) {
    throw IndexError("block step " + std::to_string(step) + " outside [1, " +
                     std::to_string(trace.steps()) + "]");
  }
  detail::check_block(problem, block);
  if (!(problem.simulator().log_prob_params(block) > -INFINITY)) {
    throw DomainError("parameter block outside the prior support");
  }
  trace.params[step - 1] = std::move(block);
  trace.stale_from = trace.coherent() ? step : std::min(trace.stale_from, step);
  return trace;
}

// Sum of the per-step observation log-likelihoods of a coherent trace.
template <typename State, typename Emission>
double trace_log_score(const Trace<State, Emission>& trace) {
  if (!trace.coherent()) {
    throw CoherenceError("trace is stale from step " + std::to_string(trace.stale_from));
  }
  return detail::sum_logliks(trace.step_loglik);
}

// True when replaying params forward from a fresh s_0 reproduces every cached
// state and emission exactly. Does not touch any call counter.
template <SequentialSimulator Sim>
bool replays_exactly(const InversionProblem<Sim>& problem, const TraceFor<Sim>& trace) {
  const auto& sim = problem.simulator();
  auto state = sim.initialize();
  if (!(state == *trace.states[0])) return false;
  for (std::size_t t = 1; t <= trace.steps(); ++t) {
    state = sim.simulate(state, trace.params[t - 1]);
    if (!(state == *trace.states[t])) return false;
    if (!(sim.emit(state) == *trace.emissions[t - 1])) return false;
  }
  return true;
}

// Value equality of everything a trace holds.
template <typename State, typename Emission>
bool same_trace(const Trace<State, Emission>& a, const Trace<State, Emission>& b) {
  if (a.params != b.params || a.step_loglik != b.step_loglik ||
      a.stale_from != b.stale_from || a.states.size() != b.states.size() ||
      a.emissions.size() != b.emissions.size()) {
    return false;
  }
  if (std::memcmp(&a.total_logscore, &b.total_logscore, sizeof(double)) != 0) return false;
  for (std::size_t i = 0; i < a.states.size(); ++i) {
    if (!(*a.states[i] == *b.states[i])) return false;
  }
  for (std::size_t i = 0; i < a.emissions.size(); ++i) {
    if (!(*a.emissions[i] == *b.emissions[i])) return false;
  }
  return true;
}

}  // namespace invertor
