#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include "invertor/resample.hpp"

namespace invertor {

enum class MethodKind { mh, seq_mh, particle_gibbs, hybrid };

// What a single-site MH transition perturbs: one scalar u_{t,i}, or the
// whole block u_t.
enum class SiteMode { scalar, block };

// An inference strategy and its schedule. Which counts matter depends on kind:
//   mh              iterations transitions
//   seq_mh          inner_sweeps * t transitions after incorporating step t
//   particle_gibbs  iterations sweeps of `particles` particles
//   hybrid          cycles x (inner_sweeps PG sweeps, then mh_per_cycle MH)
struct MethodSpec {
  MethodKind kind = MethodKind::mh;
  std::size_t iterations = 500;
  std::size_t particles = 10;
  std::size_t inner_sweeps = 10;
  std::size_t mh_per_cycle = 50;
  std::size_t cycles = 10;
  SiteMode site_mode = SiteMode::scalar;
  ResamplingScheme resampling = ResamplingScheme::multinomial;

  static MethodSpec mh(std::size_t iterations);
  static MethodSpec seq_mh(std::size_t per_step_transitions);
  static MethodSpec particle_gibbs(std::size_t particles, std::size_t sweeps);
  static MethodSpec hybrid(std::size_t particles, std::size_t pg_sweeps, std::size_t mh_transitions,
                           std::size_t cycles);
};

// Throws ConfigError when a count the kind relies on is zero, or when a
// particle method has fewer than two particles.
void validate(const MethodSpec& spec);

// Number of recorded iterations a run of spec produces over `horizon` steps.
std::size_t declared_iterations(const MethodSpec& spec, std::size_t horizon);

std::string_view to_string(MethodKind kind);
MethodKind parse_method_kind(std::string_view name);
std::string_view to_string(SiteMode mode);
SiteMode parse_site_mode(std::string_view name);
std::string_view to_string(ResamplingScheme scheme);
ResamplingScheme parse_resampling(std::string_view name);

}  // namespace invertor
