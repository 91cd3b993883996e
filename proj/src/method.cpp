#include "invertor/method.hpp"

#include <string>

#include "invertor/error.hpp"

namespace invertor {

MethodSpec MethodSpec::mh(std::size_t iterations) {
  MethodSpec spec;
  spec.kind = MethodKind::mh;
  spec.iterations = iterations;
  return spec;
}

MethodSpec MethodSpec::seq_mh(std::size_t per_step_transitions) {
  MethodSpec spec;
  spec.kind = MethodKind::seq_mh;
  spec.inner_sweeps = per_step_transitions;
  return spec;
}

MethodSpec MethodSpec::particle_gibbs(std::size_t particles, std::size_t sweeps) {
  MethodSpec spec;
  spec.kind = MethodKind::particle_gibbs;
  spec.particles = particles;
  spec.iterations = sweeps;
  return spec;
}

MethodSpec MethodSpec::hybrid(std::size_t particles, std::size_t pg_sweeps,
                              std::size_t mh_transitions, std::size_t cycles) {
  MethodSpec spec;
  spec.kind = MethodKind::hybrid;
  spec.particles = particles;
  spec.inner_sweeps = pg_sweeps;
  spec.mh_per_cycle = mh_transitions;
  spec.cycles = cycles;
  return spec;
}

namespace {

void require_positive(std::size_t value, const char* name) {
  if (value == 0) throw ConfigError(std::string(name) + " must be >= 1");
}

}  // namespace

void validate(const MethodSpec& spec) {
  switch (spec.kind) {
    case MethodKind::mh:
      require_positive(spec.iterations, "iterations");
      break;
    case MethodKind::seq_mh:
      require_positive(spec.inner_sweeps, "inner_sweeps");
      break;
    case MethodKind::particle_gibbs:
      require_positive(spec.iterations, "iterations");
      if (spec.particles < 2) throw ConfigError("particles must be >= 2");
      break;
    case MethodKind::hybrid:
      require_positive(spec.inner_sweeps, "inner_sweeps");
      require_positive(spec.mh_per_cycle, "mh_per_cycle");
      require_positive(spec.cycles, "cycles");
      if (spec.particles < 2) throw ConfigError("particles must be >= 2");
      break;
  }
}

std::size_t declared_iterations(const MethodSpec& spec, std::size_t horizon) {
  switch (spec.kind) {
    case MethodKind::mh:
    case MethodKind::particle_gibbs:
      return spec.iterations;
    case MethodKind::seq_mh:
      return spec.inner_sweeps * horizon * (horizon + 1) / 2;
    case MethodKind::hybrid:
      return spec.cycles * (spec.inner_sweeps + spec.mh_per_cycle);
  }
  return 0;
}

std::string_view to_string(MethodKind kind) {
  switch (kind) {
    case MethodKind::mh: return "mh";
    case MethodKind::seq_mh: return "seq_mh";
    case MethodKind::particle_gibbs: return "pgibbs";
    case MethodKind::hybrid: return "hybrid";
  }
  return "?";
}

MethodKind parse_method_kind(std::string_view name) {
  if (name == "mh") return MethodKind::mh;
  if (name == "seq_mh" || name == "seqmh") return MethodKind::seq_mh;
  if (name == "pgibbs" || name == "pg" || name == "particle_gibbs") {
    return MethodKind::particle_gibbs;
  }
  if (name == "hybrid") return MethodKind::hybrid;
  throw ConfigError("unknown method kind '" + std::string(name) + "'");
}

std::string_view to_string(SiteMode mode) {
  return mode == SiteMode::block ? "block" : "scalar";
}

SiteMode parse_site_mode(std::string_view name) {
  if (name == "scalar") return SiteMode::scalar;
  if (name == "block") return SiteMode::block;
  throw ConfigError("unknown site mode '" + std::string(name) + "'");
}

std::string_view to_string(ResamplingScheme scheme) {
  return scheme == ResamplingScheme::systematic ? "systematic" : "multinomial";
}

ResamplingScheme parse_resampling(std::string_view name) {
  if (name == "multinomial") return ResamplingScheme::multinomial;
  if (name == "systematic") return ResamplingScheme::systematic;
  throw ConfigError("unknown resampling scheme '" + std::string(name) + "'");
}

}  // namespace invertor
