#include "invertor/likelihood.hpp"

#include <cmath>
#include <string>

#include "invertor/error.hpp"

namespace invertor {

void validate(const KernelConfig& config) {
  if (!std::isfinite(config.gamma) || config.gamma < 0.0) {
    throw ConfigError("kernel bandwidth gamma must be finite and >= 0, got " +
                      std::to_string(config.gamma));
  }
}

double log_kernel(double distance, const KernelConfig& config) {
  if (std::isnan(distance) || distance < 0.0) {
    throw DomainError("distance must be nonnegative, got " + std::to_string(distance));
  }
  if (config.gamma == 0.0 || distance == 0.0) return 0.0;
  return -config.gamma * distance;
}

double kernel_eval(double distance, const KernelConfig& config) {
  return std::exp(log_kernel(distance, config));
}

double step_log_likelihood(std::span<const double> distances, const KernelConfig& config) {
  double total = 0.0;
  for (double d : distances) {
    if (std::isnan(d) || d < 0.0) {
      throw DomainError("distance must be nonnegative, got " + std::to_string(d));
    }
    total += d;
  }
  if (config.gamma == 0.0 || total == 0.0) return 0.0;
  return -config.gamma * total;
}

}  // namespace invertor
