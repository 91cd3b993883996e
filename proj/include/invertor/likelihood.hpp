#pragma once

#include <span>

namespace invertor {

// How a generated segment is compared with the real log segment.
enum class Norm {
  euclidean,          // raw-sample Euclidean norm
  length_normalized,  // Euclidean norm divided by sqrt(sample count)
};

struct KernelConfig {
  double gamma = 1.0;  // bandwidth; 0 turns the likelihood off
  Norm norm = Norm::euclidean;
};

// Throws ConfigError unless gamma is finite and nonnegative.
void validate(const KernelConfig& config);

// exp(-gamma * distance). Throws DomainError for negative or NaN distance.
double kernel_eval(double distance, const KernelConfig& config);

// log kernel_eval, computed directly as -gamma * distance. A zero bandwidth
// yields 0 even for an infinite distance.
double log_kernel(double distance, const KernelConfig& config);

// Log-probability of d_t = true given independent per-well distances:
// -gamma * sum(distances).
double step_log_likelihood(std::span<const double> distances, const KernelConfig& config);

}  // namespace invertor
