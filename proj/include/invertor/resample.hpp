#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "invertor/random.hpp"

namespace invertor {

enum class ResamplingScheme { multinomial, systematic };

// log(sum(exp(x))) with max subtraction; -inf when every entry is -inf.
double log_sum_exp(std::span<const double> log_weights);

// Normalized linear weights. Throws DegeneracyError when every log-weight is
// -inf and DomainError on NaN or +inf entries.
std::vector<double> normalized_weights(std::span<const double> log_weights);

// count ancestor indices drawn i.i.d. from the normalized weights.
std::vector<std::size_t> multinomial_resample(std::span<const double> log_weights,
                                              std::size_t count, Rng& rng);

// count ancestor indices from one uniform offset and count evenly spaced points.
std::vector<std::size_t> systematic_resample(std::span<const double> log_weights,
                                             std::size_t count, Rng& rng);

std::vector<std::size_t> resample(ResamplingScheme scheme, std::span<const double> log_weights,
                                  std::size_t count, Rng& rng);

// A single index drawn from the normalized weights.
std::size_t sample_index(std::span<const double> log_weights, Rng& rng);

// (sum w)^2 / sum w^2 over the normalized weights; lies in [1, P].
double effective_sample_size(std::span<const double> log_weights);

}  // namespace invertor
