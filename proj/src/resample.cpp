#include "invertor/resample.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "invertor/error.hpp"

namespace invertor {
namespace {

void check_log_weights(std::span<const double> log_weights) {
  if (log_weights.empty()) throw DegeneracyError("no weights to normalize", 0);
  for (double w : log_weights) {
    if (std::isnan(w) || w == INFINITY) throw DomainError("log-weight is NaN or +inf");
  }
}

// Cumulative normalized weights and the index of the last positive weight.
std::pair<std::vector<double>, std::size_t> cumulative(std::span<const double> log_weights) {
  auto weights = normalized_weights(log_weights);
  std::size_t last = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] > 0.0) last = i;
  }
  std::partial_sum(weights.begin(), weights.end(), weights.begin());
  return {std::move(weights), last};
}

std::size_t locate(const std::vector<double>& cum, std::size_t last, double x) {
  const auto it = std::upper_bound(cum.begin(), cum.end(), x);
  return std::min(static_cast<std::size_t>(it - cum.begin()), last);
}

}  // namespace

double log_sum_exp(std::span<const double> log_weights) {
  if (log_weights.empty()) return -INFINITY;
  const double top = *std::max_element(log_weights.begin(), log_weights.end());
  if (top == -INFINITY || top == INFINITY || std::isnan(top)) return top;
  double sum = 0.0;
  for (double w : log_weights) sum += std::exp(w - top);
  return top + std::log(sum);
}

std::vector<double> normalized_weights(std::span<const double> log_weights) {
  check_log_weights(log_weights);
  const double top = *std::max_element(log_weights.begin(), log_weights.end());
  if (top == -INFINITY) throw DegeneracyError("every log-weight is -inf", 0);
  std::vector<double> weights(log_weights.size());
  std::transform(log_weights.begin(), log_weights.end(), weights.begin(),
                 [top](double w) { return std::exp(w - top); });
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  for (double& w : weights) w /= total;
  return weights;
}

std::vector<std::size_t> multinomial_resample(std::span<const double> log_weights,
                                              std::size_t count, Rng& rng) {
  const auto [cum, last] = cumulative(log_weights);
  const double total = cum.back();
  std::vector<std::size_t> out(count);
  for (auto& index : out) index = locate(cum, last, rng.uniform() * total);
  return out;
}

std::vector<std::size_t> systematic_resample(std::span<const double> log_weights,
                                             std::size_t count, Rng& rng) {
  const auto [cum, last] = cumulative(log_weights);
  const double total = cum.back();
  const double offset = rng.uniform();
  std::vector<std::size_t> out(count);
  for (std::size_t k = 0; k < count; ++k) {
    out[k] = locate(cum, last, (static_cast<double>(k) + offset) / count * total);
  }
  return out;
}

std::vector<std::size_t> resample(ResamplingScheme scheme, std::span<const double> log_weights,
                                  std::size_t count, Rng& rng) {
  switch (scheme) {
    case ResamplingScheme::systematic:
      return systematic_resample(log_weights, count, rng);
    case ResamplingScheme::multinomial:
    default:
      return multinomial_resample(log_weights, count, rng);
  }
}

std::size_t sample_index(std::span<const double> log_weights, Rng& rng) {
  return multinomial_resample(log_weights, 1, rng).front();
}

double effective_sample_size(std::span<const double> log_weights) {
  const auto weights = normalized_weights(log_weights);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (double w : weights) {
    sum += w;
    sum_sq += w * w;
  }
  return sum * sum / sum_sq;
}

}  // namespace invertor
