#include <doctest.h>

#include <cmath>
#include <vector>

#include "invertor/error.hpp"
#include "invertor/resample.hpp"

using namespace invertor;

TEST_CASE("a single finite log-weight takes every ancestor") {
  Rng rng(1);
  const std::vector<double> lw{-INFINITY, -INFINITY, 0.0};
  for (auto scheme : {ResamplingScheme::multinomial, ResamplingScheme::systematic}) {
    for (auto index : resample(scheme, lw, 50, rng)) CHECK(index == 2);
  }
}

TEST_CASE("all -inf log-weights are a degeneracy error") {
  Rng rng(1);
  const std::vector<double> lw(4, -INFINITY);
  CHECK_THROWS_AS(multinomial_resample(lw, 3, rng), DegeneracyError);
  CHECK_THROWS_AS(effective_sample_size(lw), DegeneracyError);
  CHECK_THROWS_AS(normalized_weights(lw), DegeneracyError);
}

TEST_CASE("NaN and +inf log-weights are rejected") {
  Rng rng(1);
  CHECK_THROWS_AS(multinomial_resample(std::vector<double>{0.0, NAN}, 2, rng), DomainError);
  CHECK_THROWS_AS(multinomial_resample(std::vector<double>{0.0, INFINITY}, 2, rng), DomainError);
}

TEST_CASE("equal weights give each index within 3 binomial sigma of 1/P") {
  constexpr std::size_t P = 8;
  constexpr std::size_t draws = 40000;
  Rng rng(2024);
  const std::vector<double> lw(P, -3.7);
  std::vector<double> counts(P, 0.0);
  for (auto index : multinomial_resample(lw, draws, rng)) counts[index] += 1.0;
  const double p = 1.0 / P;
  const double sigma = std::sqrt(draws * p * (1 - p));
  for (double c : counts) CHECK(std::abs(c - draws * p) <= 3 * sigma);
}

TEST_CASE("weights 0.75 / 0.25 give index-0 frequency in the 3-sigma band") {
  // 3 * sqrt(0.75 * 0.25 / 10000) = 0.01299, so the band is [0.737, 0.763].
  Rng rng(77);
  const std::vector<double> lw{std::log(0.75), std::log(0.25)};
  const auto drawn = multinomial_resample(lw, 10000, rng);
  double zeros = 0;
  for (auto index : drawn) zeros += index == 0 ? 1 : 0;
  CHECK(zeros / 10000 >= 0.737);
  CHECK(zeros / 10000 <= 0.763);
}

TEST_CASE("systematic resampling keeps counts within one of P * w") {
  Rng rng(3);
  const std::vector<double> lw{std::log(0.5), std::log(0.3), std::log(0.2)};
  const auto drawn = systematic_resample(lw, 10, rng);
  std::vector<int> counts(3, 0);
  for (auto index : drawn) ++counts[index];
  CHECK(std::abs(counts[0] - 5) <= 1);
  CHECK(std::abs(counts[1] - 3) <= 1);
  CHECK(std::abs(counts[2] - 2) <= 1);
}

TEST_CASE("normalization is stable for very negative log-weights") {
  const std::vector<double> lw{-1e6, -1e6 - std::log(3.0)};
  const auto w = normalized_weights(lw);
  CHECK(w[0] == doctest::Approx(0.75));
  CHECK(w[1] == doctest::Approx(0.25));
  CHECK(log_sum_exp(std::vector<double>{-1e6, -1e6}) == doctest::Approx(-1e6 + std::log(2.0)));
}

TEST_CASE("effective sample size") {
  CHECK(effective_sample_size(std::vector<double>(6, -2.0)) == doctest::Approx(6.0));
  CHECK(effective_sample_size(std::vector<double>{-INFINITY, 0.0, -INFINITY}) == 1.0);
  const std::vector<double> two{std::log(0.5), std::log(0.5), -INFINITY, -INFINITY};
  CHECK(effective_sample_size(two) == doctest::Approx(2.0));
}
