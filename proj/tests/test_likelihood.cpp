#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "invertor/error.hpp"
#include "invertor/likelihood.hpp"
#include "invertor/random.hpp"

using namespace invertor;

TEST_CASE("kernel_eval at the identity, unit and zero-bandwidth points") {
  CHECK(kernel_eval(0.0, {1.0}) == 1.0);
  CHECK(kernel_eval(0.0, {37.5}) == 1.0);
  CHECK(kernel_eval(1.0, {1.0}) == doctest::Approx(0.367879).epsilon(1e-6));
  CHECK(kernel_eval(7.3, {0.0}) == 1.0);
}

TEST_CASE("kernel_eval is monotone nonincreasing in distance") {
  const KernelConfig config{2.5};
  double previous = 1.0;
  for (int i = 0; i <= 100; ++i) {
    const double k = kernel_eval(0.05 * i, config);
    CHECK(k <= previous);
    CHECK(k >= 0.0);
    previous = k;
  }
}

TEST_CASE("negative or NaN distances are domain errors") {
  CHECK_THROWS_AS(kernel_eval(-0.1, {1.0}), DomainError);
  CHECK_THROWS_AS(kernel_eval(NAN, {1.0}), DomainError);
  const std::vector<double> bad{0.5, -1.0};
  CHECK_THROWS_AS(step_log_likelihood(bad, {1.0}), DomainError);
}

TEST_CASE("kernel config validation") {
  CHECK_NOTHROW(validate(KernelConfig{0.0}));
  CHECK_THROWS_AS(validate(KernelConfig{-1.0}), ConfigError);
  CHECK_THROWS_AS(validate(KernelConfig{INFINITY}), ConfigError);
}

TEST_CASE("step_log_likelihood sums -gamma * d over wells") {
  CHECK(step_log_likelihood(std::vector<double>{0.5, 0.25}, {1.0}) == -0.75);
  CHECK(step_log_likelihood(std::vector<double>(7, 0.0), {1.0}) == 0.0);
  CHECK(step_log_likelihood(std::vector<double>{1.0}, {2.0}) == -2.0);
  CHECK(step_log_likelihood(std::vector<double>{3.0, 9.0}, {0.0}) == 0.0);
  CHECK(step_log_likelihood(std::vector<double>{INFINITY}, {1.0}) == -INFINITY);
}

TEST_CASE("perfect fit never produces a negative zero") {
  CHECK(!std::signbit(step_log_likelihood(std::vector<double>(3, 0.0), {1.0})));
  CHECK(!std::signbit(log_kernel(0.0, {4.0})));
}

TEST_CASE("step_log_likelihood is invariant under well permutation") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> d(7);
    for (auto& x : d) x = 3.0 * rng.uniform();
    const KernelConfig config{0.1 + 5.0 * rng.uniform()};
    const double base = step_log_likelihood(d, config);
    std::reverse(d.begin(), d.end());
    std::rotate(d.begin(), d.begin() + 3, d.end());
    CHECK(step_log_likelihood(d, config) == doctest::Approx(base).epsilon(1e-12));
  }
}

TEST_CASE("log of the kernel equals -gamma d") {
  Rng rng(5);
  for (int trial = 0; trial < 10000; ++trial) {
    const KernelConfig config{10.0 * rng.uniform()};
    const double d = 20.0 * rng.uniform();
    const double expected = -config.gamma * d;
    const double got = std::log(kernel_eval(d, config));
    CHECK(std::abs(got - expected) <= 1e-12 * std::max(1.0, std::abs(expected)));
  }
}
