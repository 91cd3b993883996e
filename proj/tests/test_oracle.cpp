#include <doctest.h>

#include <numeric>

#include "invertor/oracle.hpp"
#include "support/stats.hpp"

using namespace invertor;

TEST_CASE("zero bandwidth gives the uniform 1/64 posterior") {
  const OracleSimulator sim(3);
  const auto table = oracle_enumerate(sim, OracleData{{0.3, -0.1, 2.0}}, KernelConfig{0.0});
  REQUIRE(table.probabilities.size() == 64);
  for (double p : table.probabilities) CHECK(p == doctest::Approx(1.0 / 64).epsilon(1e-12));
}

TEST_CASE("posterior probabilities sum to 1") {
  const OracleSimulator sim(3);
  for (double gamma : {0.5, 2.0, 50.0}) {
    const auto table = oracle_enumerate(sim, OracleData{{0.1, -0.2, 0.4}}, KernelConfig{gamma});
    const double total = std::accumulate(table.probabilities.begin(), table.probabilities.end(), 0.0);
    CHECK(std::abs(total - 1.0) <= 1e-12);
  }
}

TEST_CASE("enumeration agrees with a direct evaluation of the walk posterior") {
  const OracleSimulator sim(3);
  for (const auto& obs : std::vector<std::vector<double>>{{0.1, -0.2, 0.4}, {0.0, 0.0, 0.0},
                                                           {-0.375, 0.25, 0.5}}) {
    for (double gamma : {0.7, 3.0}) {
      const auto table = oracle_enumerate(sim, OracleData{obs}, KernelConfig{gamma});
      const auto direct = testing::brute_force_walk_posterior(obs, gamma);
      REQUIRE(direct.size() == 64);
      for (std::size_t i = 0; i < 64; ++i) {
        CHECK(table.probabilities[i] == doctest::Approx(direct[i]).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("noise-free data from a tuple puts more than 0.99 of the mass on it at gamma 50") {
  const OracleSimulator sim(3);
  for (std::size_t index = 0; index < 64; ++index) {
    const auto theta = oracle_tuple(index, 3);
    CHECK(oracle_tuple_index(theta) == index);
    const auto data = oracle_data_from_tuple(sim, theta);
    const auto table = oracle_enumerate(sim, data, KernelConfig{50.0});
    CHECK(table.probabilities[index] > 0.99);
  }
}

TEST_CASE("site marginals sum the joint table") {
  const OracleSimulator sim(3);
  const auto table = oracle_enumerate(sim, OracleData{{0.1, -0.2, 0.4}}, KernelConfig{2.0});
  const auto marginals = table.site_marginals();
  REQUIRE(marginals.size() == 3);
  for (const auto& m : marginals) CHECK(m[0] + m[1] + m[2] + m[3] == doctest::Approx(1.0));
  double direct = 0.0;
  for (std::size_t index = 0; index < 64; ++index) {
    if (index / 16 == 2) direct += table.probabilities[index];
  }
  CHECK(marginals[0][2] == doctest::Approx(direct));
}

TEST_CASE("enumeration refuses more than a million tuples") {
  CHECK_NOTHROW(oracle_enumerate(OracleSimulator(9), OracleData{std::vector<double>(9, 0.0)},
                                 KernelConfig{1.0}));
  CHECK_THROWS_AS(oracle_enumerate(OracleSimulator(10), OracleData{std::vector<double>(10, 0.0)},
                                   KernelConfig{1.0}),
                  ConfigError);
}

TEST_CASE("total variation and empirical tables") {
  const std::vector<double> p{0.5, 0.5, 0.0};
  const std::vector<double> q{0.25, 0.25, 0.5};
  CHECK(total_variation(p, q) == doctest::Approx(0.5));
  CHECK(total_variation(p, p) == 0.0);
  CHECK_THROWS_AS(total_variation(p, std::vector<double>{1.0}), ConfigError);
  const std::vector<std::size_t> idx{0, 2, 2, 1};
  const auto e = empirical_distribution(idx, 3);
  CHECK(e[2] == 0.5);
  CHECK(e[0] == 0.25);
}

TEST_CASE("grid_index rejects off-grid values") {
  CHECK(OracleSimulator::grid_index(0.625) == 2);
  CHECK_THROWS_AS(OracleSimulator::grid_index(0.5), DomainError);
}
