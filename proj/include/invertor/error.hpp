#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace invertor {

// Bad configuration: mismatched dimensions, invalid config values, data that
// does not fit the simulator.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A value outside the support of a distribution or a function's domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A step or site index outside the trace.
class IndexError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// A trace whose cached suffix has not been recomputed after an edit.
class CoherenceError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Every particle (or weight) carries zero probability.
class DegeneracyError : public std::runtime_error {
 public:
  DegeneracyError(const std::string& what, std::size_t step)
      : std::runtime_error(what), step_(step) {}

  // 1-based step at which the population collapsed; 0 when not step-bound.
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

}  // namespace invertor
