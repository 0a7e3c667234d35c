#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nehari {

/// Invalid grid, family or solver configuration.
class ConfigurationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Out-of-range numeric parameter (exponent, axis, tolerance).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Mismatched sizes or grids between arguments.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A ray through the zero field has no fiber.
class DegenerateDirectionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The fiber slope never changed sign while the bracket was expanded, i.e. the
/// functional lacks mountain-pass geometry along this direction. Carries the
/// (t, slope) pairs that were evaluated.
class HypothesisViolation : public std::runtime_error {
 public:
  HypothesisViolation(const std::string& what, std::vector<std::pair<double, double>> trace)
      : std::runtime_error(what), trace_(std::move(trace)) {}

  const std::vector<std::pair<double, double>>& trace() const noexcept { return trace_; }

 private:
  std::vector<std::pair<double, double>> trace_;
};

/// The shooting oracle could not bracket the boundary condition.
class OracleFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nehari
