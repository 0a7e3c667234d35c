#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "nehari/errors.hpp"

namespace nehari {

/// One term c |t|^(alpha-2) t of an odd power nonlinearity.
struct PowerTerm {
  double coefficient;
  double exponent;  // alpha > 1
};

/// f(t) = sum_j c_j |t|^(alpha_j - 2) t,  F(t) = sum_j (c_j / alpha_j) |t|^alpha_j.
///
/// The catalogue constructors (pure_power, sum_of_powers) require c_j >= 0 so
/// that f >= 0 on [0, inf). signed_sum accepts arbitrary signs; it exists to
/// build counterexamples for the hypothesis checks.
class Nonlinearity {
 public:
  enum class Kind { pure_power, sum_of_powers, signed_sum };

  static Nonlinearity pure_power(double alpha, double coefficient = 1.0) {
    if (!(coefficient > 0.0)) throw ParameterError("pure power coefficient must be positive");
    return Nonlinearity(Kind::pure_power, {{coefficient, alpha}});
  }

  static Nonlinearity sum_of_powers(std::vector<PowerTerm> terms) {
    for (const auto& t : terms) {
      if (!(t.coefficient >= 0.0)) throw ParameterError("sum_of_powers coefficients must be nonnegative");
    }
    return Nonlinearity(Kind::sum_of_powers, std::move(terms));
  }

  static Nonlinearity signed_sum(std::vector<PowerTerm> terms) {
    return Nonlinearity(Kind::signed_sum, std::move(terms));
  }

  Kind kind() const noexcept { return kind_; }
  const std::vector<PowerTerm>& terms() const noexcept { return terms_; }

  double f(double t) const noexcept {
    const double a = std::abs(t);
    double s = 0.0;
    for (const auto& term : terms_) s += term.coefficient * std::pow(a, term.exponent - 1.0);
    return t < 0.0 ? -s : s;
  }

  double F(double t) const noexcept {
    const double a = std::abs(t);
    double s = 0.0;
    for (const auto& term : terms_) s += term.coefficient / term.exponent * std::pow(a, term.exponent);
    return s;
  }

  /// Largest exponent; the growth rate of f at infinity is t^(alpha_max - 1).
  double max_exponent() const noexcept {
    double m = terms_.front().exponent;
    for (const auto& t : terms_) m = std::max(m, t.exponent);
    return m;
  }

  double min_exponent() const noexcept {
    double m = terms_.front().exponent;
    for (const auto& t : terms_) m = std::min(m, t.exponent);
    return m;
  }

  std::string describe() const {
    std::ostringstream os;
    for (std::size_t j = 0; j < terms_.size(); ++j) {
      if (j) os << " + ";
      os << terms_[j].coefficient << "|t|^" << (terms_[j].exponent - 2.0) << "t";
    }
    return os.str();
  }

 private:
  Nonlinearity(Kind kind, std::vector<PowerTerm> terms) : kind_(kind), terms_(std::move(terms)) {
    if (terms_.empty()) throw ParameterError("nonlinearity needs at least one term");
    for (const auto& t : terms_) {
      if (!(t.exponent > 1.0) || !std::isfinite(t.exponent)) {
        throw ParameterError("nonlinearity exponents must exceed 1");
      }
      if (!std::isfinite(t.coefficient)) throw ParameterError("nonlinearity coefficients must be finite");
    }
  }

  Kind kind_;
  std::vector<PowerTerm> terms_;
};

}  // namespace nehari
