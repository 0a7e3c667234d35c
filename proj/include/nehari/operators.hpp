#pragma once

// Principal parts of the three energy families:
//   quasilinear  (1/p) int A(|grad u|^p),  A' = a
//   Kirchhoff    (1/2) Mhat(||u||^2),      Mhat' = M
//   anisotropic  sum_i (1/p_i) int |d_i u|^p_i

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "nehari/errors.hpp"

namespace nehari {

/// Primitive A(t) = int_0^t a of a user-supplied coefficient. Cumulative
/// values are cached on a log grid of knots; the remainder from the nearest
/// knot is integrated on demand, both to relative tolerance 1e-10.
class TabulatedPrimitive {
 public:
  explicit TabulatedPrimitive(std::function<double(double)> a) : a_(std::move(a)) {
    for (int k = -kDecades * kPerDecade; k <= kDecades * kPerDecade; ++k) {
      knots_.push_back(std::pow(10.0, static_cast<double>(k) / kPerDecade));
    }
    cumulative_.resize(knots_.size());
    boost::math::quadrature::tanh_sinh<double> head;
    cumulative_[0] = head.integrate(a_, 0.0, knots_[0], kTolerance);
    for (std::size_t k = 1; k < knots_.size(); ++k) {
      cumulative_[k] = cumulative_[k - 1] + segment(knots_[k - 1], knots_[k]);
    }
  }

  double a(double t) const { return a_(t); }

  double operator()(double t) const {
    if (!(t > 0.0)) return 0.0;
    if (t < knots_.front()) {
      // a ~ c t^beta near 0: A(t) = t a(t) / (beta + 1)
      const double beta = std::log(a_(t) / a_(0.5 * t)) / std::log(2.0);
      return t * a_(t) / (beta + 1.0);
    }
    const auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
    const std::size_t k = static_cast<std::size_t>(it - knots_.begin()) - 1;
    return cumulative_[k] + segment(knots_[k], t);
  }

 private:
  static constexpr int kDecades = 12;
  static constexpr int kPerDecade = 4;
  static constexpr double kTolerance = 1e-10;

  double segment(double lo, double hi) const {
    if (hi <= lo) return 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(a_, lo, hi, 15, kTolerance);
  }

  std::function<double(double)> a_;
  std::vector<double> knots_;
  std::vector<double> cumulative_;
};

/// -div(a(|grad u|^p) |grad u|^(p-2) grad u) with p >= q > 1.
class QuasilinearOperator {
 public:
  enum class Coefficient { constant_one, p_plus_q, user_table };

  /// a == 1: the p-Laplacian. q only enters the hypothesis checks.
  static QuasilinearOperator constant_one(double p, std::optional<double> q = std::nullopt) {
    return QuasilinearOperator(Coefficient::constant_one, p, q.value_or(p), nullptr, "one");
  }

  /// a(t) = 1 + t^((q-p)/p): the (p,q)-Laplacian.
  static QuasilinearOperator p_plus_q(double p, double q) {
    return QuasilinearOperator(Coefficient::p_plus_q, p, q, nullptr, "p_plus_q");
  }

  static QuasilinearOperator user_table(double p, double q, std::function<double(double)> a,
                                        std::string name = "user_table") {
    auto table = std::make_shared<const TabulatedPrimitive>(std::move(a));
    return QuasilinearOperator(Coefficient::user_table, p, q, std::move(table), std::move(name));
  }

  Coefficient coefficient() const noexcept { return kind_; }
  double p() const noexcept { return p_; }
  double q() const noexcept { return q_; }
  const std::string& name() const noexcept { return name_; }

  double a(double t) const {
    switch (kind_) {
      case Coefficient::constant_one: return 1.0;
      case Coefficient::p_plus_q: return 1.0 + std::pow(t, (q_ - p_) / p_);
      case Coefficient::user_table: return table_->a(t);
    }
    return 0.0;
  }

  double A(double t) const {
    if (!(t > 0.0)) return 0.0;
    switch (kind_) {
      case Coefficient::constant_one: return t;
      case Coefficient::p_plus_q: return t + (p_ / q_) * std::pow(t, q_ / p_);
      case Coefficient::user_table: return (*table_)(t);
    }
    return 0.0;
  }

  /// Best constants in k0 (1 + t^((q-p)/p)) <= a(t) <= k1 (1 + t^((q-p)/p))
  /// over a log grid t in [lo, hi].
  std::pair<double, double> fit_bounds(double lo = 1e-6, double hi = 1e6, int points = 241) const {
    double k0 = std::numeric_limits<double>::infinity();
    double k1 = 0.0;
    const double step = std::log(hi / lo) / (points - 1);
    for (int k = 0; k < points; ++k) {
      const double t = lo * std::exp(step * k);
      const double ratio = a(t) / (1.0 + std::pow(t, (q_ - p_) / p_));
      k0 = std::min(k0, ratio);
      k1 = std::max(k1, ratio);
    }
    return {k0, k1};
  }

 private:
  QuasilinearOperator(Coefficient kind, double p, double q, std::shared_ptr<const TabulatedPrimitive> table,
                      std::string name)
      : kind_(kind), p_(p), q_(q), table_(std::move(table)), name_(std::move(name)) {
    if (!(q_ > 1.0) || !(p_ >= q_) || !std::isfinite(p_)) {
      throw ParameterError("quasilinear exponents need p >= q > 1");
    }
  }

  Coefficient kind_;
  double p_;
  double q_;
  std::shared_ptr<const TabulatedPrimitive> table_;
  std::string name_;
};

/// Kirchhoff coefficient M with primitive Mhat(t) = int_0^t M.
class KirchhoffCoefficient {
 public:
  enum class Kind { affine, logarithmic, power_sum, custom };

  /// M(t) = slope t + intercept.
  static KirchhoffCoefficient affine(double slope, double intercept) {
    if (!(slope >= 0.0) || !(intercept > 0.0)) {
      throw ParameterError("affine M needs slope >= 0 and intercept > 0");
    }
    std::ostringstream os;
    os << "affine(" << slope << "," << intercept << ")";
    return KirchhoffCoefficient(
        Kind::affine, os.str(), intercept, [=](double t) { return slope * t + intercept; },
        [=](double t) { return 0.5 * slope * t * t + intercept * t; });
  }

  /// M(t) = m0 + ln(1 + t).
  static KirchhoffCoefficient logarithmic(double m0) {
    if (!(m0 > 0.0)) throw ParameterError("log M needs m0 > 0");
    std::ostringstream os;
    os << "log(" << m0 << ")";
    return KirchhoffCoefficient(
        Kind::logarithmic, os.str(), m0, [=](double t) { return m0 + std::log1p(t); },
        [=](double t) { return m0 * t + (1.0 + t) * std::log1p(t) - t; });
  }

  /// M(t) = m0 + sum_i b_i t^gamma_i with b_i >= 0, gamma_i in (0, 1].
  static KirchhoffCoefficient power_sum(double m0, std::vector<std::pair<double, double>> terms) {
    if (!(m0 > 0.0)) throw ParameterError("power_sum M needs m0 > 0");
    std::ostringstream os;
    os << "power_sum(" << m0;
    for (const auto& [b, g] : terms) {
      if (!(b >= 0.0) || !(g > 0.0 && g <= 1.0)) {
        throw ParameterError("power_sum M needs b_i >= 0 and gamma_i in (0, 1]");
      }
      os << "," << b << "," << g;
    }
    os << ")";
    return KirchhoffCoefficient(
        Kind::power_sum, os.str(), m0,
        [=](double t) {
          double s = m0;
          for (const auto& [b, g] : terms) s += b * std::pow(t, g);
          return s;
        },
        [=](double t) {
          double s = m0 * t;
          for (const auto& [b, g] : terms) s += b * std::pow(t, g + 1.0) / (g + 1.0);
          return s;
        });
  }

  /// Arbitrary M with its primitive, for auditing coefficients outside the catalogue.
  static KirchhoffCoefficient custom(std::string name, std::function<double(double)> M,
                                     std::function<double(double)> Mhat) {
    const double m0 = M(0.0);
    return KirchhoffCoefficient(Kind::custom, std::move(name), m0, std::move(M), std::move(Mhat));
  }

  Kind kind() const noexcept { return kind_; }
  const std::string& name() const noexcept { return name_; }
  double m0() const noexcept { return m0_; }
  double M(double t) const { return M_(t); }
  double Mhat(double t) const { return Mhat_(t); }

 private:
  KirchhoffCoefficient(Kind kind, std::string name, double m0, std::function<double(double)> M,
                       std::function<double(double)> Mhat)
      : kind_(kind), name_(std::move(name)), m0_(m0), M_(std::move(M)), Mhat_(std::move(Mhat)) {}

  Kind kind_;
  std::string name_;
  double m0_;
  std::function<double(double)> M_;
  std::function<double(double)> Mhat_;
};

/// -M(int |grad u|^2) Delta u.
struct KirchhoffOperator {
  KirchhoffCoefficient M;
};

/// -sum_i d_i(|d_i u|^(p_i - 2) d_i u) with 1 < p_1 <= ... <= p_d.
class AnisotropicOperator {
 public:
  explicit AnisotropicOperator(std::vector<double> exponents) : p_(std::move(exponents)) {
    if (p_.empty()) throw ParameterError("anisotropic operator needs at least one exponent");
    for (double pi : p_) {
      if (!(pi > 1.0) || !std::isfinite(pi)) throw ParameterError("anisotropic exponents must exceed 1");
    }
    if (!std::is_sorted(p_.begin(), p_.end())) {
      throw ParameterError("anisotropic exponents must be sorted ascending");
    }
  }

  const std::vector<double>& exponents() const noexcept { return p_; }
  double max_exponent() const noexcept { return p_.back(); }

  double harmonic_sum() const noexcept {
    return std::accumulate(p_.begin(), p_.end(), 0.0, [](double s, double pi) { return s + 1.0 / pi; });
  }

  /// p* = d / (sum 1/p_i - 1), defined when sum 1/p_i > 1.
  std::optional<double> critical_exponent() const noexcept {
    const double s = harmonic_sum();
    if (!(s > 1.0)) return std::nullopt;
    return static_cast<double>(p_.size()) / (s - 1.0);
  }

 private:
  std::vector<double> p_;
};

}  // namespace nehari
