#pragma once

// Discrete energies Phi = I0 - I on a grid, their Gateaux derivatives, and the
// restriction of an energy to a ray t -> t u.
//
// Quadrature: gradient terms use the cell/edge midpoint rule of grid.hpp; the
// nonlinear terms use cell averages of nodal values, which integrate to
// prod(h) * sum over nodes.

#include <cmath>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "nehari/errors.hpp"
#include "nehari/grid.hpp"
#include "nehari/nonlinearity.hpp"
#include "nehari/operators.hpp"

namespace nehari {

enum class Family { quasilinear, kirchhoff, anisotropic };

inline const char* to_string(Family f) {
  switch (f) {
    case Family::quasilinear: return "quasilinear";
    case Family::kirchhoff: return "kirchhoff";
    case Family::anisotropic: return "anisotropic";
  }
  return "?";
}

/// Phi(u) = I0(u) - I(u) and Phi'(u)u = J0(u) - J(u).
struct Decomposition {
  double I0 = 0.0;
  double I = 0.0;
  double J0 = 0.0;
  double J = 0.0;
};

/// The residual split into the operator part and the source f(u).
struct ResidualParts {
  Field principal;
  Field source;
};

/// gamma(t) = Phi(t u) and gamma'(t) = Phi'(t u) u, evaluated from integrals of
/// u computed once (closed form in t for every family except tabulated a).
class RayProfile {
 public:
  double value(double t) const { return principal(t) - source_primitive(t); }
  double slope(double t) const { return principal_slope(t) - source(t); }

  /// Magnitudes of the two cancelling parts; roundoff scales for value/slope.
  double value_scale(double t) const { return std::abs(principal(t)) + std::abs(source_primitive(t)); }
  double slope_scale(double t) const { return std::abs(principal_slope(t)) + std::abs(source(t)); }

 private:
  friend class Functional;

  double principal(double t) const {
    switch (family_) {
      case Family::quasilinear: {
        if (quasi_->coefficient() == QuasilinearOperator::Coefficient::user_table) {
          const double tp = std::pow(t, p_);
          double s = 0.0;
          for (double sc : cell_power_) s += quasi_->A(tp * sc);
          return s * volume_ / p_;
        }
        double v = std::pow(t, p_) * moment_p_ / p_;
        if (quasi_->coefficient() == QuasilinearOperator::Coefficient::p_plus_q) {
          v += std::pow(t, q_) * moment_q_ / q_;
        }
        return v;
      }
      case Family::kirchhoff: return 0.5 * kirchhoff_->Mhat(t * t * moment_p_);
      case Family::anisotropic: {
        double v = 0.0;
        for (std::size_t i = 0; i < axis_exponent_.size(); ++i) {
          v += std::pow(t, axis_exponent_[i]) * axis_moment_[i] / axis_exponent_[i];
        }
        return v;
      }
    }
    return 0.0;
  }

  double principal_slope(double t) const {
    switch (family_) {
      case Family::quasilinear: {
        if (quasi_->coefficient() == QuasilinearOperator::Coefficient::user_table) {
          const double tp = std::pow(t, p_);
          double s = 0.0;
          for (double sc : cell_power_) {
            if (sc > 0.0) s += quasi_->a(tp * sc) * sc;
          }
          return s * volume_ * std::pow(t, p_ - 1.0);
        }
        double v = std::pow(t, p_ - 1.0) * moment_p_;
        if (quasi_->coefficient() == QuasilinearOperator::Coefficient::p_plus_q) {
          v += std::pow(t, q_ - 1.0) * moment_q_;
        }
        return v;
      }
      case Family::kirchhoff: return kirchhoff_->M(t * t * moment_p_) * t * moment_p_;
      case Family::anisotropic: {
        double v = 0.0;
        for (std::size_t i = 0; i < axis_exponent_.size(); ++i) {
          v += std::pow(t, axis_exponent_[i] - 1.0) * axis_moment_[i];
        }
        return v;
      }
    }
    return 0.0;
  }

  // int F(t u)
  double source_primitive(double t) const {
    double s = 0.0;
    for (std::size_t j = 0; j < terms_.size(); ++j) {
      s += terms_[j].coefficient / terms_[j].exponent * std::pow(t, terms_[j].exponent) * source_moment_[j];
    }
    return s;
  }

  // int f(t u) u
  double source(double t) const {
    double s = 0.0;
    for (std::size_t j = 0; j < terms_.size(); ++j) {
      s += terms_[j].coefficient * std::pow(t, terms_[j].exponent - 1.0) * source_moment_[j];
    }
    return s;
  }

  Family family_ = Family::quasilinear;
  std::shared_ptr<const QuasilinearOperator> quasi_;
  std::shared_ptr<const KirchhoffCoefficient> kirchhoff_;
  double p_ = 2.0;
  double q_ = 2.0;
  double moment_p_ = 0.0;  // int |grad u|^p (Kirchhoff: ||u||^2)
  double moment_q_ = 0.0;
  double volume_ = 0.0;
  std::vector<double> cell_power_;  // |grad u|^p per cell, tabulated a only
  std::vector<double> axis_exponent_;
  std::vector<double> axis_moment_;  // int |d_i u|^p_i
  std::vector<PowerTerm> terms_;
  std::vector<double> source_moment_;  // int |u|^alpha_j
};

class Functional {
 public:
  using Operator = std::variant<QuasilinearOperator, KirchhoffOperator, AnisotropicOperator>;

  /// Regularization added to |grad u|^p inside singular gradient weights.
  static constexpr double kGradientFloor = 1e-30;

  Functional(Grid grid, Operator op, Nonlinearity f) : grid_(grid), op_(std::move(op)), f_(std::move(f)) {
    if (const auto* an = std::get_if<AnisotropicOperator>(&op_)) {
      if (static_cast<int>(an->exponents().size()) != grid_.dim()) {
        throw ConfigurationError("anisotropic exponent vector has " + std::to_string(an->exponents().size()) +
                                 " entries for a " + std::to_string(grid_.dim()) + "D grid");
      }
    }
  }

  const Grid& grid() const noexcept { return grid_; }
  const Operator& op() const noexcept { return op_; }
  const Nonlinearity& nonlinearity() const noexcept { return f_; }

  Family family() const noexcept {
    if (std::holds_alternative<QuasilinearOperator>(op_)) return Family::quasilinear;
    if (std::holds_alternative<KirchhoffOperator>(op_)) return Family::kirchhoff;
    return Family::anisotropic;
  }

  /// Exponent p of the fiber monotonicity conditions (p, 4 or p_d).
  double homogeneity_exponent() const noexcept {
    switch (family()) {
      case Family::quasilinear: return std::get<QuasilinearOperator>(op_).p();
      case Family::kirchhoff: return 4.0;
      case Family::anisotropic: return std::get<AnisotropicOperator>(op_).max_exponent();
    }
    return 0.0;
  }

  /// Exponent r of the small-ball lower bound (p, 2 or p_d).
  double small_ball_exponent() const noexcept {
    switch (family()) {
      case Family::quasilinear: return std::get<QuasilinearOperator>(op_).p();
      case Family::kirchhoff: return 2.0;
      case Family::anisotropic: return std::get<AnisotropicOperator>(op_).max_exponent();
    }
    return 0.0;
  }

  Decomposition decompose(const Field& u) const {
    require_grid(u);
    Decomposition d;
    const double vol = grid_.cell_volume();
    const auto grad = gradient(u);
    switch (family()) {
      case Family::quasilinear: {
        const auto& op = std::get<QuasilinearOperator>(op_);
        const double p = op.p();
        const auto sq = cell_gradient_squared(grad);
        double i0 = 0.0;
        double j0 = 0.0;
        for (double g2 : sq) {
          const double s = std::pow(g2, 0.5 * p);
          i0 += op.A(s);
          j0 += weight(op, g2) * g2;
        }
        d.I0 = i0 * vol / p;
        d.J0 = j0 * vol;
        break;
      }
      case Family::kirchhoff: {
        const auto& M = std::get<KirchhoffOperator>(op_).M;
        const double n2 = dirichlet_energy(grad);
        d.I0 = 0.5 * M.Mhat(n2);
        d.J0 = M.M(n2) * n2;
        break;
      }
      case Family::anisotropic: {
        const auto& pv = std::get<AnisotropicOperator>(op_).exponents();
        for (int i = 0; i < grid_.dim(); ++i) {
          double s = 0.0;
          for (double de : grad.axis[i]) s += std::pow(std::abs(de), pv[i]);
          d.I0 += s * vol / pv[i];
          d.J0 += s * vol;
        }
        break;
      }
    }
    for (double v : u.values()) {
      d.I += f_.F(v);
      d.J += f_.f(v) * v;
    }
    d.I *= vol;
    d.J *= vol;
    return d;
  }

  double energy(const Field& u) const {
    const auto d = decompose(u);
    return d.I0 - d.I;
  }

  /// Phi'(u) v computed from the gradients of u and v.
  double pairing(const Field& u, const Field& v) const {
    require_grid(u);
    require_grid(v);
    const double vol = grid_.cell_volume();
    const auto gu = gradient(u);
    const auto gv = gradient(v);
    double principal = 0.0;
    switch (family()) {
      case Family::quasilinear: {
        const auto& op = std::get<QuasilinearOperator>(op_);
        const auto sq = cell_gradient_squared(gu);
        const auto dot = cell_gradient_dot(gu, gv);
        for (std::size_t c = 0; c < sq.size(); ++c) principal += weight(op, sq[c]) * dot[c];
        principal *= vol;
        break;
      }
      case Family::kirchhoff: {
        const auto& M = std::get<KirchhoffOperator>(op_).M;
        double dot = 0.0;
        for (int i = 0; i < grid_.dim(); ++i) {
          for (std::size_t e = 0; e < gu.axis[i].size(); ++e) dot += gu.axis[i][e] * gv.axis[i][e];
        }
        principal = M.M(dirichlet_energy(gu)) * dot * vol;
        break;
      }
      case Family::anisotropic: {
        const auto& pv = std::get<AnisotropicOperator>(op_).exponents();
        for (int i = 0; i < grid_.dim(); ++i) {
          for (std::size_t e = 0; e < gu.axis[i].size(); ++e) {
            principal += signed_power(gu.axis[i][e], pv[i] - 1.0) * gv.axis[i][e];
          }
        }
        principal *= vol;
        break;
      }
    }
    double source = 0.0;
    const auto uv = u.values();
    const auto vv = v.values();
    for (std::size_t k = 0; k < uv.size(); ++k) source += f_.f(uv[k]) * vv[k];
    return principal - source * vol;
  }

  /// Nodal representation of Phi'(u): the derivative of the discrete energy
  /// with respect to u_j divided by prod(h), split into operator and source.
  ResidualParts residual_parts(const Field& u) const {
    require_grid(u);
    const auto grad = gradient(u);
    std::array<std::vector<double>, 3> flux;
    switch (family()) {
      case Family::quasilinear: {
        const auto& op = std::get<QuasilinearOperator>(op_);
        auto w = cell_gradient_squared(grad);
        for (double& c : w) c = weight(op, c);
        flux = edge_flux(grad, w);
        break;
      }
      case Family::kirchhoff: {
        const auto& M = std::get<KirchhoffOperator>(op_).M;
        const double m = M.M(dirichlet_energy(grad));
        for (int i = 0; i < grid_.dim(); ++i) {
          flux[i] = grad.axis[i];
          for (double& e : flux[i]) e *= m;
        }
        break;
      }
      case Family::anisotropic: {
        const auto& pv = std::get<AnisotropicOperator>(op_).exponents();
        for (int i = 0; i < grid_.dim(); ++i) {
          flux[i] = grad.axis[i];
          for (double& e : flux[i]) e = signed_power(e, pv[i] - 1.0);
        }
        break;
      }
    }
    Field source(grid_);
    auto sv = source.values();
    const auto uv = u.values();
    for (std::size_t k = 0; k < uv.size(); ++k) sv[k] = f_.f(uv[k]);
    return {flux_divergence(grid_, flux), std::move(source)};
  }

  Field residual(const Field& u) const {
    auto parts = residual_parts(u);
    return parts.principal - parts.source;
  }

  /// Norm of the family's energy space: W^{1,p}_0, H^1_0 or the anisotropic sum norm.
  double ambient_norm(const Field& u) const {
    require_grid(u);
    switch (family()) {
      case Family::quasilinear: return seminorm(u, std::get<QuasilinearOperator>(op_).p());
      case Family::kirchhoff: return std::sqrt(dirichlet_energy(gradient(u)));
      case Family::anisotropic: {
        const auto& pv = std::get<AnisotropicOperator>(op_).exponents();
        double s = 0.0;
        for (int i = 0; i < grid_.dim(); ++i) s += axis_norm(u, i, pv[i]);
        return s;
      }
    }
    return 0.0;
  }

  RayProfile ray(const Field& u) const {
    require_grid(u);
    if (u.is_zero()) throw DegenerateDirectionError("the zero field does not span a ray");
    RayProfile r;
    r.family_ = family();
    r.volume_ = grid_.cell_volume();
    const auto grad = gradient(u);
    switch (family()) {
      case Family::quasilinear: {
        const auto& op = std::get<QuasilinearOperator>(op_);
        r.quasi_ = std::make_shared<const QuasilinearOperator>(op);
        r.p_ = op.p();
        r.q_ = op.q();
        const auto sq = cell_gradient_squared(grad);
        if (op.coefficient() == QuasilinearOperator::Coefficient::user_table) {
          r.cell_power_.resize(sq.size());
          for (std::size_t c = 0; c < sq.size(); ++c) r.cell_power_[c] = std::pow(sq[c], 0.5 * r.p_);
        } else {
          double mp = 0.0;
          double mq = 0.0;
          for (double g2 : sq) {
            mp += std::pow(g2, 0.5 * r.p_);
            if (op.coefficient() == QuasilinearOperator::Coefficient::p_plus_q) mq += std::pow(g2, 0.5 * r.q_);
          }
          r.moment_p_ = mp * r.volume_;
          r.moment_q_ = mq * r.volume_;
        }
        break;
      }
      case Family::kirchhoff:
        r.kirchhoff_ = std::make_shared<const KirchhoffCoefficient>(std::get<KirchhoffOperator>(op_).M);
        r.moment_p_ = dirichlet_energy(grad);
        break;
      case Family::anisotropic: {
        const auto& pv = std::get<AnisotropicOperator>(op_).exponents();
        r.axis_exponent_ = pv;
        for (int i = 0; i < grid_.dim(); ++i) {
          double s = 0.0;
          for (double de : grad.axis[i]) s += std::pow(std::abs(de), pv[i]);
          r.axis_moment_.push_back(s * r.volume_);
        }
        break;
      }
    }
    r.terms_ = f_.terms();
    for (const auto& term : r.terms_) {
      double s = 0.0;
      for (double v : u.values()) s += std::pow(std::abs(v), term.exponent);
      r.source_moment_.push_back(s * r.volume_);
    }
    return r;
  }

 private:
  void require_grid(const Field& u) const {
    if (!(u.grid() == grid_)) throw ContractError("field does not live on the functional's grid");
  }

  // a(|grad u|^p) |grad u|^(p-2) from |grad u|^2
  static double weight(const QuasilinearOperator& op, double g2) {
    const double p = op.p();
    if (op.coefficient() == QuasilinearOperator::Coefficient::constant_one && p == 2.0) return 1.0;
    const double s = std::pow(g2, 0.5 * p) + kGradientFloor;
    return op.a(s) * std::pow(s, (p - 2.0) / p);
  }

  static double signed_power(double x, double e) {
    const double m = std::pow(std::abs(x), e);
    return x < 0.0 ? -m : m;
  }

  double dirichlet_energy(const GradientField& grad) const {
    double s = 0.0;
    for (int i = 0; i < grid_.dim(); ++i) {
      for (double de : grad.axis[i]) s += de * de;
    }
    return s * grid_.cell_volume();
  }

  Grid grid_;
  Operator op_;
  Nonlinearity f_;
};

}  // namespace nehari
