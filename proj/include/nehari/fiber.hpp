#pragma once

// Fiber maps gamma_u(t) = Phi(t u), their slopes g(t) = Phi'(t u) u, and the
// projection of a direction onto the Nehari set {u != 0 : Phi'(u) u = 0}.

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/tools/toms748_solve.hpp>

#include "nehari/errors.hpp"
#include "nehari/functional.hpp"

namespace nehari {

/// Log-spaced scan of t values. A relative scan is taken around the Nehari
/// point, t in [lo t_u, hi t_u].
struct ScanSpec {
  double lo = 1e-3;
  double hi = 1e3;
  int points = 200;
  bool relative = false;

  std::vector<double> grid() const {
    if (points < 2 || !(lo > 0.0) || !(hi > lo)) throw ParameterError("scan needs 0 < lo < hi and >= 2 points");
    std::vector<double> t(points);
    const double step = std::log(hi / lo) / (points - 1);
    for (int k = 0; k < points; ++k) t[k] = lo * std::exp(step * k);
    t.back() = hi;
    return t;
  }
};

struct FiberScanPoint {
  double t;
  double gamma;
  double slope;
};

struct FiberDiagnostics {
  double t_u = 0.0;
  double slope_at_root = 0.0;
  double t_lo = 0.0;
  double t_hi = 0.0;
  int iterations = 0;
  int sign_changes_observed = 0;
  bool monotone_certificate = false;
  std::vector<FiberScanPoint> scan;
};

struct ProjectionOptions {
  double tol = 1e-10;
  /// Diagnostic scan over [t_u / scan_span, t_u * scan_span]; 0 disables it.
  int scan_points = 200;
  double scan_span = 1e3;
  /// Initial bracket; the lower end shrinks and the upper end doubles until g changes sign.
  double bracket_lo = 1e-6;
  double bracket_hi = 1.0;
  double bracket_cap = 1e9;
  bool newton_polish = true;
};

struct Projection {
  double t = 0.0;
  FiberDiagnostics diagnostics;
};

inline double fiber_value(const Functional& F, const Field& u, double t) {
  if (u.is_zero()) throw DegenerateDirectionError("fiber of the zero field");
  if (!(t > 0.0)) throw ParameterError("fiber parameter must be positive");
  return F.energy(t * u);
}

inline double fiber_slope(const Functional& F, const Field& u, double t) {
  if (u.is_zero()) throw DegenerateDirectionError("fiber of the zero field");
  if (!(t > 0.0)) throw ParameterError("fiber parameter must be positive");
  return F.pairing(t * u, u);
}

namespace detail {

inline int count_sign_changes(const std::vector<double>& g) {
  int changes = 0;
  int last = 0;
  for (double v : g) {
    const int s = (v > 0.0) - (v < 0.0);
    if (s == 0) continue;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

/// First k with values[k+1] > values[k] + slack (decreasing == true) or
/// values[k+1] < values[k] - slack (decreasing == false); slack is
/// 1e-12 times the local scale.
inline std::optional<std::size_t> first_monotonicity_break(const std::vector<double>& values,
                                                            const std::vector<double>& scale, bool decreasing,
                                                            double rel_slack = 1e-12) {
  for (std::size_t k = 0; k + 1 < values.size(); ++k) {
    const double slack = rel_slack * std::max(scale[k], scale[k + 1]);
    const double diff = values[k + 1] - values[k];
    if (decreasing ? diff > slack : diff < -slack) return k;
  }
  return std::nullopt;
}

}  // namespace detail

/// Locates the root of t -> ray.slope(t) by bracketing and TOMS 748.
inline Projection project_ray(const RayProfile& ray, double homogeneity_exponent, const ProjectionOptions& opt = {}) {
  if (!(opt.tol > 0.0)) throw ParameterError("projection tolerance must be positive");
  std::vector<std::pair<double, double>> trace;
  auto g = [&](double t) {
    const double v = ray.slope(t);
    trace.emplace_back(t, v);
    return v;
  };

  double lo = opt.bracket_lo;
  double hi = std::max(opt.bracket_hi, lo * 2.0);
  double g_lo = g(lo);
  while (!(g_lo > 0.0)) {
    if (lo < 1e-30 || !std::isfinite(g_lo)) {
      throw HypothesisViolation("fiber slope is not positive near t = 0", std::move(trace));
    }
    hi = lo;
    lo *= 0.5;
    g_lo = g(lo);
  }
  double g_hi = g(hi);
  while (!(g_hi < 0.0)) {
    if (hi > opt.bracket_cap || !std::isfinite(g_hi)) {
      throw HypothesisViolation("fiber slope never became negative up to t = " + std::to_string(opt.bracket_cap),
                                std::move(trace));
    }
    lo = hi;
    g_lo = g_hi;
    hi *= 2.0;
    g_hi = g(hi);
  }

  Projection out;
  auto& diag = out.diagnostics;
  diag.t_lo = lo;
  diag.t_hi = hi;
  const double scale = std::max(std::abs(g_lo), std::abs(g_hi));

  std::uintmax_t max_iter = 200;
  boost::math::tools::eps_tolerance<double> width_tol(std::numeric_limits<double>::digits - 2);
  const auto root = boost::math::tools::toms748_solve(g, lo, hi, g_lo, g_hi, width_tol, max_iter);
  double t = 0.5 * (root.first + root.second);
  double gt = g(t);
  const double ga = g(root.first);
  const double gb = g(root.second);
  if (std::abs(ga) < std::abs(gt)) {
    t = root.first;
    gt = ga;
  }
  if (std::abs(gb) < std::abs(gt)) {
    t = root.second;
    gt = gb;
  }
  if (opt.newton_polish && gt != 0.0) {
    const double h = 1e-6 * t;
    const double dg = (g(t + h) - g(t - h)) / (2.0 * h);
    if (dg < 0.0) {
      const double tn = t - gt / dg;
      if (tn > lo && tn < hi) {
        const double gn = g(tn);
        if (std::abs(gn) < std::abs(gt)) {
          t = tn;
          gt = gn;
        }
      }
    }
  }
  diag.t_u = t;
  diag.slope_at_root = gt;
  diag.iterations = static_cast<int>(max_iter);
  if (std::abs(gt) > opt.tol * (1.0 + scale)) {
    throw HypothesisViolation("fiber root did not converge", std::move(trace));
  }

  if (opt.scan_points > 1) {
    const ScanSpec spec{t / opt.scan_span, t * opt.scan_span, opt.scan_points};
    std::vector<double> slopes;
    std::vector<double> ratio;
    std::vector<double> ratio_scale;
    for (double s : spec.grid()) {
      const double gs = ray.slope(s);
      diag.scan.push_back({s, ray.value(s), gs});
      slopes.push_back(gs);
      const double sp = std::pow(s, homogeneity_exponent - 1.0);
      ratio.push_back(gs / sp);
      ratio_scale.push_back(ray.slope_scale(s) / sp);
    }
    diag.sign_changes_observed = detail::count_sign_changes(slopes);
    diag.monotone_certificate = !detail::first_monotonicity_break(ratio, ratio_scale, true).has_value();
  }
  out.t = t;
  return out;
}

inline Projection project_to_nehari(const Functional& F, const Field& u, const ProjectionOptions& opt = {}) {
  if (u.is_zero()) throw DegenerateDirectionError("cannot project the zero field onto the Nehari set");
  return project_ray(F.ray(u), F.homogeneity_exponent(), opt);
}

/// Sampled evidence (not proof) for the fiber monotonicity hypotheses along one direction:
///   ratio:  t -> g(t) / t^(p-1) decreasing
///   gap:    t -> Phi(t u) - g(t) t / p increasing
///   unique: exactly one sign change of g
struct DirectionCertificate {
  bool ratio_decreasing = false;
  bool gap_increasing = false;
  bool single_sign_change = false;
  int sign_changes = 0;
  std::optional<std::pair<double, double>> ratio_witness;
  std::optional<std::pair<double, double>> gap_witness;
  const char* label = "sampled";

  bool all() const noexcept { return ratio_decreasing && gap_increasing && single_sign_change; }
};

inline DirectionCertificate certify_ray(const RayProfile& ray, double p, const ScanSpec& scan) {
  DirectionCertificate cert;
  const auto ts = scan.grid();
  std::vector<double> slopes, ratio, ratio_scale, gap, gap_scale;
  for (double t : ts) {
    const double gamma = ray.value(t);
    const double g = ray.slope(t);
    slopes.push_back(g);
    const double tp1 = std::pow(t, p - 1.0);
    ratio.push_back(g / tp1);
    ratio_scale.push_back(ray.slope_scale(t) / tp1);
    gap.push_back(gamma - g * t / p);
    gap_scale.push_back(ray.value_scale(t) + ray.slope_scale(t) * t / p);
  }
  cert.sign_changes = detail::count_sign_changes(slopes);
  cert.single_sign_change = cert.sign_changes == 1;
  if (auto k = detail::first_monotonicity_break(ratio, ratio_scale, true)) {
    cert.ratio_witness = std::make_pair(ts[*k], ts[*k + 1]);
  } else {
    cert.ratio_decreasing = true;
  }
  if (auto k = detail::first_monotonicity_break(gap, gap_scale, false)) {
    cert.gap_witness = std::make_pair(ts[*k], ts[*k + 1]);
  } else {
    cert.gap_increasing = true;
  }
  return cert;
}

/// A relative scan needs t_u; if the projection itself fails the certificate
/// reports no sign change.
inline DirectionCertificate certify_direction(const Functional& F, const Field& u, const ScanSpec& scan = {}) {
  if (u.is_zero()) throw DegenerateDirectionError("cannot certify the zero direction");
  const RayProfile ray = F.ray(u);
  ScanSpec absolute = scan;
  if (scan.relative) {
    ProjectionOptions opt;
    opt.scan_points = 0;
    double tu = 0.0;
    try {
      tu = project_ray(ray, F.homogeneity_exponent(), opt).t;
    } catch (const HypothesisViolation&) {
      DirectionCertificate none;
      return none;
    }
    absolute.lo = scan.lo * tu;
    absolute.hi = scan.hi * tu;
    absolute.relative = false;
  }
  return certify_ray(ray, F.homogeneity_exponent(), absolute);
}

}  // namespace nehari
