#pragma once

// Sampled audits of the structural hypotheses for each family, the abstract
// fiber conditions, the Simon vector inequality, and a radial shooting oracle.
//
// Limits are decided by a decade trend: the quantity is read at the last three
// decades of the scan and must move toward the limit by a factor >= 2 per
// decade. Monotonicity and convexity allow a roundoff slack of 1e-12 x scale.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "nehari/check_report.hpp"
#include "nehari/errors.hpp"
#include "nehari/fiber.hpp"
#include "nehari/functional.hpp"
#include "nehari/nonlinearity.hpp"
#include "nehari/operators.hpp"
#include "nehari/solver.hpp"

namespace nehari {

namespace detail {

inline constexpr double kScanLo = 1e-8;
inline constexpr double kScanHi = 1e8;
inline constexpr int kPerDecade = 8;
inline constexpr double kRelSlack = 1e-12;

inline std::vector<double> log_samples(double lo = kScanLo, double hi = kScanHi, int per_decade = kPerDecade) {
  const int decades = static_cast<int>(std::lround(std::log10(hi / lo)));
  std::vector<double> t;
  for (int k = 0; k <= decades * per_decade; ++k) t.push_back(lo * std::pow(10.0, static_cast<double>(k) / per_decade));
  return t;
}

inline std::string sampling_text(double lo, double hi, std::size_t n) {
  std::ostringstream os;
  os << "log grid t in [" << lo << ", " << hi << "], " << n << " points";
  return os.str();
}

inline std::string num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

/// Samples q on ts up to the first non-finite value.
struct Samples {
  std::vector<double> t;
  std::vector<double> q;
  std::vector<double> scale;
  bool truncated = false;
};

inline Samples sample(const std::vector<double>& ts, const std::function<double(double)>& q,
                      const std::function<double(double)>& scale = {}) {
  Samples s;
  for (double t : ts) {
    const double v = q(t);
    if (!std::isfinite(v)) {
      s.truncated = true;
      break;
    }
    s.t.push_back(t);
    s.q.push_back(v);
    s.scale.push_back(scale ? scale(t) : std::abs(v));
  }
  return s;
}

inline std::string truncation_note(const Samples& s) {
  if (!s.truncated) return {};
  return "; sampling truncated at t = " + num(s.t.empty() ? 0.0 : s.t.back()) + " (non-finite value beyond)";
}

enum class Direction { increasing, decreasing };

/// Monotonicity verdict; steps within the slack count as ties, so strict and
/// non-strict monotonicity are decided alike.
inline CheckEntry monotone_entry(std::string id, const std::string& what, const Samples& s, Direction dir) {
  CheckEntry e{std::move(id), CheckStatus::sampled_pass, std::nullopt, what, {}};
  for (std::size_t k = 0; k + 1 < s.q.size(); ++k) {
    const double slack = kRelSlack * std::max(s.scale[k], s.scale[k + 1]);
    const double diff = s.q[k + 1] - s.q[k];
    const bool bad = dir == Direction::increasing ? diff < -slack : diff > slack;
    if (bad) {
      e.status = CheckStatus::fail;
      e.witness = "t = " + num(s.t[k]) + " -> " + num(s.q[k]) + ", t = " + num(s.t[k + 1]) + " -> " + num(s.q[k + 1]);
      break;
    }
  }
  if (s.q.size() < 2) {
    e.status = CheckStatus::fail;
    e.witness = "fewer than two finite samples";
  }
  e.notes += truncation_note(s);
  return e;
}

/// Convexity via second divided differences on a non-uniform grid.
inline CheckEntry convex_entry(std::string id, const std::string& what, const std::vector<double>& ts,
                               const std::function<double(double)>& h, const std::function<double(double)>& scale,
                               bool strict) {
  const Samples s = sample(ts, h, scale);
  CheckEntry e{std::move(id), CheckStatus::sampled_pass, std::nullopt, what, {}};
  for (std::size_t k = 0; k + 2 < s.q.size(); ++k) {
    const double dt0 = s.t[k + 1] - s.t[k];
    const double dt1 = s.t[k + 2] - s.t[k + 1];
    const double d0 = (s.q[k + 1] - s.q[k]) / dt0;
    const double d1 = (s.q[k + 2] - s.q[k + 1]) / dt1;
    const double mag = std::max({s.scale[k], s.scale[k + 1], s.scale[k + 2]});
    const double slack = kRelSlack * mag / std::min(dt0, dt1) + kRelSlack * (std::abs(d0) + std::abs(d1));
    const double jump = d1 - d0;
    const bool bad = strict ? !(jump > slack) : jump < -slack;
    if (bad) {
      e.status = CheckStatus::fail;
      e.witness = "second difference " + num(jump) + " at t = " + num(s.t[k + 1]);
      break;
    }
  }
  e.notes += truncation_note(s);
  return e;
}

enum class Limit { zero_at_zero, zero_at_infinity, infinity_at_infinity };

/// Decade-trend decision on q over the last two decades of [kScanLo, kScanHi].
inline CheckEntry limit_entry(std::string id, const std::string& what, const std::function<double(double)>& q,
                              Limit limit) {
  const bool at_zero = limit == Limit::zero_at_zero;
  const double end = at_zero ? kScanLo : kScanHi;
  const double step = at_zero ? 10.0 : 0.1;
  const std::array<double, 3> ts{end * step * step, end * step, end};
  std::array<double, 3> v{};
  for (int k = 0; k < 3; ++k) v[k] = q(ts[k]);
  std::ostringstream w;
  for (int k = 0; k < 3; ++k) w << (k ? ", " : "") << "t = " << num(ts[k]) << " -> " << num(v[k]);
  bool ok = true;
  if (limit == Limit::infinity_at_infinity) {
    for (int k = 0; k < 2; ++k) {
      if (v[k + 1] == std::numeric_limits<double>::infinity()) continue;
      if (!std::isfinite(v[k + 1]) || !(v[k] > 0.0) || !(v[k + 1] >= 2.0 * v[k])) ok = false;
    }
  } else {
    for (int k = 0; k < 2; ++k) {
      if (v[k] == 0.0 && v[k + 1] == 0.0) continue;
      if (!std::isfinite(v[k + 1]) || !(std::abs(v[k + 1]) <= 0.5 * std::abs(v[k]))) ok = false;
    }
  }
  CheckEntry e{std::move(id), ok ? CheckStatus::sampled_pass : CheckStatus::fail, std::nullopt, what,
               "decade trend at t = " + num(ts[0]) + ", " + num(ts[1]) + ", " + num(ts[2])};
  if (!ok) e.witness = w.str();
  return e;
}

inline CheckEntry sign_entry(const Nonlinearity& f) {
  const auto ts = log_samples();
  CheckEntry e{"f.sign", CheckStatus::sampled_pass, std::nullopt, "f odd and f >= 0 on (0, inf)",
               sampling_text(kScanLo, kScanHi, ts.size())};
  for (double t : ts) {
    const double v = f.f(t);
    if (!(v >= 0.0)) {
      e.status = CheckStatus::fail;
      e.witness = "f(" + num(t) + ") = " + num(v);
      break;
    }
    if (f.f(-t) != -v) {
      e.status = CheckStatus::fail;
      e.witness = "f(-t) != -f(t) at t = " + num(t);
      break;
    }
  }
  return e;
}

/// Exponent in (lo, hi) strictly above alpha when possible, used to read
/// "f(t)/t^(alpha-1) -> 0 for some alpha in (lo, hi)". It sits near hi since the
/// decade trend only resolves decay faster than t^(-log10 2).
inline double witness_exponent(double alpha, double lo, double hi) {
  const double base = std::max(alpha, lo);
  if (!std::isfinite(hi)) return base + 1.0;
  if (base < hi) return base + 0.9 * (hi - base);
  return 0.5 * (lo + hi);
}

}  // namespace detail

/// p* = dp/(d-p) for p < d, +inf otherwise.
inline double sobolev_exponent(double p, int d) {
  return p < d ? d * p / (d - p) : std::numeric_limits<double>::infinity();
}

inline CheckReport check_quasilinear(const QuasilinearOperator& op, double alpha, const Nonlinearity& f, int d) {
  using namespace detail;
  const double p = op.p();
  const double q = op.q();
  const double ps = sobolev_exponent(p, d);
  const auto ts = log_samples();
  const std::string grid_text = sampling_text(kScanLo, kScanHi, ts.size());
  CheckReport rep;

  {
    const bool ok = p >= q && q > 1.0 && alpha > p && alpha < ps;
    rep.add("c1.pre", ok ? CheckStatus::pass : CheckStatus::fail,
            "p >= q > 1 and alpha in (p, p*), p* = " + num(ps),
            ok ? std::nullopt
               : std::optional<std::string>("p = " + num(p) + ", q = " + num(q) + ", alpha = " + num(alpha)));
  }
  {
    const auto [k0, k1] = op.fit_bounds();
    const bool ok = k0 > 0.0 && std::isfinite(k0) && k1 >= k0 && std::isfinite(k1);
    rep.add("c1.1", ok ? CheckStatus::sampled_pass : CheckStatus::fail,
            "fitted k0 = " + num(k0) + ", k1 = " + num(k1) +
                " over the scan range; constants are range-dependent when a is not comparable to 1 + t^((q-p)/p)",
            ok ? std::nullopt : std::optional<std::string>("k0 = " + num(k0) + ", k1 = " + num(k1)),
            sampling_text(1e-6, 1e6, 241));
  }
  {
    auto e = monotone_entry("c1.2", "a non-increasing", sample(ts, [&](double t) { return op.a(t); }),
                            Direction::decreasing);
    e.sampling = grid_text;
    rep.add(std::move(e));
  }
  {
    auto lin = [&](double t) { return op.a(std::pow(t, p)) * std::pow(t, p); };
    auto gap = [&](double t) { return op.A(std::pow(t, p)) - lin(t); };
    auto mag = [&](double t) { return std::abs(op.A(std::pow(t, p))) + std::abs(lin(t)); };
    auto e1 = convex_entry("c1.3", "t -> a(t^p)t^p and t -> A(t^p) - a(t^p)t^p convex", ts, lin, mag, false);
    if (e1.status != CheckStatus::fail) {
      auto e2 = convex_entry("c1.3", e1.notes, ts, gap, mag, false);
      e1.status = e2.status;
      e1.witness = e2.witness ? std::optional<std::string>("second map: " + *e2.witness) : std::nullopt;
    } else {
      e1.witness = "first map: " + *e1.witness;
    }
    e1.sampling = grid_text;
    rep.add(std::move(e1));
  }
  rep.add(limit_entry("c1.4", "f(t)/t^(q-1) -> 0 as t -> 0", [&](double t) { return f.f(t) / std::pow(t, q - 1.0); },
                      Limit::zero_at_zero));
  rep.add(limit_entry("c1.5", "F(t)/t^p -> inf as t -> inf", [&](double t) { return f.F(t) / std::pow(t, p); },
                      Limit::infinity_at_infinity));
  {
    const double aw = witness_exponent(alpha, p, ps);
    rep.add(limit_entry("c1.6", "f(t)/t^(a-1) -> 0 as t -> inf with witness exponent a = " + num(aw),
                        [&](double t) { return f.f(t) / std::pow(t, aw - 1.0); }, Limit::zero_at_infinity));
  }
  {
    auto e = monotone_entry("c1.7", "f(t)/t^(p-1) increasing",
                            sample(ts, [&](double t) { return f.f(t) / std::pow(t, p - 1.0); }), Direction::increasing);
    e.sampling = grid_text;
    rep.add(std::move(e));
  }
  {
    auto e = convex_entry(
        "c1.conv", "t -> A(t^p) strictly convex", ts, [&](double t) { return op.A(std::pow(t, p)); },
        [&](double t) { return std::abs(op.A(std::pow(t, p))); }, true);
    e.sampling = grid_text;
    rep.add(std::move(e));
  }
  rep.add("c1.S+", CheckStatus::assumed, "(S+) property of the principal part is not numerically checkable");
  rep.add(sign_entry(f));
  return rep;
}

inline CheckReport check_kirchhoff(const KirchhoffCoefficient& M, double alpha, const Nonlinearity& f) {
  using namespace detail;
  auto ts = log_samples();
  const std::string grid_text = sampling_text(kScanLo, kScanHi, ts.size());
  CheckReport rep;
  {
    const bool ok = alpha > 4.0 && alpha < 6.0;
    rep.add("c2.pre", ok ? CheckStatus::pass : CheckStatus::fail, "alpha in (4, 6)",
            ok ? std::nullopt : std::optional<std::string>("alpha = " + num(alpha)));
  }
  {
    std::vector<double> with_zero{0.0};
    with_zero.insert(with_zero.end(), ts.begin(), ts.end());
    auto e = monotone_entry("c2.1", "M increasing and M(0) = m0 > 0", sample(with_zero, [&](double t) { return M.M(t); }),
                            Direction::increasing);
    const double m0 = M.M(0.0);
    if (e.status != CheckStatus::fail && !(m0 > 0.0)) {
      e.status = CheckStatus::fail;
      e.witness = "M(0) = " + num(m0);
    }
    e.sampling = grid_text + " plus t = 0";
    rep.add(std::move(e));
  }
  {
    auto e = monotone_entry("c2.2", "M(t)/t decreasing", sample(ts, [&](double t) { return M.M(t) / t; }),
                            Direction::decreasing);
    e.sampling = grid_text;
    rep.add(std::move(e));
  }
  rep.add(limit_entry("c2.3", "f(t)/t -> 0 as t -> 0", [&](double t) { return f.f(t) / t; }, Limit::zero_at_zero));
  rep.add(limit_entry("c2.4", "F(t)/t^4 -> inf as t -> inf", [&](double t) { return f.F(t) / std::pow(t, 4.0); },
                      Limit::infinity_at_infinity));
  {
    const double aw = witness_exponent(alpha, 4.0, 6.0);
    rep.add(limit_entry("c2.5", "f(t)/t^(a-1) -> 0 as t -> inf with witness exponent a = " + num(aw),
                        [&](double t) { return f.f(t) / std::pow(t, aw - 1.0); }, Limit::zero_at_infinity));
  }
  {
    auto e = monotone_entry("c2.6", "f(t)/t^3 increasing", sample(ts, [&](double t) { return f.f(t) / (t * t * t); }),
                            Direction::increasing);
    e.sampling = grid_text;
    rep.add(std::move(e));
  }
  {
    CheckEntry e{"c2.Mhat", CheckStatus::sampled_pass, std::nullopt, "Mhat(t) >= M(t) t / 2", grid_text};
    for (double t : ts) {
      const double lhs = M.Mhat(t);
      const double rhs = 0.5 * M.M(t) * t;
      if (!std::isfinite(lhs) || !std::isfinite(rhs)) {
        e.notes += truncation_note(Samples{{t}, {}, {}, true});
        break;
      }
      if (lhs - rhs < -kRelSlack * std::max(std::abs(lhs), std::abs(rhs))) {
        e.status = CheckStatus::fail;
        e.witness = "t = " + num(t) + ": Mhat = " + num(lhs) + " < " + num(rhs);
        break;
      }
    }
    rep.add(std::move(e));
  }
  {
    // C fitted on [0, 1], verified on the whole range.
    const double m1 = M.M(1.0);
    double C = M.M(0.0);
    for (int k = 0; k <= 1000; ++k) {
      const double t = k / 1000.0;
      C = std::max(C, M.M(t) - m1 * t);
    }
    CheckEntry e{"c2.Mlin", CheckStatus::sampled_pass, std::nullopt,
                 "M(t) <= M(1) t + C with fitted C = " + num(C), grid_text + " plus [0, 1] fit"};
    for (double t : ts) {
      const double lhs = M.M(t);
      const double rhs = m1 * t + C;
      if (!std::isfinite(lhs)) {
        e.status = CheckStatus::fail;
        e.witness = "M(" + num(t) + ") is not finite";
        break;
      }
      if (lhs > rhs + kRelSlack * std::max(std::abs(lhs), std::abs(rhs))) {
        e.status = CheckStatus::fail;
        e.witness = "t = " + num(t) + ": M = " + num(lhs) + " > " + num(rhs);
        break;
      }
    }
    rep.add(std::move(e));
  }
  rep.add(sign_entry(f));
  return rep;
}

inline CheckReport check_anisotropic(const std::vector<double>& pvec, double alpha, const Nonlinearity& f, int d) {
  using namespace detail;
  if (pvec.empty() || !std::is_sorted(pvec.begin(), pvec.end())) {
    throw ParameterError("anisotropic exponents must be non-empty and sorted ascending");
  }
  if (static_cast<int>(pvec.size()) != d) throw ParameterError("anisotropic exponent count must equal the dimension");
  const double p1 = pvec.front();
  const double pN = pvec.back();
  double sum = 0.0;
  for (double pi : pvec) sum += 1.0 / pi;
  const bool sum_ok = sum > 1.0;
  const double ps = sum_ok ? d / (sum - 1.0) : std::numeric_limits<double>::infinity();
  const auto ts = log_samples();
  const std::string grid_text = sampling_text(kScanLo, kScanHi, ts.size());
  CheckReport rep;
  rep.add("c3.pre.sum", sum_ok ? CheckStatus::pass : CheckStatus::fail, "sum 1/p_i > 1 required; value " + num(sum),
          sum_ok ? std::nullopt : std::optional<std::string>("sum 1/p_i = " + num(sum) + " <= 1"));
  if (sum_ok) {
    const bool pn_ok = pN < ps;
    rep.add("c3.pre.pN", pn_ok ? CheckStatus::pass : CheckStatus::fail, "p_N < p* = " + num(ps),
            pn_ok ? std::nullopt : std::optional<std::string>("p_N = " + num(pN)));
    const bool a_ok = alpha > pN && alpha < ps;
    rep.add("c3.pre.alpha", a_ok ? CheckStatus::pass : CheckStatus::fail, "alpha in (p_N, p*)",
            a_ok ? std::nullopt : std::optional<std::string>("alpha = " + num(alpha)));
  } else {
    rep.add("c3.pre.pN", CheckStatus::not_evaluated, "p* undefined since sum 1/p_i <= 1");
    rep.add("c3.pre.alpha", CheckStatus::not_evaluated, "p* undefined since sum 1/p_i <= 1");
  }
  rep.add(limit_entry("c3.1", "f(t)/t^(p_1-1) -> 0 as t -> 0", [&](double t) { return f.f(t) / std::pow(t, p1 - 1.0); },
                      Limit::zero_at_zero));
  rep.add(limit_entry("c3.2", "F(t)/t^p_N -> inf as t -> inf", [&](double t) { return f.F(t) / std::pow(t, pN); },
                      Limit::infinity_at_infinity));
  if (sum_ok) {
    // read as a vanishing limit, the form every other family uses
    const double aw = witness_exponent(alpha, pN, ps);
    rep.add(limit_entry("c3.3", "f(t)/t^(a-1) -> 0 as t -> inf with witness exponent a = " + num(aw),
                        [&](double t) { return f.f(t) / std::pow(t, aw - 1.0); }, Limit::zero_at_infinity));
  } else {
    rep.add("c3.3", CheckStatus::not_evaluated, "no admissible exponent window since sum 1/p_i <= 1");
  }
  {
    auto e = monotone_entry("c3.4", "f(t)/t^(p_N-1) increasing",
                            sample(ts, [&](double t) { return f.f(t) / std::pow(t, pN - 1.0); }), Direction::increasing);
    e.sampling = grid_text;
    rep.add(std::move(e));
  }
  rep.add(sign_entry(f));
  return rep;
}

struct AbstractCheckOptions {
  ScanSpec scan{1e-3, 1e3, 200, true};
  std::uint64_t seed = 20240;
  int modes = 3;
};

/// Conditions of the abstract theorem sampled along seeded random directions.
inline CheckReport check_abstract(const Functional& F, int n_directions, const AbstractCheckOptions& opt = {}) {
  using detail::num;
  if (n_directions < 1) throw ParameterError("check_abstract needs at least one direction");
  const double r = F.small_ball_exponent();
  const double ph = F.homogeneity_exponent();
  CheckReport rep;
  std::optional<std::string> w1, w3, w4i, w4ii, w4u;
  double min_ratio = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n_directions; ++k) {
    Field w = random_init(F.grid(), opt.seed + k, opt.modes, false);
    w *= 1.0 / F.ambient_norm(w);
    const RayProfile ray = F.ray(w);
    const std::string dir = "direction " + std::to_string(k) + " (seed " + std::to_string(opt.seed + k) + ")";

    // (1): Phi'(eps w)(eps w) / ||eps w||^r stays away from 0
    std::vector<double> ratios;
    for (double eps : {1e-1, 1e-2, 1e-3, 1e-4}) ratios.push_back(ray.slope(eps) * eps / std::pow(eps, r));
    for (double v : ratios) min_ratio = std::min(min_ratio, v);
    if (!w1 && (!(*std::min_element(ratios.begin(), ratios.end()) > 0.0) || ratios[3] < 0.5 * ratios[2])) {
      w1 = dir + ": ratios " + num(ratios[0]) + ", " + num(ratios[1]) + ", " + num(ratios[2]) + ", " + num(ratios[3]);
    }

    // (3): Phi(t w)/t^p -> -inf
    std::optional<double> tw;
    try {
      ProjectionOptions po;
      po.scan_points = 0;
      tw = project_ray(ray, ph, po).t;
    } catch (const HypothesisViolation& e) {
      if (!w3) w3 = dir + ": " + e.what();
    }
    if (tw) {
      std::array<double, 3> v{};
      for (int j = 0; j < 3; ++j) {
        const double t = *tw * std::pow(10.0, 2 + j);
        v[j] = ray.value(t) / std::pow(t, ph);
      }
      const bool ok = v[0] < 0.0 && v[1] <= 2.0 * v[0] && v[2] <= 2.0 * v[1];
      if (!ok && !w3) w3 = dir + ": Phi(tw)/t^p = " + num(v[0]) + ", " + num(v[1]) + ", " + num(v[2]);
    }

    // (4)
    const auto cert = certify_direction(F, w, opt.scan);
    if (!cert.ratio_decreasing && !w4i) {
      w4i = dir + (cert.ratio_witness ? ": t pair (" + num(cert.ratio_witness->first) + ", " +
                                            num(cert.ratio_witness->second) + ")"
                                      : std::string(": scan unavailable"));
    }
    if (!cert.gap_increasing && !w4ii) {
      w4ii = dir + (cert.gap_witness ? ": t pair (" + num(cert.gap_witness->first) + ", " +
                                           num(cert.gap_witness->second) + ")"
                                     : std::string(": scan unavailable"));
    }
    if (!cert.single_sign_change && !w4u) w4u = dir + ": " + std::to_string(cert.sign_changes) + " sign changes";
  }
  std::ostringstream sampling;
  sampling << n_directions << " seeded directions from seed " << opt.seed << "; scan " << opt.scan.points
           << " points over " << (opt.scan.relative ? "t_u x " : "") << "[" << opt.scan.lo << ", " << opt.scan.hi
           << "]";
  const auto status = [](const std::optional<std::string>& w) {
    return w ? CheckStatus::fail : CheckStatus::sampled_pass;
  };
  rep.add("tp.1", status(w1), "liminf Phi'(u)u/||u||^r > 0 sampled at eps = 1e-1..1e-4, r = " + num(r) +
                                  "; min ratio " + num(min_ratio),
          w1, sampling.str());
  rep.add("tp.2", CheckStatus::assumed, "weak continuity of I is not numerically checkable");
  rep.add("tp.3", status(w3), "Phi(tw)/t^p -> -inf sampled at t = t_w x 1e2..1e4, p = " + num(ph), w3, sampling.str());
  rep.add("tp.4i", status(w4i), "t -> Phi'(tu)u / t^(p-1) decreasing (sampled)", w4i, sampling.str());
  rep.add("tp.4ii", status(w4ii), "t -> Phi(tu) - Phi'(tu)tu / p increasing (sampled)", w4ii, sampling.str());
  rep.add("tp.4.unique", status(w4u), "fiber slope changes sign exactly once (sampled)", w4u, sampling.str());
  rep.add("tp.5", CheckStatus::assumed, "weak lower semicontinuity is not numerically checkable");
  return rep;
}

/// ((|x|^(p-2)x - |y|^(p-2)y).(x-y)) / RHS with the constant normalized to 1:
/// RHS = |x-y|^p for p >= 2 and |x-y|^2 / (|x|+|y|)^(2-p) for 1 < p < 2.
/// Returns +inf for x == y (both sides vanish).
inline double simon_ratio(double p, const std::vector<double>& x, const std::vector<double>& y) {
  if (!(p > 1.0)) throw ParameterError("Simon inequality needs p > 1");
  if (x.size() != y.size() || x.empty()) throw ContractError("Simon inequality needs vectors of equal length");
  double nx = 0.0, ny = 0.0, nd = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    nx += x[i] * x[i];
    ny += y[i] * y[i];
    nd += (x[i] - y[i]) * (x[i] - y[i]);
  }
  nx = std::sqrt(nx);
  ny = std::sqrt(ny);
  if (nx == 0.0 && ny == 0.0) throw ParameterError("Simon inequality needs (x, y) not both zero");
  if (nd == 0.0) return std::numeric_limits<double>::infinity();
  const double sx = nx > 0.0 ? std::pow(nx, p - 2.0) : 0.0;
  const double sy = ny > 0.0 ? std::pow(ny, p - 2.0) : 0.0;
  double lhs = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) lhs += (sx * x[i] - sy * y[i]) * (x[i] - y[i]);
  const double dist = std::sqrt(nd);
  const double rhs = p >= 2.0 ? std::pow(dist, p) : nd / std::pow(nx + ny, 2.0 - p);
  return lhs / rhs;
}

struct SimonSample {
  double min_ratio = std::numeric_limits<double>::infinity();
  std::size_t evaluated = 0;
  std::size_t degenerate = 0;
  std::vector<double> worst_x;
  std::vector<double> worst_y;
};

/// Minimum ratio over seeded pairs uniform in [-1, 1]^dim.
inline SimonSample simon_sample(double p, std::size_t pairs, int dim, std::uint64_t seed) {
  if (dim < 1) throw ParameterError("Simon sampler needs dim >= 1");
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  SimonSample out;
  std::vector<double> x(dim), y(dim);
  for (std::size_t k = 0; k < pairs; ++k) {
    for (int i = 0; i < dim; ++i) {
      x[i] = U(gen);
      y[i] = U(gen);
    }
    double r = 0.0;
    try {
      r = simon_ratio(p, x, y);
    } catch (const ParameterError&) {
      ++out.degenerate;
      continue;
    }
    if (std::isinf(r)) {
      ++out.degenerate;
      continue;
    }
    ++out.evaluated;
    if (r < out.min_ratio) {
      out.min_ratio = r;
      out.worst_x = x;
      out.worst_y = y;
    }
  }
  return out;
}

/// Radially symmetric positive solution of u'' + ((d-1)/r) u' + f(u) = 0 on
/// [0, R], u'(0) = 0, u(R) = 0, for d = 1 the even solution on (-R, R).
class RadialProfile {
 public:
  const std::vector<double>& r() const noexcept { return r_; }
  const std::vector<double>& u() const noexcept { return u_; }
  const std::vector<double>& du() const noexcept { return du_; }
  double shooting_height() const noexcept { return s_; }
  int dim() const noexcept { return d_; }
  double radius() const noexcept { return r_.back(); }
  double energy() const noexcept { return energy_; }

  /// Cubic Hermite interpolation of u; 0 outside [0, R].
  double at(double rr) const {
    rr = std::abs(rr);
    if (rr >= r_.back()) return 0.0;
    const double h = r_[1] - r_[0];
    const std::size_t k = std::min(static_cast<std::size_t>(rr / h), r_.size() - 2);
    const double s = (rr - r_[k]) / h;
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
    return h00 * u_[k] + h10 * h * du_[k] + h01 * u_[k + 1] + h11 * h * du_[k + 1];
  }

 private:
  friend RadialProfile radial_shooting(const Nonlinearity&, int, double, double, int);
  std::vector<double> r_, u_, du_;
  double s_ = 0.0;
  int d_ = 1;
  double energy_ = 0.0;
};

namespace detail {

struct ShotResult {
  bool crossed;  // u reached 0 (or blew up) before R
  double u_end;
};

/// RK4 for (u, u'); at r = 0 the singular term is replaced by its limit u'' = -f(u)/d.
inline ShotResult shoot(const Nonlinearity& f, int d, double R, int steps, double s, std::vector<double>* u_out,
                        std::vector<double>* du_out) {
  const double h = R / steps;
  auto acc = [&](double r, double u, double v) { return r > 0.0 ? -(d - 1) / r * v - f.f(u) : -f.f(u) / d; };
  double u = s, v = 0.0;
  if (u_out) {
    u_out->assign(1, u);
    du_out->assign(1, v);
  }
  for (int k = 0; k < steps; ++k) {
    const double r = k * h;
    const double k1u = v, k1v = acc(r, u, v);
    const double k2u = v + 0.5 * h * k1v, k2v = acc(r + 0.5 * h, u + 0.5 * h * k1u, v + 0.5 * h * k1v);
    const double k3u = v + 0.5 * h * k2v, k3v = acc(r + 0.5 * h, u + 0.5 * h * k2u, v + 0.5 * h * k2v);
    const double k4u = v + h * k3v, k4v = acc(r + h, u + h * k3u, v + h * k3v);
    u += h / 6.0 * (k1u + 2 * k2u + 2 * k3u + k4u);
    v += h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
    if (u_out) {
      u_out->push_back(u);
      du_out->push_back(v);
    }
    if (!std::isfinite(u)) return {true, u};
    if (k + 1 < steps && u <= 0.0) return {true, u};
  }
  return {u <= 0.0, u};
}

}  // namespace detail

/// Bisection on the height s = u(0) for a pure-power f.
inline RadialProfile radial_shooting(const Nonlinearity& f, int d, double R, double tol = 1e-10, int steps = 8000) {
  if (f.kind() != Nonlinearity::Kind::pure_power) throw ParameterError("shooting oracle accepts pure powers only");
  if (d < 1 || d > 3) throw ParameterError("shooting oracle dimension must be 1, 2 or 3");
  if (!(R > 0.0)) throw ParameterError("shooting radius must be positive");
  if (!(tol > 0.0)) throw ParameterError("shooting tolerance must be positive");
  if (steps < 4000) throw ParameterError("shooting needs at least 4000 steps");
  if (steps % 2) ++steps;
  auto crossed = [&](double s) { return detail::shoot(f, d, R, steps, s, nullptr, nullptr).crossed; };

  double lo = 1.0, hi = 1.0;
  if (crossed(1.0)) {
    while (crossed(lo)) {
      hi = lo;
      lo *= 0.5;
      if (lo < 1e-6) throw OracleFailure("no positive profile for heights down to 1e-6");
    }
  } else {
    while (!crossed(hi)) {
      lo = hi;
      hi *= 2.0;
      if (hi > 1e6) throw OracleFailure("u(R) stays positive for heights up to 1e6");
    }
  }
  double u_end = detail::shoot(f, d, R, steps, lo, nullptr, nullptr).u_end;
  for (int it = 0; it < 200 && hi - lo > 4 * std::numeric_limits<double>::epsilon() * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    const auto shot = detail::shoot(f, d, R, steps, mid, nullptr, nullptr);
    if (shot.crossed) {
      hi = mid;
    } else {
      lo = mid;
      u_end = shot.u_end;
    }
    if (std::abs(u_end) <= tol * 1e-3) break;
  }
  if (!(std::abs(u_end) <= tol)) throw OracleFailure("shooting did not reach |u(R)| <= tol; u(R) = " + detail::num(u_end));

  RadialProfile prof;
  prof.s_ = lo;
  prof.d_ = d;
  detail::shoot(f, d, R, steps, lo, &prof.u_, &prof.du_);
  prof.u_.back() = 0.0;
  const double h = R / steps;
  prof.r_.resize(steps + 1);
  for (int k = 0; k <= steps; ++k) prof.r_[k] = k * h;
  // Simpson on the d-dimensional radial measure
  const double omega = d == 1 ? 2.0 : (d == 2 ? 2.0 * std::numbers::pi : 4.0 * std::numbers::pi);
  auto density = [&](int k) {
    return (0.5 * prof.du_[k] * prof.du_[k] - f.F(prof.u_[k])) * std::pow(prof.r_[k], d - 1);
  };
  double s = density(0) + density(steps);
  for (int k = 1; k < steps; ++k) s += (k % 2 ? 4.0 : 2.0) * density(k);
  prof.energy_ = omega * s * h / 3.0;
  return prof;
}

}  // namespace nehari
