#pragma once

// Minimization of Psi(w) = Phi(t_w w) over the unit sphere of the ambient norm:
// Nehari projection, preconditioned tangent descent, Armijo backtracking on the
// sphere, renormalization as the retraction.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "nehari/check_report.hpp"
#include "nehari/errors.hpp"
#include "nehari/fiber.hpp"
#include "nehari/functional.hpp"
#include "nehari/grid.hpp"
#include "nehari/preconditioner.hpp"

namespace nehari {

enum class PreconditionerKind { none, inverse_laplacian };

struct ArmijoOptions {
  double initial_step = 1.0;
  double shrink = 0.5;
  double slope_fraction = 1e-4;
  int max_backtracks = 40;
};

struct SolveOptions {
  int max_iterations = 2000;
  double residual_tolerance = 1e-7;
  ArmijoOptions armijo;
  PreconditionerKind preconditioner = PreconditionerKind::inverse_laplacian;
  std::uint64_t seed = 1;
  bool nonnegative_start = true;
  int modes = 2;
  /// Nodes allowed to move (1) or clamped to zero (0); empty means all free.
  std::vector<std::uint8_t> free_mask;
  double projection_tolerance = 1e-10;

  void validate() const {
    if (max_iterations < 0) throw ConfigurationError("max_iterations must be >= 0");
    if (!(residual_tolerance > 0.0)) throw ConfigurationError("residual_tolerance must be positive");
    if (!(armijo.initial_step > 0.0)) throw ConfigurationError("armijo initial step must be positive");
    if (!(armijo.shrink > 0.0 && armijo.shrink < 1.0)) throw ConfigurationError("armijo shrink must lie in (0, 1)");
    if (!(armijo.slope_fraction > 0.0 && armijo.slope_fraction < 1.0)) {
      throw ConfigurationError("armijo slope fraction must lie in (0, 1)");
    }
    if (armijo.max_backtracks < 1) throw ConfigurationError("armijo max_backtracks must be >= 1");
    if (modes < 1) throw ConfigurationError("modes must be >= 1");
    if (!(projection_tolerance > 0.0)) throw ConfigurationError("projection tolerance must be positive");
  }
};

struct SolveReport {
  explicit SolveReport(Field u) : ground_state(std::move(u)) {}

  Field ground_state;
  double c_value = 0.0;  // best found, not a certified global infimum
  std::vector<double> t_history;
  std::vector<double> energy_history;
  std::vector<double> norm_history;  // ambient norm of u_k
  double final_residual = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
  std::string status = "not-started";
  double min_negative_part = 0.0;
  CheckReport hypothesis_summary;
  std::uint64_t seed = 0;
  double spread = 0.0;
  int n_converged = 0;
};

/// Thrown by multi_start when no run converged.
class MultiStartFailure : public std::runtime_error {
 public:
  MultiStartFailure(const std::string& what, std::vector<std::string> statuses, std::optional<SolveReport> best)
      : std::runtime_error(what), statuses_(std::move(statuses)), best_(std::move(best)) {}

  const std::vector<std::string>& statuses() const noexcept { return statuses_; }
  const std::optional<SolveReport>& best() const noexcept { return best_; }

 private:
  std::vector<std::string> statuses_;
  std::optional<SolveReport> best_;
};

/// sum_k c_k prod_i sin(pi k_i x_i / L_i) over k in {1..modes}^d, coefficients
/// in lexicographic order of k (last axis fastest).
inline Field sine_superposition(const Grid& grid, int modes, const std::vector<double>& coefficients) {
  if (modes < 1) throw ParameterError("modes must be >= 1");
  std::size_t count = 1;
  for (int i = 0; i < grid.dim(); ++i) count *= static_cast<std::size_t>(modes);
  if (coefficients.size() != count) throw ContractError("sine superposition needs modes^dim coefficients");
  // per-axis tables sin(pi k x / L)
  std::array<std::vector<double>, 3> table;
  for (int i = 0; i < grid.dim(); ++i) {
    const int n = grid.resolution(i);
    table[i].resize(static_cast<std::size_t>(modes) * n);
    for (int k = 1; k <= modes; ++k) {
      for (int j = 0; j < n; ++j) {
        table[i][(k - 1) * n + j] = std::sin(std::numbers::pi * k * (j + 1) / (n + 1));
      }
    }
  }
  Field u(grid);
  auto uv = u.values();
  for (std::size_t node = 0; node < uv.size(); ++node) {
    const auto idx = grid.node_multi_index(node);
    double s = 0.0;
    for (std::size_t m = 0; m < count; ++m) {
      std::size_t rest = m;
      double term = coefficients[m];
      for (int i = grid.dim() - 1; i >= 0; --i) {
        const int k = static_cast<int>(rest % modes);
        rest /= modes;
        term *= table[i][static_cast<std::size_t>(k) * grid.resolution(i) + idx[i]];
      }
      s += term;
    }
    uv[node] = s;
  }
  return u;
}

/// Seeded superposition of the first `modes` sine modes per axis with
/// coefficients uniform in [-1, 1]; absolute value taken when nonnegative.
inline Field random_init(const Grid& grid, std::uint64_t seed, int modes, bool nonnegative = true) {
  if (modes < 1) throw ParameterError("modes must be >= 1");
  std::size_t count = 1;
  for (int i = 0; i < grid.dim(); ++i) count *= static_cast<std::size_t>(modes);
  std::mt19937_64 gen(seed);
  auto uniform = [&] { return 2.0 * (static_cast<double>(gen() >> 11) * 0x1p-53) - 1.0; };
  for (;;) {
    std::vector<double> c(count);
    for (double& v : c) v = uniform();
    Field u = sine_superposition(grid, modes, c);
    if (nonnegative) {
      for (double& v : u.values()) v = std::abs(v);
    }
    if (!u.is_zero()) return u;
  }
}

/// true iff max ambient norm along the trace is at most 10 x its median.
inline bool boundedness_monitor(const SolveReport& report) {
  const auto& h = report.norm_history;
  if (h.size() <= 1) return true;
  std::vector<double> sorted = h;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  const double median = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  return sorted.back() <= 10.0 * median;
}

namespace detail {

inline void apply_mask(Field& u, const std::vector<std::uint8_t>& mask) {
  if (mask.empty()) return;
  if (mask.size() != u.size()) throw ContractError("free-node mask size mismatch");
  auto v = u.values();
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (!mask[k]) v[k] = 0.0;
  }
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace detail

inline SolveReport minimize(const Functional& F, const Field& init, const SolveOptions& opts) {
  opts.validate();
  const Grid& grid = F.grid();
  if (!(init.grid() == grid)) throw ContractError("initial field does not live on the functional's grid");

  Field w = init;
  detail::apply_mask(w, opts.free_mask);
  if (w.is_zero()) throw DegenerateDirectionError("initial field vanishes on the free nodes");
  w *= 1.0 / F.ambient_norm(w);

  std::optional<LaplacianPreconditioner> lap;
  if (opts.preconditioner == PreconditionerKind::inverse_laplacian) lap.emplace(grid, opts.free_mask);
  auto precondition = [&](Field r) {
    detail::apply_mask(r, opts.free_mask);
    return lap ? lap->apply(r) : r;
  };

  ProjectionOptions popt;
  popt.tol = opts.projection_tolerance;
  popt.scan_points = 0;
  auto project = [&](const Field& dir, double hint) {
    if (hint > 0.0) {
      popt.bracket_lo = 0.25 * hint;
      popt.bracket_hi = 4.0 * hint;
    }
    const RayProfile ray = F.ray(dir);
    const double t = project_ray(ray, F.homogeneity_exponent(), popt).t;
    return std::make_pair(t, ray.value(t));
  };

  SolveReport rep{Field(grid)};
  rep.seed = opts.seed;
  auto [t, psi] = project(w, 0.0);  // a violation here propagates with its trace
  double step = opts.armijo.initial_step;
  double p_norm = 0.0;

  for (int k = 0;; ++k) {
    const Field u = t * w;
    auto parts = F.residual_parts(u);
    Field R = parts.principal - parts.source;
    detail::apply_mask(R, opts.free_mask);
    const Field z = precondition(R);
    const double r_norm = std::sqrt(std::max(0.0, inner(R, z)));
    // The normalizer drifts slowly; refresh it at the start and near the stopping test.
    if (k == 0 || r_norm <= 10.0 * opts.residual_tolerance * p_norm) {
      p_norm = std::sqrt(std::max(0.0, inner(parts.principal, precondition(parts.principal))));
    }
    rep.final_residual = p_norm > 0.0 ? r_norm / p_norm : r_norm;
    rep.t_history.push_back(t);
    rep.energy_history.push_back(psi);
    rep.norm_history.push_back(F.ambient_norm(u));
    rep.iterations = k;
    rep.ground_state = u;

    if (rep.final_residual <= opts.residual_tolerance) {
      rep.converged = true;
      rep.status = "converged";
      break;
    }
    if (k >= opts.max_iterations) {
      rep.status = "max_iterations";
      break;
    }

    // Step in w such that s = 1 moves u by the preconditioned residual.
    Field d = z;
    d *= -1.0 / t;
    d = axpy(d, -inner(d, w) / inner(w, w), w);
    const double slope = t * inner(R, d);
    if (!(slope < 0.0)) {
      rep.status = "stalled";
      break;
    }

    bool accepted = false;
    double s = step;
    for (int b = 0; b < opts.armijo.max_backtracks; ++b, s *= opts.armijo.shrink) {
      Field trial = axpy(w, s, d);
      const double nrm = F.ambient_norm(trial);
      if (!(nrm > 0.0) || !std::isfinite(nrm)) continue;
      trial *= 1.0 / nrm;
      std::pair<double, double> proj;
      try {
        proj = project(trial, t);
      } catch (const HypothesisViolation&) {
        continue;
      }
      const double predicted = opts.armijo.slope_fraction * s * slope;
      // Once the predicted decrease is below roundoff of Psi, any non-increase is accepted.
      const bool noise_regime = -predicted < 1e-13 * std::abs(psi);
      if (proj.second <= psi + predicted || (noise_regime && proj.second <= psi)) {
        w = std::move(trial);
        t = proj.first;
        psi = proj.second;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      rep.status = "stalled";
      break;
    }
    step = std::min(opts.armijo.initial_step, 2.0 * s);
  }

  const Field& u0 = rep.ground_state;
  rep.c_value = F.energy(u0);
  double lo = 0.0;
  for (double v : u0.values()) lo = std::min(lo, v);
  rep.min_negative_part = lo;

  auto& summary = rep.hypothesis_summary;
  summary.add("solver.bounded", boundedness_monitor(rep) ? CheckStatus::pass : CheckStatus::fail,
              "max ambient norm along the trace within 10x its median",
              boundedness_monitor(rep) ? std::nullopt : std::optional<std::string>("norm trace diverges"));
  {
    const auto dec = F.decompose(u0);
    const double g = dec.J0 - dec.J;
    const double scale = dec.J0 + dec.J;
    const bool ok = std::abs(g) <= 1e-8 * scale;
    summary.add("solver.nehari", ok ? CheckStatus::pass : CheckStatus::fail,
                "|Phi'(u)u| <= 1e-8 (J0 + J) at the reported state",
                ok ? std::nullopt : std::optional<std::string>("Phi'(u)u = " + detail::format_double(g)));
  }
  if (F.family() == Family::kirchhoff) {
    const auto& M = std::get<KirchhoffOperator>(F.op()).M;
    double worst = std::numeric_limits<double>::infinity();
    for (double n : rep.norm_history) worst = std::min(worst, M.M(n * n));
    const bool ok = worst >= M.m0();
    summary.add("solver.kirchhoff_m0", ok ? CheckStatus::pass : CheckStatus::fail,
                "m0 <= M(||u_k||^2) along the trace; min = " + detail::format_double(worst),
                ok ? std::nullopt : std::optional<std::string>(detail::format_double(worst)));
  }
  if (grid.dim() == 1) {
    Field a = u0;
    for (double& v : a.values()) v = std::abs(v);
    const double ea = F.energy(a);
    const bool ok = ea <= rep.c_value + 1e-10;
    summary.add("solver.abs", ok ? CheckStatus::pass : CheckStatus::fail, "Phi(|u|) <= Phi(u) + 1e-10",
                ok ? std::nullopt : std::optional<std::string>("Phi(|u|) = " + detail::format_double(ea)));
  } else {
    summary.add("solver.abs", CheckStatus::not_evaluated,
                "forward differences do not commute with |.| off the axis; min_negative_part = " +
                    detail::format_double(rep.min_negative_part));
  }
  return rep;
}

/// Best of n seeded runs (seeds base_seed + k). Smallest converged c wins,
/// ties go to the smaller seed; spread = max - min over converged c.
inline SolveReport multi_start(const Functional& F, int n_starts, std::uint64_t base_seed, const SolveOptions& opts) {
  if (n_starts < 1) throw ConfigurationError("n_starts must be >= 1");
  opts.validate();
  std::vector<std::future<SolveReport>> runs;
  for (int k = 0; k < n_starts; ++k) {
    runs.push_back(std::async(std::launch::async, [&F, &opts, seed = base_seed + k] {
      SolveOptions o = opts;
      o.seed = seed;
      return minimize(F, random_init(F.grid(), seed, o.modes, o.nonnegative_start), o);
    }));
  }
  std::vector<SolveReport> done;
  std::vector<std::string> statuses;
  std::optional<std::string> first_error;
  for (int k = 0; k < n_starts; ++k) {
    try {
      done.push_back(runs[k].get());
      statuses.push_back("seed " + std::to_string(base_seed + k) + ": " + done.back().status);
    } catch (const std::exception& e) {
      statuses.push_back("seed " + std::to_string(base_seed + k) + ": error: " + e.what());
      if (!first_error) first_error = e.what();
    }
  }
  const SolveReport* best = nullptr;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  int converged = 0;
  for (const auto& r : done) {
    if (!r.converged) continue;
    ++converged;
    lo = std::min(lo, r.c_value);
    hi = std::max(hi, r.c_value);
    if (!best || r.c_value < best->c_value || (r.c_value == best->c_value && r.seed < best->seed)) best = &r;
  }
  if (!best) {
    const SolveReport* fallback = nullptr;
    for (const auto& r : done) {
      if (!fallback || r.c_value < fallback->c_value) fallback = &r;
    }
    std::string msg = "no run converged";
    for (const auto& s : statuses) msg += "; " + s;
    std::optional<SolveReport> best_failed;
    if (fallback) best_failed = *fallback;
    throw MultiStartFailure(msg, statuses, best_failed);
  }
  SolveReport out = *best;
  out.spread = hi - lo;
  out.n_converged = converged;
  return out;
}

}  // namespace nehari
