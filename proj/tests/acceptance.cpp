// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "nehari/fiber.hpp"
#include "nehari/solver.hpp"
#include "nehari/verify.hpp"

using namespace nehari;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[fail: " << what << "] ";
    }
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Nonlinearity power(double alpha) { return Nonlinearity::pure_power(alpha); }

double max_abs(const Field& u) {
  double m = 0.0;
  for (double v : u.values()) m = std::max(m, std::abs(v));
  return m;
}

double nodal_power_integral(const Field& u, double alpha) {
  double s = 0.0;
  for (double v : u.values()) s += std::pow(std::abs(v), alpha);
  return s * u.grid().cell_volume();
}

std::vector<KirchhoffCoefficient> catalogue_M() {
  return {KirchhoffCoefficient::affine(1.0, 1.0), KirchhoffCoefficient::logarithmic(1.0),
          KirchhoffCoefficient::power_sum(1.0, {{1.0, 0.5}})};
}

struct Named {
  std::string name;
  Functional F;
};

std::vector<Named> catalogue(const Grid& g) {
  std::vector<Named> out;
  for (double p : {2.0, 3.0}) {
    const double alpha = p + 2.0;
    out.push_back({"one p=" + std::to_string(int(p)), Functional(g, QuasilinearOperator::constant_one(p, 2.0), power(alpha))});
    out.push_back({"p_plus_q p=" + std::to_string(int(p)), Functional(g, QuasilinearOperator::p_plus_q(p, 2.0), power(alpha))});
  }
  for (const auto& M : catalogue_M()) out.push_back({M.name(), Functional(g, KirchhoffOperator{M}, power(5.0))});
  out.push_back({"aniso(2,2)", Functional(g, AnisotropicOperator({2.0, 2.0}), power(4.0))});
  out.push_back({"aniso(1.8,2.2)", Functional(g, AnisotropicOperator({1.8, 2.2}), power(4.0))});
  return out;
}

const Grid& square(int n) {
  static const Grid g64 = build_grid(2, {1.0, 1.0}, {64, 64});
  static const Grid g32 = build_grid(2, {1.0, 1.0}, {32, 32});
  return n == 64 ? g64 : g32;
}

// 1. one sign change and the maximum at t_u along 20 directions per functional
void fiber_uniqueness(Outcome& o) {
  const auto t0 = Clock::now();
  int directions = 0;
  for (const auto& [name, F] : catalogue(square(64))) {
    for (std::uint64_t s = 0; s < 20; ++s) {
      const Field u = random_init(F.grid(), s, 3, false);
      const auto proj = project_to_nehari(F, u);
      const auto& d = proj.diagnostics;
      const double peak = F.energy(proj.t * u);
      bool below = true;
      for (const auto& pt : d.scan) below = below && pt.gamma <= peak + 1e-12 * std::abs(peak);
      o.require(d.scan.size() == 200 && d.sign_changes_observed == 1, name + " seed " + std::to_string(s) + " sign changes");
      o.require(below, name + " seed " + std::to_string(s) + " maximum");
      ++directions;
    }
  }
  const double secs = seconds_since(t0);
  o.require(secs < 30.0, "runtime");
  o.detail << directions << " directions over 9 functionals at 64x64 in " << secs << " s";
}

// 2. closed-form projection for a = 1, p = 2, f = t^3
void closed_form_projection(Outcome& o) {
  const Grid& g = square(64);
  const Functional F(g, QuasilinearOperator::constant_one(2.0), power(4.0));
  double worst = 0.0;
  for (std::uint64_t s = 100; s < 150; ++s) {
    const Field u = random_init(g, s, 4, false);
    const double exact = std::sqrt(std::pow(seminorm(u, 2.0), 2) / nodal_power_integral(u, 4.0));
    worst = std::max(worst, std::abs(project_to_nehari(F, u).t - exact) / exact);
  }
  o.require(worst <= 1e-8, "relative error");
  o.detail << "50 directions, max relative error " << worst;
}

// 3. pairing against a fourth-order central difference of the energy
void gradient_consistency(Outcome& o) {
  double worst = 0.0;
  for (const auto& [name, F] : catalogue(square(32))) {
    for (std::uint64_t s = 0; s < 50; ++s) {
      const Field u = random_init(F.grid(), 2 * s + 1, 3, false);
      const Field v = random_init(F.grid(), 2 * s + 2, 3, false);
      const double h = 1e-3;
      auto E = [&](double e) { return F.energy(axpy(u, e, v)); };
      const double fd = (8.0 * (E(h) - E(-h)) - (E(2 * h) - E(-2 * h))) / (12.0 * h);
      const double P = F.pairing(u, v);
      const double rel = std::abs(fd - P) / std::max(std::abs(P), 1e-300);
      worst = std::max(worst, rel);
      o.require(rel <= 1e-5, name + " seed " + std::to_string(s));
    }
  }
  o.detail << "450 pairs, max relative error " << worst;
}

// 4. default 2D run and the 1D multi-start spread
void ground_state_run(Outcome& o) {
  const Grid& g = square(64);
  const Functional F(g, QuasilinearOperator::constant_one(2.0), power(4.0));
  SolveOptions opt;
  const SolveReport r = minimize(F, random_init(g, opt.seed, opt.modes), opt);
  bool monotone = true;
  for (std::size_t k = 1; k < r.energy_history.size(); ++k) monotone = monotone && r.energy_history[k] <= r.energy_history[k - 1];
  o.require(r.converged, "converged");
  o.require(r.final_residual <= 1e-7, "residual");
  o.require(r.c_value > 0.0, "c > 0");
  o.require(r.min_negative_part >= -1e-8 * max_abs(r.ground_state), "negative part");
  o.require(monotone, "monotone energy");

  const Grid line = build_grid(1, {1.0}, {400});
  const SolveReport m = multi_start(Functional(line, QuasilinearOperator::constant_one(2.0), power(4.0)), 8, 1, opt);
  o.require(m.spread <= 1e-4 * m.c_value, "spread");
  o.detail << "2D c = " << r.c_value << " in " << r.iterations << " iterations, residual " << r.final_residual
           << "; 1D spread/c = " << m.spread / m.c_value;
}

// 5. semilinear ground states against the shooting oracle
void oracle_equivalence(Outcome& o) {
  const Grid line = build_grid(1, {1.0}, {400});
  const Functional F1(line, QuasilinearOperator::constant_one(2.0), power(4.0));
  const SolveReport r1 = minimize(F1, random_init(line, 1, 2), SolveOptions{});
  const RadialProfile p1 = radial_shooting(power(4.0), 1, 0.5);
  double linf = 0.0;
  for (std::size_t k = 0; k < line.node_count(); ++k) {
    linf = std::max(linf, std::abs(r1.ground_state[k] - p1.at(line.position(k)[0] - 0.5)));
  }
  const double rel1 = linf / p1.shooting_height();
  o.require(r1.converged && rel1 <= 0.01, "1D L-infinity");

  const Grid cube = build_grid(3, {2.0, 2.0, 2.0}, {48, 48, 48});
  const Functional F3(cube, QuasilinearOperator::constant_one(2.0), power(4.0));
  SolveOptions opt;
  opt.free_mask = ball_mask(cube, {1.0, 1.0, 1.0}, 1.0);
  Field init = random_init(cube, 1, 2);
  for (std::size_t k = 0; k < init.size(); ++k) {
    if (!opt.free_mask[k]) init[k] = 0.0;
  }
  const SolveReport r3 = minimize(F3, init, opt);
  const RadialProfile p3 = radial_shooting(power(4.0), 3, 1.0);
  const double rel3 = std::abs(r3.c_value - p3.energy()) / p3.energy();
  o.require(r3.converged && rel3 <= 0.02, "3D ball energy");
  o.detail << "1D sup error / height " << rel1 << "; 3D c = " << r3.c_value << " vs " << p3.energy()
           << " (relative " << rel3 << ")";
}

// 6. reductions between families
void family_reductions(Outcome& o) {
  const Grid& g = square(32);
  double worst_q = 0.0, worst_a = 0.0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    const Field u = random_init(g, s, 4, false);
    for (double p : {1.5, 2.0, 3.0}) {
      const Functional F(g, QuasilinearOperator::constant_one(p), power(4.0));
      const double standalone = std::pow(seminorm(u, p), p) / p - nodal_power_integral(u, 4.0) / 4.0;
      worst_q = std::max(worst_q, std::abs(F.energy(u) - standalone) / std::abs(standalone));
    }
    const Functional A(g, AnisotropicOperator({2.0, 2.0}), power(4.0));
    const Functional L(g, QuasilinearOperator::constant_one(2.0), power(4.0));
    worst_a = std::max(worst_a, std::abs(A.energy(u) - L.energy(u)) / std::abs(L.energy(u)));
  }
  o.require(worst_q <= 1e-12, "a = 1 against standalone p-Laplacian");
  o.require(worst_a <= 1e-12, "anisotropic (2,2) against p = 2");

  const Grid& g64 = square(64);
  SolveOptions opt;
  const Field init = random_init(g64, opt.seed, opt.modes);
  const SolveReport semi = minimize(Functional(g64, QuasilinearOperator::constant_one(2.0), power(4.0)), init, opt);
  const SolveReport kir =
      minimize(Functional(g64, KirchhoffOperator{KirchhoffCoefficient::affine(1e-12, 1.0)}, power(4.0)), init, opt);
  const double rel = std::abs(kir.c_value - semi.c_value) / semi.c_value;
  o.require(semi.converged && kir.converged && rel <= 1e-3, "Kirchhoff limit");
  o.detail << "a = 1 max rel " << worst_q << ", (2,2) max rel " << worst_a << ", Kirchhoff c relative gap " << rel;
}

// 7. hypothesis checks on the catalogue and the three counterexamples
void hypothesis_suite(Outcome& o) {
  int combos = 0;
  auto clean = [&](const CheckReport& r, const std::string& label) {
    ++combos;
    o.require(!r.any_fail(), label);
  };
  for (double p : {2.0, 3.0}) {
    for (int d : {1, 2, 3}) {
      const double ps = sobolev_exponent(p, d);
      const double alpha = std::isinf(ps) ? p + 2.0 : 0.5 * (p + ps);
      clean(check_quasilinear(QuasilinearOperator::constant_one(p, 2.0), alpha, power(alpha), d), "one");
      clean(check_quasilinear(QuasilinearOperator::p_plus_q(p, 2.0), alpha, power(alpha), d), "p_plus_q");
    }
  }
  for (const auto& M : catalogue_M()) clean(check_kirchhoff(M, 5.0, power(5.0)), M.name());
  clean(check_anisotropic({1.8, 2.2}, 4.0, power(4.0), 2), "aniso(1.8,2.2)");
  clean(check_anisotropic({2.0, 2.0, 2.0}, 4.0, power(4.0), 3), "aniso(2,2,2)");

  // sum 1/p_i = 1 exactly: the strict inequality excludes it, so the sum precondition must flag it
  const auto border = check_anisotropic({2.0, 2.0}, 4.0, power(4.0), 2);
  o.require(border.failed_ids() == std::vector<std::string>{"c3.pre.sum"}, "aniso(2,2) flags only the sum");

  auto designated = [&](const CheckReport& r, const std::string& id) {
    const CheckEntry* e = r.find(id);
    const bool ok = e && e->status == CheckStatus::fail && e->witness && !e->witness->empty();
    o.require(ok, id);
    if (ok) o.detail << id << " witness \"" << *e->witness << "\"; ";
  };
  designated(check_quasilinear(QuasilinearOperator::constant_one(2.0), 4.0,
                               Nonlinearity::signed_sum({{1.0, 4.0}, {-2.0, 2.0}}), 3),
             "f.sign");
  designated(check_kirchhoff(KirchhoffCoefficient::custom(
                                 "exp", [](double t) { return std::exp(t); }, [](double t) { return std::expm1(t); }),
                             5.0, power(5.0)),
             "c2.2");
  designated(check_anisotropic({4.0, 4.0, 4.0}, 5.0, power(5.0), 3), "c3.pre.sum");
  o.detail << combos << " catalogue combinations clean; (2,2) in 2D flagged at the sum boundary";
}

// 8. Simon inequality sampler
void simon(Outcome& o) {
  const auto t0 = Clock::now();
  const auto s2 = simon_sample(2.0, 10000, 3, 1);
  o.require(std::abs(s2.min_ratio - 1.0) <= 1e-12, "p = 2 ratio");
  double max2 = 0.0;
  {
    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int k = 0; k < 10000; ++k) {
      std::vector<double> x{U(gen), U(gen), U(gen)}, y{U(gen), U(gen), U(gen)};
      max2 = std::max(max2, std::abs(simon_ratio(2.0, x, y) - 1.0));
    }
  }
  o.require(max2 <= 1e-12, "p = 2 identically one");
  for (double p : {2.5, 3.0, 4.0}) {
    const auto s = simon_sample(p, 100000, 3, 2);
    o.require(s.min_ratio > 0.0, "p = " + std::to_string(p));
    o.detail << "p=" << p << " min " << s.min_ratio << "; ";
  }
  const double secs = seconds_since(t0);
  o.require(secs < 5.0, "runtime");
  o.detail << "p=2 max deviation " << max2 << ", " << secs << " s";
}

// 9. Kirchhoff bounds: Mhat >= M t / 2 and M(t) <= M(1) t + C with C fixed on [0, 1]
void kirchhoff_bounds(Outcome& o) {
  const auto ts = detail::log_samples(1e-6, 1e6, 40);
  for (const auto& M : catalogue_M()) {
    double C = M.M(0.0);
    for (double t : ts) {
      if (t <= 1.0) C = std::max(C, M.M(t) - M.M(1.0) * t);
    }
    for (double t : ts) {
      const double lhs = M.Mhat(t), rhs = 0.5 * M.M(t) * t;
      o.require(lhs >= rhs - 1e-12 * (std::abs(lhs) + std::abs(rhs)), M.name() + " primitive bound");
      const double bound = M.M(1.0) * t + C;
      o.require(M.M(t) <= bound + 1e-12 * (std::abs(bound) + std::abs(M.M(t))), M.name() + " linear growth");
    }
    o.detail << M.name() << " C = " << C << "; ";
  }
  o.detail << ts.size() << " samples each";
}

// 10. scaling covariance, evenness, and the sign-flipped solve
void covariance_and_evenness(Outcome& o) {
  double worst_t = 0.0;
  for (const auto& [name, F] : catalogue(square(32))) {
    const Field u = random_init(F.grid(), 11, 3, false);
    const double tu = project_to_nehari(F, u).t;
    for (double s : {0.5, 2.0, 10.0}) {
      worst_t = std::max(worst_t, std::abs(project_to_nehari(F, s * u).t - tu / s) / (tu / s));
    }
    o.require(F.energy(-u) == F.energy(u), name + " evenness");
  }
  o.require(worst_t <= 1e-8, "scaling");

  const Grid& g = square(64);
  const Functional F(g, QuasilinearOperator::constant_one(2.0), power(4.0));
  SolveOptions opt;
  const Field init = random_init(g, opt.seed, opt.modes);
  const SolveReport a = minimize(F, init, opt);
  const SolveReport b = minimize(F, -init, opt);
  const double rel = std::abs(a.c_value - b.c_value) / a.c_value;
  o.require(rel <= 1e-8, "sign-flipped solve");
  o.detail << "scaling max rel " << worst_t << ", sign-flipped c relative gap " << rel;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<void(Outcome&)>>> criteria = {
      {"fiber uniqueness and maximum", fiber_uniqueness},
      {"closed-form projection", closed_form_projection},
      {"gradient consistency", gradient_consistency},
      {"ground-state run properties", ground_state_run},
      {"shooting oracle equivalence", oracle_equivalence},
      {"family reductions", family_reductions},
      {"hypothesis suite", hypothesis_suite},
      {"Simon sampler", simon},
      {"Kirchhoff bounds", kirchhoff_bounds},
      {"scaling covariance and evenness", covariance_and_evenness}};
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    const auto t0 = Clock::now();
    try {
      criteria[k].second(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "[exception: " << e.what() << "]";
    }
    if (!o.pass) ++failures;
    std::printf("criterion %zu %s: %s  (%.1f s)  %s\n", k + 1, criteria[k].first, o.pass ? "PASS" : "FAIL",
                seconds_since(t0), o.detail.str().c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
