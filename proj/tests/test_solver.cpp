#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "fields.hpp"
#include "nehari/preconditioner.hpp"
#include "nehari/solver.hpp"

using namespace nehari;
using nehari::testing::kPi;

namespace {

Functional laplacian_cubic(const Grid& g) {
  return Functional(g, QuasilinearOperator::constant_one(2.0), Nonlinearity::pure_power(4.0));
}

const Grid& square64() {
  static const Grid g = build_grid(2, {1.0, 1.0}, {64, 64});
  return g;
}

/// The default 2D run, shared by several tests.
const SolveReport& default_run() {
  static const SolveReport r = [] {
    const Functional F = laplacian_cubic(square64());
    SolveOptions o;
    return minimize(F, random_init(square64(), o.seed, o.modes), o);
  }();
  return r;
}

double max_abs(const Field& u) {
  double m = 0.0;
  for (double v : u.values()) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

TEST(RandomInit, DeterministicNonzeroAndSignControlled) {
  const Grid g = build_grid(2, {1.0, 2.0}, {15, 20});
  const Field a = random_init(g, 42, 3);
  const Field b = random_init(g, 42, 3);
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(a[k], b[k]);
  EXPECT_FALSE(random_init(g, 43, 3).is_zero());
  for (double v : a.values()) EXPECT_GE(v, 0.0);
  const Field c = random_init(g, 42, 3, false);
  EXPECT_TRUE(std::any_of(c.values().begin(), c.values().end(), [](double v) { return v < 0.0; }));
  for (std::uint64_t s = 0; s < 50; ++s) EXPECT_FALSE(random_init(g, s, 1).is_zero());
}

TEST(SineSuperposition, SingleModeIsTheProductSine) {
  const Grid g = build_grid(2, {1.0, 2.0}, {9, 11});
  const Field u = sine_superposition(g, 1, {1.0});
  for (std::size_t k = 0; k < u.size(); ++k) {
    const auto x = g.position(k);
    EXPECT_NEAR(u[k], std::sin(kPi * x[0]) * std::sin(kPi * x[1] / 2.0), 1e-14);
  }
  EXPECT_THROW(sine_superposition(g, 2, {1.0, 2.0}), ContractError);
  EXPECT_THROW(sine_superposition(g, 0, {}), ParameterError);
}

TEST(Preconditioner, InvertsTheDirichletLaplacian) {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> U(-1, 1);
  for (int d = 1; d <= 3; ++d) {
    const Grid g = build_grid(d, std::vector<double>(d, 1.5), std::vector<int>(d, d == 3 ? 9 : 17));
    LaplacianPreconditioner P(g);
    Field r(g);
    for (auto& v : r.values()) v = U(gen);
    const Field z = P.apply(r);
    const auto back = P.laplacian({z.values().begin(), z.values().end()});
    for (std::size_t k = 0; k < r.size(); ++k) EXPECT_NEAR(back[k], r[k], 1e-10) << "d=" << d;
  }
}

TEST(Preconditioner, MaskedSolveInvertsOnFreeNodes) {
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> U(-1, 1);
  const Grid g = build_grid(2, {2.0, 2.0}, {31, 31});
  const auto mask = ball_mask(g, {1.0, 1.0, 0.0}, 0.8);
  LaplacianPreconditioner P(g, mask);
  Field r(g);
  for (auto& v : r.values()) v = U(gen);
  const Field z = P.apply(r);
  const auto back = P.laplacian({z.values().begin(), z.values().end()});
  for (std::size_t k = 0; k < r.size(); ++k) {
    if (mask[k]) {
      EXPECT_NEAR(back[k], r[k], 1e-7);
    } else {
      EXPECT_EQ(z[k], 0.0);
    }
  }
}

TEST(Minimize, DefaultSquareRunProperties) {
  const SolveReport& r = default_run();
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.status, "converged");
  EXPECT_GT(r.c_value, 0.0);
  EXPECT_LE(r.final_residual, 1e-7);
  EXPECT_GE(r.min_negative_part, -1e-10);
  for (std::size_t k = 1; k < r.energy_history.size(); ++k) {
    EXPECT_LE(r.energy_history[k], r.energy_history[k - 1]) << "iteration " << k;
  }
  EXPECT_EQ(r.t_history.size(), r.energy_history.size());
  EXPECT_EQ(r.norm_history.size(), r.energy_history.size());
  EXPECT_EQ(r.hypothesis_summary.status("solver.bounded"), CheckStatus::pass);
  EXPECT_EQ(r.hypothesis_summary.status("solver.nehari"), CheckStatus::pass);
  EXPECT_EQ(r.hypothesis_summary.status("solver.abs"), CheckStatus::not_evaluated);
  EXPECT_NEAR(r.c_value, 37.7374767027, 1e-6 * r.c_value);  // regression baseline
  const Functional F = laplacian_cubic(square64());
  EXPECT_NEAR(F.energy(r.ground_state), r.c_value, 1e-14 * r.c_value);
}

TEST(Minimize, RestartFromGroundStateIsAFixedPoint) {
  const SolveReport& r0 = default_run();
  const Functional F = laplacian_cubic(square64());
  const SolveReport r1 = minimize(F, r0.ground_state, SolveOptions{});
  EXPECT_TRUE(r1.converged);
  EXPECT_LE(r1.iterations, 2);
  EXPECT_NEAR(r1.c_value, r0.c_value, 1e-10 * r0.c_value);
}

TEST(Minimize, SignFlippedStartReachesTheSameLevel) {
  const SolveReport& r0 = default_run();
  const Functional F = laplacian_cubic(square64());
  SolveOptions o;
  const SolveReport r1 = minimize(F, -random_init(square64(), o.seed, o.modes), o);
  EXPECT_TRUE(r1.converged);
  EXPECT_NEAR(r1.c_value, r0.c_value, 1e-8 * r0.c_value);
  EXPECT_LE(max_abs(r1.ground_state + r0.ground_state), 1e-5 * max_abs(r0.ground_state));
}

TEST(Minimize, GroundStateIsSymmetricUnderDiagonalReflection) {
  const Field& u = default_run().ground_state;
  const Grid& g = u.grid();
  double diff = 0.0, norm = 0.0;
  for (int i = 0; i < 64; ++i) {
    for (int j = 0; j < 64; ++j) {
      const double a = u[g.node_index(i, j)];
      const double b = u[g.node_index(j, i)];
      diff += (a - b) * (a - b);
      norm += a * a;
    }
  }
  EXPECT_LE(std::sqrt(diff / norm), 1e-5);
}

TEST(Minimize, OneDimensionalRunSatisfiesAbsoluteValueCheck) {
  const Grid g = build_grid(1, {1.0}, {200});
  const Functional F = laplacian_cubic(g);
  SolveOptions o;
  const SolveReport r = minimize(F, random_init(g, 3, 2), o);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.hypothesis_summary.status("solver.abs"), CheckStatus::pass);
}

TEST(Minimize, KirchhoffRunKeepsCoefficientAboveM0) {
  const Grid g = build_grid(2, {1.0, 1.0}, {32, 32});
  const Functional F(g, KirchhoffOperator{KirchhoffCoefficient::affine(1.0, 1.0)}, Nonlinearity::pure_power(5.0));
  const SolveReport r = minimize(F, random_init(g, 1, 2), SolveOptions{});
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.hypothesis_summary.status("solver.kirchhoff_m0"), CheckStatus::pass);
  EXPECT_EQ(r.hypothesis_summary.status("solver.nehari"), CheckStatus::pass);
}

TEST(Minimize, MaskedNodesStayClamped) {
  const Grid g = build_grid(2, {2.0, 2.0}, {31, 31});
  const Functional F = laplacian_cubic(g);
  SolveOptions o;
  o.free_mask = ball_mask(g, {1.0, 1.0, 0.0}, 1.0);
  const SolveReport r = minimize(F, random_init(g, 1, 2), o);
  EXPECT_TRUE(r.converged);
  for (std::size_t k = 0; k < g.node_count(); ++k) {
    if (!o.free_mask[k]) {
      EXPECT_EQ(r.ground_state[k], 0.0);
    }
  }
}

TEST(Minimize, UnpreconditionedRunStillDescends) {
  const Grid g = build_grid(1, {1.0}, {30});
  const Functional F = laplacian_cubic(g);
  SolveOptions o;
  o.preconditioner = PreconditionerKind::none;
  o.max_iterations = 50;
  const SolveReport r = minimize(F, random_init(g, 1, 2), o);
  for (std::size_t k = 1; k < r.energy_history.size(); ++k) {
    EXPECT_LE(r.energy_history[k], r.energy_history[k - 1]);
  }
}

TEST(Minimize, ContractViolations) {
  const Grid g = build_grid(1, {1.0}, {20});
  const Functional F = laplacian_cubic(g);
  EXPECT_THROW(minimize(F, Field(g), SolveOptions{}), DegenerateDirectionError);
  EXPECT_THROW(minimize(F, Field(build_grid(1, {1.0}, {21})), SolveOptions{}), ContractError);
  SolveOptions bad;
  bad.armijo.shrink = 1.5;
  EXPECT_THROW(minimize(F, random_init(g, 1, 2), bad), ConfigurationError);
  const Functional G(g, QuasilinearOperator::constant_one(2.0), Nonlinearity::signed_sum({{-1.0, 4.0}}));
  EXPECT_THROW(minimize(G, random_init(g, 1, 2), SolveOptions{}), HypothesisViolation);
}

TEST(MultiStart, OneDimensionalSpreadIsTiny) {
  const Grid g = build_grid(1, {1.0}, {400});
  const Functional F = laplacian_cubic(g);
  const SolveReport r = multi_start(F, 8, 1, SolveOptions{});
  EXPECT_EQ(r.n_converged, 8);
  EXPECT_LE(r.spread, 1e-6 * r.c_value);
  EXPECT_GE(r.seed, 1u);
  EXPECT_LE(r.seed, 8u);
}

TEST(MultiStart, SingleStartEqualsMinimize) {
  const Grid g = build_grid(1, {1.0}, {100});
  const Functional F = laplacian_cubic(g);
  SolveOptions o;
  o.seed = 5;
  const SolveReport a = multi_start(F, 1, 5, o);
  const SolveReport b = minimize(F, random_init(g, 5, o.modes), o);
  EXPECT_EQ(a.c_value, b.c_value);
  EXPECT_EQ(a.iterations, b.iterations);
  EXPECT_EQ(a.spread, 0.0);
}

TEST(MultiStart, NoConvergedRunThrowsWithBestAttempt) {
  const Grid g = build_grid(1, {1.0}, {50});
  const Functional F = laplacian_cubic(g);
  SolveOptions o;
  o.max_iterations = 1;
  try {
    multi_start(F, 3, 1, o);
    FAIL() << "expected MultiStartFailure";
  } catch (const MultiStartFailure& e) {
    EXPECT_EQ(e.statuses().size(), 3u);
    ASSERT_TRUE(e.best().has_value());
    EXPECT_FALSE(e.best()->converged);
  }
  EXPECT_THROW(multi_start(F, 0, 1, SolveOptions{}), ConfigurationError);
}

TEST(BoundednessMonitor, VacuousAndDivergingTraces) {
  const Grid g = build_grid(1, {1.0}, {5});
  SolveReport r{Field(g)};
  r.norm_history = {1.0};
  EXPECT_TRUE(boundedness_monitor(r));
  r.norm_history = {1.0, 1.1, 0.9, 1.0, 1.05};
  EXPECT_TRUE(boundedness_monitor(r));
  r.norm_history = {1.0, 1.0, 1.0, 2.0, 1e3};
  EXPECT_FALSE(boundedness_monitor(r));
}
