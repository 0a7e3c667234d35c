#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <set>

#include "nehari/verify.hpp"

using namespace nehari;

namespace {

Nonlinearity power(double alpha) { return Nonlinearity::pure_power(alpha); }

void expect_no_fail(const CheckReport& r, const std::string& label) {
  for (const auto& e : r.entries()) {
    EXPECT_NE(e.status, CheckStatus::fail) << label << ": " << e.id << " " << e.witness.value_or("") << " " << e.notes;
  }
  std::set<std::string> ids;
  for (const auto& e : r.entries()) EXPECT_TRUE(ids.insert(e.id).second) << "duplicate " << e.id;
}

void expect_fail_with_witness(const CheckReport& r, const std::string& id) {
  const CheckEntry* e = r.find(id);
  ASSERT_NE(e, nullptr) << id;
  EXPECT_EQ(e->status, CheckStatus::fail) << id;
  ASSERT_TRUE(e->witness.has_value()) << id;
  EXPECT_FALSE(e->witness->empty());
  EXPECT_NE(*e->witness, "(none recorded)");
}

}  // namespace

TEST(SobolevExponent, Arithmetic) {
  EXPECT_DOUBLE_EQ(sobolev_exponent(2.0, 3), 6.0);
  EXPECT_DOUBLE_EQ(sobolev_exponent(1.5, 3), 3.0);
  EXPECT_TRUE(std::isinf(sobolev_exponent(2.0, 2)));
  EXPECT_TRUE(std::isinf(sobolev_exponent(3.0, 3)));
}

TEST(CheckQuasilinear, LaplacianCatalogueInThreeDimensions) {
  const auto r = check_quasilinear(QuasilinearOperator::constant_one(2.0, 2.0), 4.0, power(4.0), 3);
  expect_no_fail(r, "a=1");
  EXPECT_EQ(r.status("c1.pre"), CheckStatus::pass);
  EXPECT_EQ(r.status("c1.S+"), CheckStatus::assumed);
  EXPECT_EQ(r.status("c1.conv"), CheckStatus::sampled_pass);
  EXPECT_NE(r.find("c1.1")->notes.find("k0"), std::string::npos);
  for (const char* id : {"c1.1", "c1.2", "c1.3", "c1.4", "c1.5", "c1.6", "c1.7", "f.sign"}) {
    EXPECT_EQ(r.status(id), CheckStatus::sampled_pass) << id;
  }
}

TEST(CheckQuasilinear, PPlusQFitsUnitConstants) {
  const auto r = check_quasilinear(QuasilinearOperator::p_plus_q(3.0, 2.0), 5.0, power(5.0), 3);
  expect_no_fail(r, "p+q");
  EXPECT_NE(r.find("c1.1")->notes.find("k0 = 1, k1 = 1"), std::string::npos) << r.find("c1.1")->notes;
}

TEST(CheckQuasilinear, CatalogueCombinationsPass) {
  for (double p : {2.0, 3.0}) {
    for (int d : {1, 2, 3}) {
      const double ps = sobolev_exponent(p, d);
      const double alpha = std::isinf(ps) ? p + 2.0 : 0.5 * (p + ps);
      expect_no_fail(check_quasilinear(QuasilinearOperator::constant_one(p, 2.0), alpha, power(alpha), d), "one");
      expect_no_fail(check_quasilinear(QuasilinearOperator::p_plus_q(p, 2.0), alpha, power(alpha), d), "pq");
    }
  }
}

TEST(CheckQuasilinear, LinearSourceIsNotSuperlinear) {
  const auto r = check_quasilinear(QuasilinearOperator::constant_one(2.0), 2.0, power(2.0), 3);
  expect_fail_with_witness(r, "c1.5");
}

TEST(CheckQuasilinear, CubicMinusLinearFailsNearZero) {
  const auto f = Nonlinearity::signed_sum({{1.0, 4.0}, {-2.0, 2.0}});
  const auto r = check_quasilinear(QuasilinearOperator::constant_one(2.0), 4.0, f, 3);
  expect_fail_with_witness(r, "c1.4");
  expect_fail_with_witness(r, "f.sign");
}

TEST(CheckQuasilinear, GrowthOutsideWindowFailsPrecondition) {
  const auto r = check_quasilinear(QuasilinearOperator::constant_one(2.0), 7.0, power(7.0), 3);
  expect_fail_with_witness(r, "c1.pre");
}

TEST(CheckKirchhoff, CatalogueCoefficientsPass) {
  for (const auto& M : {KirchhoffCoefficient::affine(1.0, 1.0), KirchhoffCoefficient::logarithmic(1.0),
                        KirchhoffCoefficient::power_sum(1.0, {{1.0, 0.5}})}) {
    for (double alpha : {4.5, 5.0, 5.5}) expect_no_fail(check_kirchhoff(M, alpha, power(alpha)), M.name());
  }
}

TEST(CheckKirchhoff, ExponentialCoefficientFailsRatioCondition) {
  const auto M = KirchhoffCoefficient::custom(
      "exp", [](double t) { return std::exp(t); }, [](double t) { return std::expm1(t); });
  const auto r = check_kirchhoff(M, 5.0, power(5.0));
  expect_fail_with_witness(r, "c2.2");
}

TEST(CheckKirchhoff, GrowthOutsideWindowFails) {
  expect_fail_with_witness(check_kirchhoff(KirchhoffCoefficient::affine(1.0, 1.0), 3.5, power(3.5)), "c2.pre");
}

TEST(CheckAnisotropic, IsotropicTripleAndMixedExponents) {
  expect_no_fail(check_anisotropic({2.0, 2.0, 2.0}, 4.0, power(4.0), 3), "(2,2,2)");
  const auto r = check_anisotropic({1.5, 2.0, 2.5}, 3.0, power(3.0), 3);
  expect_no_fail(r, "(1.5,2,2.5)");
  EXPECT_NE(r.find("c3.pre.pN")->notes.find("5.29"), std::string::npos) << r.find("c3.pre.pN")->notes;
  expect_no_fail(check_anisotropic({1.8, 2.2}, 4.0, power(4.0), 2), "(1.8,2.2)");
}

TEST(CheckAnisotropic, LargeExponentsFailTheHarmonicSum) {
  const auto r = check_anisotropic({4.0, 4.0, 4.0}, 5.0, power(5.0), 3);
  expect_fail_with_witness(r, "c3.pre.sum");
  EXPECT_EQ(r.status("c3.3"), CheckStatus::not_evaluated);
  EXPECT_EQ(r.status("c3.pre.alpha"), CheckStatus::not_evaluated);
}

TEST(CheckAnisotropic, RejectsMalformedExponentVectors) {
  EXPECT_THROW(check_anisotropic({2.5, 2.0, 1.5}, 3.0, power(3.0), 3), ParameterError);
  EXPECT_THROW(check_anisotropic({2.0, 2.0}, 3.0, power(3.0), 3), ParameterError);
}

TEST(CheckAbstract, CatalogueFunctionalsSampledPass) {
  const Grid g = build_grid(2, {1.0, 1.0}, {24, 24});
  const std::vector<Functional> fs = {
      Functional(g, QuasilinearOperator::constant_one(2.0), power(4.0)),
      Functional(g, QuasilinearOperator::p_plus_q(3.0, 2.0), power(5.0)),
      Functional(g, KirchhoffOperator{KirchhoffCoefficient::logarithmic(1.0)}, power(5.0)),
      Functional(g, AnisotropicOperator({1.8, 2.2}), power(4.0))};
  for (const auto& F : fs) {
    const auto r = check_abstract(F, 20);
    expect_no_fail(r, "abstract");
    for (const char* id : {"tp.1", "tp.3", "tp.4i", "tp.4ii", "tp.4.unique"}) {
      EXPECT_EQ(r.status(id), CheckStatus::sampled_pass) << id;
    }
    EXPECT_EQ(r.status("tp.2"), CheckStatus::assumed);
    EXPECT_EQ(r.status("tp.5"), CheckStatus::assumed);
  }
}

TEST(CheckAbstract, SignedQuinticBreaksFiberMonotonicity) {
  const Grid g = build_grid(1, {1.0}, {60});
  const Functional F(g, QuasilinearOperator::constant_one(2.0),
                     Nonlinearity::signed_sum({{1.0, 6.0}, {-3.0, 4.0}, {3.0, 2.0}}));
  const auto r = check_abstract(F, 10);
  expect_fail_with_witness(r, "tp.4i");
  EXPECT_NE(r.find("tp.4i")->witness->find("direction"), std::string::npos) << *r.find("tp.4i")->witness;
}

TEST(CheckAbstract, RejectsZeroDirections) {
  const Grid g = build_grid(1, {1.0}, {10});
  EXPECT_THROW(check_abstract(Functional(g, QuasilinearOperator::constant_one(2.0), power(4.0)), 0), ParameterError);
}

TEST(CheckReport, UniqueIdsWitnessesAndJson) {
  CheckReport r;
  r.add("a", CheckStatus::pass, "fine");
  r.add("b", CheckStatus::fail, "broken");
  EXPECT_THROW(r.add("a", CheckStatus::fail), ContractError);
  EXPECT_TRUE(r.any_fail());
  EXPECT_EQ(r.failed_ids(), std::vector<std::string>{"b"});
  ASSERT_TRUE(r.find("b")->witness.has_value());
  const auto j = r.to_json();
  ASSERT_EQ(j.size(), 2u);
  EXPECT_EQ(j[0]["id"], "a");
  EXPECT_EQ(j[0]["status"], "pass");
  EXPECT_TRUE(j[0]["witness"].is_null());
  EXPECT_EQ(j[1]["status"], "fail");
  EXPECT_TRUE(j[1]["witness"].is_string());
  EXPECT_EQ(std::string(to_string(CheckStatus::sampled_pass)), "sampled-pass");
}

TEST(Simon, UnitCasesAndConventions) {
  EXPECT_NEAR(simon_ratio(3.0, {1.0}, {0.0}), 1.0, 1e-15);
  EXPECT_NEAR(simon_ratio(2.0, {0.3, -1.2, 2.0}, {1.0, 0.5, -0.7}), 1.0, 1e-12);
  EXPECT_TRUE(std::isinf(simon_ratio(2.5, {1.0, 2.0}, {1.0, 2.0})));
  EXPECT_THROW(simon_ratio(2.5, {0.0}, {0.0}), ParameterError);
}

TEST(Simon, SampledMinimaArePositive) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto s2 = simon_sample(2.0, 10000, 3, 1);
  EXPECT_NEAR(s2.min_ratio, 1.0, 1e-12);
  for (double p : {2.5, 3.0, 4.0}) {
    const auto s = simon_sample(p, 100000, 3, 2);
    EXPECT_GT(s.min_ratio, 0.0) << p;
    EXPECT_LE(s.min_ratio, 1.0 + 1e-12) << p;
    EXPECT_EQ(s.evaluated + s.degenerate, 100000u);
  }
  EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 5.0);
}

TEST(RadialShooting, OneDimensionalProfileMatchesEllipticCosine) {
  // -u'' = u^3 on (-1/2, 1/2): u = a cn(a x | 1/2) with a = 2 K(1/2)
  const RadialProfile prof = radial_shooting(power(4.0), 1, 0.5);
  EXPECT_NEAR(prof.shooting_height(), 3.70814935460274384, 1e-8);
  EXPECT_NEAR(prof.energy(), 15.7560600107694877, 1e-7);
  EXPECT_NEAR(prof.at(0.5), 0.0, 1e-12);
  EXPECT_NEAR(prof.at(0.0), prof.shooting_height(), 1e-12);
  EXPECT_EQ(prof.dim(), 1);
  for (std::size_t k = 1; k < prof.u().size(); ++k) EXPECT_LE(prof.u()[k], prof.u()[k - 1] + 1e-12);
}

TEST(RadialShooting, ThreeDimensionalBall) {
  const RadialProfile prof = radial_shooting(power(4.0), 3, 1.0);
  EXPECT_GT(prof.shooting_height(), 0.0);
  EXPECT_NEAR(prof.u().back(), 0.0, 1e-8 * prof.shooting_height());
  EXPECT_NEAR(prof.energy(), 25.5931501381, 1e-6);
}

TEST(RadialShooting, RejectsOutsideItsScope) {
  EXPECT_THROW(radial_shooting(Nonlinearity::sum_of_powers({{1.0, 3.0}, {1.0, 4.0}}), 1, 1.0), ParameterError);
  EXPECT_THROW(radial_shooting(power(4.0), 4, 1.0), ParameterError);
  EXPECT_THROW(radial_shooting(power(4.0), 1, -1.0), ParameterError);
}
