#include <gtest/gtest.h>

#include <cmath>

#include "gevrey_flow/model.hpp"
#include "oracles.hpp"

using namespace gevrey_flow;

namespace {

ModelConfig repulsive_1d(double beta) {
  ModelConfig c;
  c.d = 1;
  c.s = 1.0;
  c.nu = 1.0;
  c.beta = beta;
  c.matrix = InteractionMatrix::scalar(1, -1.0);
  c.kernel = InteractionKernel::power_law(2.0);
  return c;
}

ModelConfig attractive_1d() {
  ModelConfig c = repulsive_1d(0.0);
  c.matrix = InteractionMatrix::scalar(1, 1.0);
  return c;
}

ModelConfig rotation_2d(double beta) {
  ModelConfig c;
  c.d = 2;
  c.s = 1.0;
  c.nu = 1.0;
  c.beta = beta;
  c.matrix = InteractionMatrix::rotation();
  c.kernel = InteractionKernel::power_law(2.0);
  return c;
}

}  // namespace

TEST(InteractionKernel, PowerLawAndZeroMode) {
  const auto g = InteractionKernel::power_law(1.5, 2.0);
  EXPECT_EQ(g({0, 0}), cplx(0.0));
  EXPECT_NEAR(g({2, 0}).real(), 2.0 * std::pow(2.0, -1.5), 1e-15);
  EXPECT_NEAR(g({1, 1}).real(), 2.0 * std::pow(2.0, -0.75), 1e-15);
  EXPECT_EQ(g.bound_constant(), 2.0);
}

TEST(InteractionKernel, TabulatedMustBeHermitian) {
  std::map<Mode, cplx> t{{{1, 0}, {0.5, 0.25}}, {{-1, 0}, {0.5, -0.25}}};
  const auto g = InteractionKernel::tabulated(2.0, t);
  EXPECT_EQ(g({-1, 0}), cplx(0.5, -0.25));
  EXPECT_EQ(g({3, 0}), cplx(0.0));
  EXPECT_NEAR(g.bound_constant(), std::abs(cplx(0.5, 0.25)), 1e-15);
  t[{-1, 0}] = {0.5, 0.25};
  EXPECT_THROW(InteractionKernel::tabulated(2.0, t), std::invalid_argument);
}

TEST(InteractionMatrix, NormsAndSymmetry) {
  const auto r = InteractionMatrix::rotation();
  EXPECT_TRUE(r.is_antisymmetric());
  EXPECT_FALSE(r.is_symmetric());
  EXPECT_NEAR(r.operator_norm(), 1.0, 1e-15);
  EXPECT_EQ(r.quadratic({3, -2}), 0.0);
  const InteractionMatrix m(2, {1.0, 2.0, 2.0, -3.0});
  EXPECT_TRUE(m.is_symmetric());
  // eigenvalues -1 +- sqrt(8)
  EXPECT_NEAR(m.operator_norm(), 1.0 + std::sqrt(8.0), 1e-12);
  EXPECT_EQ(m.negated()(0, 1), -2.0);
}

TEST(LinearSymbol, AntisymmetricMatrixLeavesOnlyDiffusion) {
  const auto c = rotation_2d(0.1);
  for (Mode k : {Mode{1, 0}, Mode{2, -3}, Mode{-4, 4}}) {
    EXPECT_EQ(linear_symbol(k, c), cplx(0.5 * k.norm_sq(), 0.0));
  }
}

TEST(LinearSymbol, RepulsiveExample) {
  EXPECT_NEAR(linear_symbol({2, 0}, repulsive_1d(0.1)).real(), 3.0, 1e-15);
  // independent recomputation: nu^2 |k|^2 / 2 - (k M k) |k|^-2
  EXPECT_NEAR(linear_symbol({5, 0}, repulsive_1d(0.1)).real(), 12.5 + 25.0 / 25.0, 1e-14);
  EXPECT_EQ(linear_symbol({0, 0}, repulsive_1d(0.1)), cplx(0.0));
}

TEST(ComputeZeta, RotationCase) {
  const auto z = compute_zeta(rotation_2d(0.1));
  EXPECT_NEAR(z.value, 0.4, 1e-15);
  EXPECT_TRUE(z.tolerance_met);
  EXPECT_LE(z.bracket.width(), 1e-9);
  ASSERT_TRUE(z.minimizer.has_value());
  EXPECT_NEAR(z.minimizer->norm(), 1.0, 0.0);
}

TEST(ComputeZeta, AttractiveCaseIsNegativeAtUnitMode) {
  const auto z = compute_zeta(attractive_1d());
  EXPECT_NEAR(z.value, -0.5, 1e-15);
  EXPECT_LE(z.bracket.width(), 1e-9);
  ASSERT_TRUE(z.minimizer.has_value());
  EXPECT_EQ(std::abs(z.minimizer->k1), 1);
  const auto rep = check_admissibility(attractive_1d(), 0.9, Summability::finite(1.0), 1.0);
  EXPECT_FALSE(rep.passed("zeta_positive"));
  EXPECT_FALSE(rep.all_passed());
}

TEST(ComputeZeta, RepulsiveCaseIsATailInfimum) {
  const auto z = compute_zeta(repulsive_1d(0.0));
  EXPECT_TRUE(z.tolerance_met);
  EXPECT_LE(z.bracket.width(), 1e-9);
  EXPECT_TRUE(z.bracket.contains(0.5));
  EXPECT_NEAR(z.value, 0.5, 1e-9);
  EXPECT_GE(oracle::zeta_box_min(1, 1.0, 0.0, 1.0, 2.0, 1.0, {-1.0}, 64), 0.5);
}

TEST(ComputeZeta, AgreesWithBoxOracle) {
  ModelConfig c = repulsive_1d(0.1);
  c.s = 0.8;
  c.kernel = InteractionKernel::power_law(1.5, 0.7);
  const auto z = compute_zeta(c);
  // minimizer near |k| ~ 1900, where the drift term overtakes the kernel term
  const double box = oracle::zeta_box_min(1, 1.0, 0.1, 0.8, 1.5, 0.7, {-1.0}, 8192);
  EXPECT_LE(z.bracket.width(), 1e-9);
  EXPECT_NEAR(z.value, box, 1e-9);

  ModelConfig a = rotation_2d(0.2);
  a.matrix = InteractionMatrix(2, {0.3, -1.0, 0.6, 0.2});
  const auto za = compute_zeta(a);
  const double boxa = oracle::zeta_box_min(2, 1.0, 0.2, 1.0, 2.0, 1.0, {0.3, -1.0, 0.6, 0.2}, 64);
  EXPECT_NEAR(za.value, boxa, 1e-12);
}

TEST(ComputeZeta, TailNotControllable) {
  ModelConfig c = repulsive_1d(0.1);
  c.s = 0.6;
  c.kernel = InteractionKernel::power_law(0.5);
  EXPECT_THROW(compute_zeta(c), tail_not_controllable);
  EXPECT_THROW(compute_lambda_k0(c), tail_not_controllable);
}

TEST(ComputeZeta, RefinedRadiusStaysInsidePreviousBracket) {
  ModelConfig c = repulsive_1d(0.05);
  c.s = 0.9;
  for (int R = 8; R <= 1024; R *= 2) {
    const auto coarse = zeta_at_radius(c, R);
    const auto fine = zeta_at_radius(c, 2 * R);
    EXPECT_GE(fine.bracket.lower, coarse.bracket.lower - 1e-15);
    EXPECT_LE(fine.bracket.upper, coarse.bracket.upper + 1e-15);
  }
}

TEST(ComputeZeta, MatrixSignFlipsTheKernelContribution) {
  ModelConfig c;
  c.d = 2;
  c.beta = 0.0;
  c.nu = 2.0;
  c.matrix = InteractionMatrix(2, {0.5, -1.0, 1.0, 0.25});
  ModelConfig f = c;
  f.matrix = c.matrix.negated();
  for (Mode k : {Mode{1, 0}, Mode{1, 2}, Mode{-3, 1}}) {
    const double base = 0.5 * c.nu * c.nu;
    EXPECT_NEAR(detail::zeta_term(k, c) - base, -(detail::zeta_term(k, f) - base), 1e-15);
  }
}

TEST(ComputeLambdaK0, AntisymmetricWithDrift) {
  const auto l = compute_lambda_k0(rotation_2d(1.0));
  EXPECT_NEAR(l.lambda, 0.5, 1e-15);
  EXPECT_NEAR(l.k0, 2.0, 0.0);
  EXPECT_NEAR(l.argmax.norm(), 1.0, 0.0);
}

TEST(ComputeLambdaK0, AntisymmetricWithoutDrift) {
  const auto l = compute_lambda_k0(rotation_2d(0.0));
  EXPECT_EQ(l.lambda, 0.0);
  EXPECT_EQ(l.k0, 0.0);
}

TEST(ComputeLambdaK0, Attractive) {
  const auto l = compute_lambda_k0(attractive_1d());
  EXPECT_NEAR(l.lambda, 0.5, 1e-15);
  EXPECT_EQ(l.k0, 1.0);
}

TEST(ComputeLambdaK0, PositivePartLivesInsideK0) {
  ModelConfig c = repulsive_1d(0.8);
  c.nu = 1.1;
  const auto l = compute_lambda_k0(c);
  for (int k = 1; k <= 200; ++k) {
    const double v = detail::lambda_term({k, 0}, c);
    if (v >= 0.0) {
      EXPECT_LE(k, l.k0);
    }
    EXPECT_LE(v, l.lambda);
  }
}

TEST(Admissibility, StructuralConditionsPassForTheStandardCase) {
  const auto rep = check_admissibility(repulsive_1d(0.1), 0.9, Summability::finite(1.0), 1.0);
  for (const char* name : {"s_window", "lwp1", "sigma_window", "lwp2", "lwp3", "zeta_positive"}) {
    EXPECT_TRUE(rep.passed(name)) << name;
  }
}

TEST(Admissibility, SOnTheLowerEdgeFails) {
  ModelConfig c = repulsive_1d(0.1);
  c.kernel = InteractionKernel::power_law(1.0);
  c.s = 0.5;
  const auto rep = check_admissibility(c, 0.5, Summability::finite(1.0), 1.0);
  EXPECT_FALSE(rep.passed("s_window"));
  EXPECT_FALSE(rep.all_passed());
}

TEST(Admissibility, SigmaOnTheLwp3BoundaryFails) {
  const double s = 0.8;
  ModelConfig c = repulsive_1d(0.1);
  c.s = s;
  const auto rep = check_admissibility(c, (2.0 * s - 1.0) / s, Summability::finite(1.0), 1.0);
  EXPECT_FALSE(rep.passed("lwp3"));
}

TEST(Admissibility, SmallnessUsesTheSuppliedConstant) {
  const auto c = repulsive_1d(0.1);
  const double zeta = compute_zeta(c).value;
  EXPECT_TRUE(check_admissibility(c, 0.9, Summability::finite(1.0), 1.0, 0.99 * zeta).passed("smallness"));
  EXPECT_FALSE(check_admissibility(c, 0.9, Summability::finite(1.0), 2.0, 0.99 * zeta).passed("smallness"));
}

TEST(Admissibility, NeverThrows) {
  ModelConfig c = repulsive_1d(0.1);
  c.s = 0.6;
  c.kernel = InteractionKernel::power_law(0.5);
  AdmissibilityReport rep;
  EXPECT_NO_THROW(rep = check_admissibility(c, 0.9, Summability::infinity(), 1.0, 0.1));
  EXPECT_FALSE(rep.passed("zeta_positive"));
  EXPECT_FALSE(rep.passed("smallness"));
}

TEST(OmegaClosedForm, Values) {
  EXPECT_NEAR(omega_probability_closed_form(1, 1, 1), 0.86466472, 1e-8);
  EXPECT_NEAR(omega_probability_closed_form(0.5, 2, 1), 1.0 - std::exp(-2.0), 1e-15);
  EXPECT_LT(omega_probability_closed_form(1e-12, 1, 1), 1e-11);
  EXPECT_THROW(omega_probability_closed_form(0, 1, 1), std::invalid_argument);
  EXPECT_THROW(omega_probability_closed_form(1, -1, 1), std::invalid_argument);
}

TEST(OmegaClosedForm, Monotone) {
  for (double x = 0.1; x < 3.0; x += 0.1) {
    EXPECT_LT(omega_probability_closed_form(x, 0.7, 1.3), omega_probability_closed_form(x + 0.1, 0.7, 1.3));
    EXPECT_LT(omega_probability_closed_form(0.7, x, 1.3), omega_probability_closed_form(0.7, x + 0.1, 1.3));
    EXPECT_GT(omega_probability_closed_form(0.7, 0.4, x), omega_probability_closed_form(0.7, 0.4, x + 0.1));
  }
}

TEST(RescaleMass, IdentityAndFactorFour) {
  const auto c = repulsive_1d(0.1);
  const auto one = rescale_mass(c, 1.0);
  EXPECT_EQ(one.config.nu, c.nu);
  EXPECT_EQ(one.config.mass, c.mass);
  EXPECT_EQ(one.original_time(0.7), 0.7);
  const auto four = rescale_mass(c, 4.0);
  EXPECT_EQ(four.config.nu, 0.5);
  EXPECT_EQ(four.original_time(2.0), 0.5);
  EXPECT_EQ(four.amplitude_divisor(), 4.0);
  EXPECT_EQ(four.path_amplitude(), 2.0);
  EXPECT_THROW(rescale_mass(c, 0.0), std::invalid_argument);
}

TEST(DerivedParams, ReportsBothSignConventions) {
  const auto p = compute_derived_params(repulsive_1d(0.1), 0.9, Summability::finite(1.0), 1.0);
  ASSERT_TRUE(p.zeta_opposite_sign.has_value());
  EXPECT_LT(p.zeta_opposite_sign->value, p.zeta.value);
  ASSERT_TRUE(p.lambda_k0.has_value());
  EXPECT_GE(p.lambda_k0->lambda, 0.0);
  ASSERT_TRUE(p.omega_prob.has_value());
  EXPECT_NEAR(*p.omega_prob, 1.0 - std::exp(-0.02), 1e-15);
}

TEST(ModelConfig, Validation) {
  ModelConfig c;
  c.mass = 0.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = ModelConfig{};
  c.d = 2;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = ModelConfig{};
  c.s = 0.45;
  EXPECT_NO_THROW(c.validate());
  EXPECT_FALSE(c.in_theorem_window());
  EXPECT_FALSE(c.warnings().empty());
}
