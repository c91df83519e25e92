#include <gtest/gtest.h>

#include <cmath>

#include "gevrey_flow/dynamics.hpp"
#include "gevrey_flow/initial_data.hpp"
#include "oracles.hpp"

using namespace gevrey_flow;

namespace {

ModelConfig repulsive_1d() {
  ModelConfig c;
  c.d = 1;
  c.matrix = InteractionMatrix::scalar(1, -1.0);
  c.alpha = 0.1;
  c.beta = 0.1;
  c.epsilon = 0.05;
  return c;
}

ModelConfig rotation_2d() {
  ModelConfig c;
  c.d = 2;
  c.matrix = InteractionMatrix::rotation();
  return c;
}

double l2(const SpectralField& f) { return fourier_lebesgue_norm(f, 0.0, Summability::finite(2.0)); }

}  // namespace

TEST(GammaApply, IdentityCompositionAndSingleMode) {
  const auto f = random_analytic_field(Lattice(2, 6), 3, 0.3);
  EXPECT_EQ(max_abs_diff(gamma_apply(f, 0.0, 0.8), f), 0.0);
  const auto twice = gamma_apply(gamma_apply(f, 0.3, 0.8), -0.1, 0.8);
  EXPECT_LE(max_abs_diff(twice, gamma_apply(f, 0.2, 0.8)), 1e-15 * f.max_abs() * 10);
  EXPECT_LE(max_abs_diff(gamma_apply(gamma_apply(f, 0.4, 1.0), -0.4, 1.0), f), 1e-15 * f.max_abs() * 10);
  const auto c = cosine_field(Lattice(1, 4), {2, 0}, 1.0);
  const auto g = gamma_apply(c, 0.5, 1.0);
  EXPECT_NEAR(g.coeff({2, 0}).real(), c.coeff({2, 0}).real() * std::exp(-1.0), 1e-15);
}

TEST(GammaApply, RefusesOverflow) {
  const auto f = random_analytic_field(Lattice(1, 64), 3, 0.3);
  EXPECT_THROW(gamma_apply(f, -11.0, 1.0), overflow_risk);
  EXPECT_THROW(gamma_apply(f, 2.0, 1.0, 100.0), overflow_risk);
}

TEST(BilinearB, ConstantSecondArgumentGivesZero) {
  const Lattice lat(2, 5);
  const auto f = random_analytic_field(lat, 1, 0.3);
  const auto b = bilinear_B(f, SpectralField::constant(lat, 2.0), 0.3, rotation_2d());
  EXPECT_EQ(b.max_abs(), 0.0);
}

TEST(BilinearB, ZeroModeOfOutputVanishes) {
  const Lattice lat(1, 8);
  const auto f = random_analytic_field(lat, 2, 0.3);
  const auto g = random_analytic_field(lat, 3, 0.3);
  for (double tau : {-0.4, 0.0, 0.4}) {
    EXPECT_EQ(bilinear_B(f, g, tau, repulsive_1d()).coeff({0, 0}), cplx(0.0));
    EXPECT_EQ(bilinear_B(f, g, tau, repulsive_1d(), true).coeff({0, 0}), cplx(0.0));
  }
}

TEST(BilinearB, HandConvolutionOfTwoModePairs) {
  // f^ = a at +-e1, g^ = b at +-e2, M = rotation, g^(j) = |j|^-2, tau = 0:
  // F(B)(p, q) = -(2 pi)^-2 (k . M j) a b with j = (0, q), M j = (-q, 0), so
  // F(B)(p, q) = p q a b / (4 pi^2) on the four diagonal modes.
  const Lattice lat(2, 3);
  const double a = 1.5, b = -0.75;
  SpectralField f(lat), g(lat);
  f.set_hermitian({1, 0}, a);
  g.set_hermitian({0, 1}, b);
  const auto out = bilinear_B(f, g, 0.0, rotation_2d());
  const double c = a * b / (4.0 * oracle::pi * oracle::pi);
  for (int p : {-1, 1}) {
    for (int q : {-1, 1}) EXPECT_NEAR(out.coeff({p, q}).real(), p * q * c, 1e-14);
  }
  double elsewhere = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Mode k = lat.mode(i);
    if (std::abs(k.k1) == 1 && std::abs(k.k2) == 1) continue;
    elsewhere = std::max(elsewhere, std::abs(out[i]));
  }
  EXPECT_EQ(elsewhere, 0.0);
}

TEST(BilinearB, DirectPathMatchesSeparateExponentialOracle) {
  for (int d : {1, 2}) {
    const Lattice lat(d, d == 1 ? 10 : 5);
    ModelConfig cfg = d == 1 ? repulsive_1d() : rotation_2d();
    cfg.s = 0.75;
    cfg.kernel = InteractionKernel::power_law(1.3, 0.6);
    if (d == 2) cfg.matrix = InteractionMatrix(2, {0.2, -1.0, 0.7, -0.4});
    const std::vector<double> M = cfg.matrix.entries();
    const auto f = random_analytic_field(lat, 10 + d, 0.4);
    const auto g = random_analytic_field(lat, 20 + d, 0.4);
    for (double tau : {-0.3, 0.0, 0.25}) {
      const auto ref = oracle::bilinear(f, g, tau, cfg.s, 1.3, 0.6, M);
      const auto out = bilinear_B(f, g, tau, cfg);
      EXPECT_LE(max_abs_diff(out, ref), 1e-12 * ref.max_abs()) << "d=" << d << " tau=" << tau;
      EXPECT_TRUE(out.is_real());
    }
  }
}

TEST(BilinearB, FastPathMatchesDirectPathOnDealiasedInput) {
  const Lattice lat(2, 12);
  const auto cfg = rotation_2d();
  const BilinearOperator op(lat, cfg);
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto f = dealias(random_analytic_field(lat, seed, 0.2));
    const auto g = dealias(random_analytic_field(lat, seed + 50, 0.2));
    for (double tau : {-0.5, 0.0, 0.5}) {
      const auto ref = dealias(op.direct(f, g, tau));
      EXPECT_LE(max_abs_diff(ref, op.fast(f, g, tau)), 1e-10 * ref.max_abs());
    }
  }
}

TEST(BilinearB, GuardsAndLatticeChecks) {
  const Lattice lat(1, 50);
  const auto f = random_analytic_field(lat, 1, 0.3);
  EXPECT_THROW(bilinear_B(f, f, 8.0, repulsive_1d()), overflow_risk);
  EXPECT_NO_THROW(bilinear_B(f, f, -8.0, repulsive_1d()));
  EXPECT_THROW(bilinear_B(f, f, -15.0, repulsive_1d(), true), overflow_risk);
  EXPECT_THROW(bilinear_B(f, random_analytic_field(Lattice(1, 49), 1, 0.3), 0.0, repulsive_1d()),
               lattice_mismatch);
}

TEST(LinearPropagate, IdentityDecayAndSemigroup) {
  const auto f = random_analytic_field(Lattice(2, 6), 5, 0.3);
  auto cfg = rotation_2d();
  cfg.nu = 0.8;
  cfg.s = 0.9;
  EXPECT_EQ(max_abs_diff(linear_propagate(f, 0.0, cfg), f), 0.0);
  const auto g = linear_propagate(f, 0.3, cfg);
  for (const auto& [k, c] : oracle::as_map(f)) {
    const double factor = std::exp(-0.3 * 0.32 * std::pow(oracle::euclid(k), 1.8));
    EXPECT_NEAR(std::abs(g.coeff(k)), factor * std::abs(c), 1e-15 * std::max(1.0, std::abs(c)));
  }
  const auto repulsive = repulsive_1d();
  const auto h = random_analytic_field(Lattice(1, 16), 6, 0.2);
  const auto two = linear_propagate(linear_propagate(h, 0.1, repulsive), 0.25, repulsive);
  EXPECT_LE(max_abs_diff(two, linear_propagate(h, 0.35, repulsive)), 1e-14 * h.max_abs());
}

TEST(EtdStep, SuppressedNonlinearityIsTheLinearFlow) {
  const Lattice lat(1, 12);
  const auto cfg = repulsive_1d();
  const auto rho = random_analytic_field(lat, 7, 0.3);
  const auto path = sample_path(0.01, 1e-3, 3);
  for (Scheme sch : {Scheme::exp_euler, Scheme::exp_heun}) {
    IntegratorConfig ic;
    ic.scheme = sch;
    ic.suppress_nonlinearity = true;
    const SimState s0{0.0, rho, 0.0, 0.0, cfg.alpha};
    const SimState s1 = etd_step(s0, path, ic, cfg);
    EXPECT_EQ(max_abs_diff(s1.rho, linear_propagate(rho, ic.dt, cfg)), 0.0);
    EXPECT_DOUBLE_EQ(s1.t, 1e-3);
    EXPECT_EQ(s1.w, path[1]);
    EXPECT_DOUBLE_EQ(s1.phi, cfg.alpha + cfg.beta * 1e-3);
  }
}

TEST(Simulate, MassAndRealityArePreserved) {
  const Lattice lat(2, 6);
  const auto cfg = rotation_2d();
  const auto rho0 = random_analytic_field(lat, 9, 0.5, 0.5);
  IntegratorConfig ic;
  ic.dt = 1e-3;
  ic.enforce_zero_mode = false;
  const auto res = simulate(rho0, sample_path(0.2, 1e-3, 2), 0.2, ic, cfg);
  ASSERT_FALSE(res.aborted);
  for (const auto& st : res.snapshots) {
    EXPECT_EQ(st.rho.coeff({0, 0}), cplx(0.0));
    EXPECT_LE(st.rho.hermitian_defect(), 1e-13);
  }
  EXPECT_EQ(res.max_zero_mode_residual, 0.0);
}

TEST(Simulate, ZeroDataStaysZero) {
  const auto res = simulate(SpectralField(Lattice(1, 8)), sample_path(0.5, 1e-3, 4), 0.5, {}, repulsive_1d());
  for (const auto& st : res.snapshots) EXPECT_EQ(st.rho.max_abs(), 0.0);
  EXPECT_EQ(res.snapshots.size(), 501u);
}

TEST(Simulate, InviscidAntisymmetricFlowConservesL2) {
  const Lattice lat(2, 8);
  auto cfg = rotation_2d();
  cfg.nu = 0.0;
  cfg.beta = 0.0;
  const auto rho0 = random_analytic_field(lat, 13, 0.6, 0.5);
  IntegratorConfig ic;
  ic.dt = 1e-4;
  ic.snapshot_stride = 100;
  const auto res = simulate(rho0, BrownianPath::zero(0.1, 1e-4), 0.1, ic, cfg);
  ASSERT_FALSE(res.aborted);
  const double e0 = l2(rho0);
  double change = 0.0;
  for (const auto& st : res.snapshots) change = std::max(change, std::abs(l2(st.rho) - e0) / e0);
  EXPECT_LE(change, 1e-6);
  EXPECT_GT(max_abs_diff(res.snapshots.back().rho, rho0), 1e-4 * rho0.max_abs());
}

TEST(Simulate, PathwiseDeterminism) {
  const Lattice lat(1, 16);
  const auto rho0 = random_analytic_field(lat, 1, 0.5, 0.1);
  IntegratorConfig ic;
  ic.snapshot_stride = 7;
  const auto a = simulate(rho0, sample_path(0.3, 1e-3, 8), 0.3, ic, repulsive_1d());
  const auto b = simulate(rho0, sample_path(0.3, 1e-3, 8), 0.3, ic, repulsive_1d());
  ASSERT_EQ(a.snapshots.size(), b.snapshots.size());
  for (std::size_t i = 0; i < a.snapshots.size(); ++i) {
    EXPECT_EQ(max_abs_diff(a.snapshots[i].rho, b.snapshots[i].rho), 0.0);
    EXPECT_EQ(a.snapshots[i].t, b.snapshots[i].t);
  }
}

TEST(Simulate, AttractiveInviscidRunAbortsInsteadOfThrowing) {
  auto cfg = repulsive_1d();
  cfg.matrix = InteractionMatrix::scalar(1, 1.0);
  cfg.nu = 0.0;
  IntegratorConfig ic;
  ic.blowup_factor = 1e3;
  const auto res = simulate(cosine_field(Lattice(1, 16), {1, 0}, 0.2), BrownianPath::zero(5.0, 1e-3), 5.0, ic, cfg);
  EXPECT_TRUE(res.aborted);
  EXPECT_NE(res.diagnostic.find("blowup"), std::string::npos);
  EXPECT_GE(res.blowup_ratio, 1e3);
}

TEST(Simulate, RejectsNonzeroMeanAndShortPaths) {
  const Lattice lat(1, 4);
  EXPECT_THROW(simulate(SpectralField::constant(lat, 1.0), BrownianPath::zero(1, 0.1), 1.0, {}, repulsive_1d()),
               invalid_field);
  IntegratorConfig ic;
  ic.dt = 0.1;
  EXPECT_THROW(simulate(SpectralField(lat), BrownianPath::zero(0.5, 0.1), 1.0, ic, repulsive_1d()),
               std::invalid_argument);
}

TEST(Simulate, OmegaViolationIsFlagged) {
  std::vector<double> w(11, 0.0);
  w[5] = 1.0;  // phi = 0.1 + 0.1 t < nu W at t = 0.5
  const BrownianPath p(0.1, w);
  IntegratorConfig ic;
  ic.dt = 0.1;
  const auto res = simulate(random_analytic_field(Lattice(1, 4), 1, 1.0, 0.01), p, 1.0, ic, repulsive_1d());
  ASSERT_TRUE(res.omega_violation_time.has_value());
  EXPECT_NEAR(*res.omega_violation_time, 0.5, 1e-12);
}

TEST(Simulate, FastAndDirectPathsAgreeOnDealiasedData) {
  const Lattice lat(1, 24);
  const auto rho0 = dealias(random_analytic_field(lat, 4, 1.0, 0.2));
  const auto path = sample_path(0.2, 1e-3, 6);
  IntegratorConfig direct, fast;
  fast.dealias = true;
  const auto a = simulate(rho0, path, 0.2, direct, repulsive_1d());
  const auto b = simulate(rho0, path, 0.2, fast, repulsive_1d());
  EXPECT_LE(max_abs_diff(a.snapshots.back().rho, b.snapshots.back().rho), 1e-6 * rho0.max_abs());
}

TEST(Picard, SuppressedNonlinearityGivesTheLinearFlowAtOnce) {
  const auto rho0 = random_analytic_field(Lattice(1, 8), 2, 0.5);
  PicardOptions po;
  po.n_iter = 3;
  po.quad_dt = 1e-3;
  po.suppress_nonlinearity = true;
  const auto pr = picard_solve(rho0, sample_path(0.1, 1e-3, 1), 0.1, repulsive_1d(), po);
  EXPECT_EQ(pr.distances.front(), 0.0);
  EXPECT_LE(max_abs_diff(pr.final_state, linear_propagate(rho0, 0.1, repulsive_1d())), 1e-13 * rho0.max_abs());
}

TEST(Picard, ContractsForSmallDataOnShortTimes) {
  const auto rho0 = random_analytic_field(Lattice(1, 8), 5, 0.5, 0.2);
  PicardOptions po;
  po.n_iter = 6;
  po.quad_dt = 1e-4;
  const auto pr = picard_solve(rho0, sample_path(0.1, 1e-4, 3), 0.1, repulsive_1d(), po);
  EXPECT_TRUE(pr.contracting);
  for (double r : pr.ratios) EXPECT_LE(r, 0.5);
}

TEST(Picard, AgreesWithHeunAtTheFinestStep) {
  const Lattice lat(1, 8);
  const auto cfg = repulsive_1d();
  const auto rho0 = scale_to_norm(random_analytic_field(lat, 5, 0.5), {cfg.alpha + cfg.epsilon, 0.0, Summability::finite(1.0), 1.0}, 2.0);
  const auto path = sample_path(0.1, 1e-5, 12345);
  PicardOptions po;
  po.n_iter = 10;
  const auto pr = picard_solve(rho0, path, 0.1, cfg, po);
  IntegratorConfig ic;
  ic.dt = 1e-4;
  const auto res = simulate(rho0, path, 0.1, ic, cfg);
  EXPECT_LE(max_abs_diff(res.snapshots.back().rho, pr.final_state), 1e-6);
}

TEST(RecoverMuTheta, ZeroStateAndZeroPath) {
  const Lattice lat(2, 4);
  const auto cfg = rotation_2d();
  const SimState zero{0.0, SpectralField(lat), 0.0, 0.0, cfg.alpha};
  const auto mt = recover_mu_theta(zero, cfg);
  EXPECT_EQ(max_abs_diff(mt.mu, SpectralField::constant(lat, 1.0)), 0.0);
  ASSERT_TRUE(mt.theta.has_value());
  EXPECT_EQ(max_abs_diff(*mt.theta, SpectralField::constant(lat, 1.0)), 0.0);

  const SimState s{0.0, random_analytic_field(lat, 3, 0.5), 0.0, 0.0, cfg.alpha};
  const auto u = recover_mu_theta(s, cfg);
  EXPECT_EQ(max_abs_diff(*u.theta, u.mu), 0.0);
}

TEST(RecoverMuTheta, RoundTripAndRefusal) {
  const Lattice lat(1, 16);
  const auto cfg = repulsive_1d();
  const SimState s{0.2, random_analytic_field(lat, 4, 0.5), 0.9, 0.9, 0.12};
  const auto mt = recover_mu_theta(s, cfg);
  ASSERT_TRUE(mt.theta.has_value());
  EXPECT_LE(max_abs_diff(gamma_apply(*mt.theta, s.nu_w, cfg.s), mt.mu), 1e-13 * mt.mu.max_abs());
  const SimState far{0.2, s.rho, 50.0, 50.0, 0.12};
  const auto refused = recover_mu_theta(far, cfg);
  EXPECT_FALSE(refused.theta.has_value());
  EXPECT_FALSE(refused.refusal.empty());
}

TEST(NormSchedule, NamesAndRadii) {
  NormSchedule s;
  s.kappa = 0.9;
  EXPECT_EQ(s.name(), "G[phi+eps;k=0.90000000000000002;r=1]");
  EXPECT_DOUBLE_EQ(s.radius(0.2, 0.05), 0.25);
  s.rule = NormSchedule::Radius::constant;
  s.a = 0.5;
  s.r = Summability::infinity();
  s.kappa = 0;
  EXPECT_EQ(s.name(), "G[0.5;k=0;r=inf]");
  EXPECT_EQ(s.radius(0.2, 0.05), 0.5);
}
