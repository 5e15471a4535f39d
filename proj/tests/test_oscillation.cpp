#include <gtest/gtest.h>

#include <cmath>

#include "thinfilm/oscillation.hpp"
#include "thinfilm/tails.hpp"

using namespace thinfilm;

TEST(Equilibria, ArrangedSubstitution) {
  // n=2, beta*y0 = 0.375: mu = 1.5, mu(mu-1)(mu-2) = -0.375, phi0 = 1
  EXPECT_NEAR(equilibria(2.0, 0.375, 1.0), 1.0, 1e-14);
  // outside (3/2, 3) the radicand is negative
  EXPECT_THROW(equilibria(1.0, 0.25, 4.0), DomainError);
}

TEST(Equilibria, ExactConstantSolutionOfCycleEquation) {
  const double n = 2.0, lam0 = 0.6;
  const double phi0 = equilibria(n, lam0, 1.0);
  Rhs rhs = oscillation_rhs(n, lam0, 0.0);
  Vec s(3), ds(3);
  s << phi0, 0.0, 0.0;
  rhs(0.0, s, ds);
  EXPECT_NEAR(ds[2], 0.0, 1e-12);
  s[0] = -phi0;
  rhs(0.0, s, ds);
  EXPECT_NEAR(ds[2], 0.0, 1e-12);
}

class CycleN1 : public ::testing::Test {
 protected:
  static PeriodicOrbit& orbit() {
    static PeriodicOrbit o = find_periodic_orbit(1.0, 1.0);
    return o;
  }
};

TEST_F(CycleN1, ConvergesWithBruteForcePeriod) {
  const PeriodicOrbit& o = orbit();
  ASSERT_TRUE(o.converged);
  // brute-force oracle: long integration, period from successive upward
  // section crossings
  Rhs rhs = oscillation_rhs(1.0, 1.0, 1e-10);
  Vec y0(3);
  y0 << 0.3, 0.0, 0.0;
  IvpOptions opt;
  opt.rel_tol = 1e-11;
  opt.abs_tol = 1e-13;
  opt.store_dense = false;
  Event up;
  up.g = [](double, const Vec& s) { return s[0]; };
  up.direction = +1;
  opt.events.push_back(up);
  auto r = integrate_ivp(rhs, 0.0, 300.0, y0, opt);
  ASSERT_GE(r.events.size(), 4u);
  const auto& ev = r.events;
  const double T_brute = ev.back().t - ev[ev.size() - 2].t;
  EXPECT_NEAR(o.period, T_brute, 1e-5);
}

TEST_F(CycleN1, SignChangesAndClosure) {
  const PeriodicOrbit& o = orbit();
  ASSERT_TRUE(o.converged);
  // phi changes sign at least twice per period and the endpoint state
  // equals the initial state
  int changes = 0;
  double prev = o.state(0.01)[0];
  for (int i = 2; i <= 400; ++i) {
    double v = o.state(o.period * i / 400.0)[0];
    if (v != 0 && prev != 0 && sign(v) != sign(prev)) ++changes;
    prev = v;
  }
  EXPECT_GE(changes, 2);
  Vec a = o.cycle->eval(0.0), b = o.cycle->eval(o.period);
  EXPECT_NEAR((a - b).cwiseAbs().maxCoeff(), 0.0, 1e-8);
  // residual of the cycle against the autonomous equation
  Rhs rhs = oscillation_rhs(1.0, 1.0, 0.0);
  EXPECT_LT(residual_norm(*o.cycle, rhs, 3), 1e-6);
}

TEST_F(CycleN1, ScalingGroupMapsCycles) {
  const PeriodicOrbit& o1 = orbit();
  ASSERT_TRUE(o1.converged);
  PeriodicOrbit o2 = find_periodic_orbit(1.0, 2.5);
  ASSERT_TRUE(o2.converged);
  EXPECT_NEAR(o1.period, o2.period, 1e-7);
  // phi_{2.5}(eta) = 2.5^{1/n} phi_1(eta) up to the section phase
  PeriodicOrbit o1s = o1.rescaled(2.5);
  for (double eta : {0.3, 0.9, 1.5}) {
    EXPECT_NEAR(o1s.state(eta)[0], o2.state(eta)[0], 2e-5);
  }
}

TEST(Cycle, NoCycleAboveHeteroclinicValue) {
  PeriodicOrbit o = find_periodic_orbit(1.9, 1.0);
  EXPECT_FALSE(o.converged);
  EXPECT_EQ(o.status, SolveStatus::NoCycle);
}

TEST(Heteroclinic, BracketsPaperValue) {
  auto r = detect_heteroclinic(1.5, 1.9, 1.0, 1e-2);
  ASSERT_EQ(r.status, SolveStatus::Ok);
  EXPECT_NEAR(r.n_h, 1.758665, 0.02);
  EXPECT_LT(r.n_h, 9.0 / (3.0 + std::sqrt(3.0)));
}

TEST(Heteroclinic, InvalidBracketRejected) {
  auto r = detect_heteroclinic(0.5, 1.0, 1.0, 1e-2);
  EXPECT_EQ(r.status, SolveStatus::BracketInvalid);
}

TEST(CpTail, EnvelopeAndResidual) {
  PeriodicOrbit o = find_periodic_orbit(1.0, 1.0);
  ASSERT_TRUE(o.converged);
  const double y0 = 5.0, s0 = 0.7, n = 1.0;
  // log-slope of |f| vs ln(y0-y) equals 3/n at matching phases (one period
  // apart so the oscillatory factor cancels)
  double w1 = 1e-3;
  double w2 = w1 * std::exp(-o.period);
  double s1[4], s2[4];
  cp_tail_state(o, n, y0, s0, w1, s1);
  cp_tail_state(o, n, y0, s0, w2, s2);
  const double slope = std::log(std::fabs(s2[0] / s1[0])) / std::log(w2 / w1);
  EXPECT_NEAR(slope, 3.0 / n, 1e-8);
  // residual of the tail against the reduced equation |f|^n f''' = lam0 f,
  // relative to the retained terms, vanishes as y -> y0
  for (double w : {1e-2, 1e-4, 1e-6}) {
    double s[4];
    cp_tail_state(o, n, y0, s0, w, s);
    const double lhs = regularized_power(s[0], n, 0.0) * s[3];
    const double rhs = 1.0 * s[0];  // lambda0 = 1 cycle scale
    EXPECT_NEAR(lhs, rhs, 1e-9 * std::max(std::fabs(lhs), std::fabs(rhs)) + 1e-30);
  }
}

TEST(CpTail, PhaseCovariance) {
  PeriodicOrbit o = find_periodic_orbit(1.0, 1.0);
  ASSERT_TRUE(o.converged);
  SolverConfig cfg;
  Profile a = tail_segment_cp(5.0, 0.4, o, 1.0, 4.0, cfg);
  Profile b = tail_segment_cp(5.0, 0.4 + o.period, o, 1.0, 4.0, cfg);
  ASSERT_EQ(a.size(), b.size());
  for (size_t i = 0; i < a.size(); ++i)
    EXPECT_NEAR(a.values[i], b.values[i], 1e-10 + 1e-8 * std::fabs(a.values[i]));
  // infinitely many sign changes accumulating at y0: count grows like
  // |ln(y0-y_start)| / period
  Profile c = tail_segment_cp(5.0, 0.4, o, 1.0, 5.0 - 1e-6, cfg);
  const double expected = std::log(1e-6 / (1e-12 * 5.0)) / o.period;
  EXPECT_GT(c.sign_changes, 0.5 * expected);
}

TEST(CpTail, WindowValidation) {
  PeriodicOrbit o = find_periodic_orbit(1.0, 1.0);
  SolverConfig cfg;
  EXPECT_THROW(tail_segment_cp(5.0, 0.0, o, 1.0, 5.0 - 1e-14, cfg), DomainError);
  EXPECT_THROW(tail_segment_cp(5.0, 0.0, o, 1.0, 6.0, cfg), DomainError);
}

TEST(FbpTail, CaseTableAgainstExactDrops) {
  // N=1, n=1, pure-TFE drop f = (y^2-y0^2)^2/120 has the expansion
  // C0 w^2 - A w^3 with C0 = y0^2/30 and A = y0/30 = lam0/6, lam0 = y0/5.
  const double y0 = std::pow(120.0, 0.25);
  double q, A;
  fbp_bundle_coeffs(1.0, 1, 0.2, y0, y0 * y0 / 30.0, q, A);
  EXPECT_NEAR(q, 3.0, 1e-14);
  EXPECT_NEAR(A, y0 / 30.0, 1e-12);
  // N=2, n=1 small-mass leading profile g0 = beta (z^2-z0^2)^2/(8(N+2)):
  // C0 = beta z0^2/(2(N+2)), A = beta z0/(2(N+2))
  const double beta2 = 1.0 / 6.0;
  const double z0 = std::pow(1152.0, 1.0 / 6.0);
  const double C0 = beta2 * z0 * z0 / 8.0;
  fbp_bundle_coeffs(1.0, 2, beta2, z0, C0, q, A);
  EXPECT_NEAR(q, 3.0, 1e-14);
  EXPECT_NEAR(A, beta2 * z0 / 8.0, 1e-12);
  // N=1, n=0: q = 5, A = beta y0 C0/60
  fbp_bundle_coeffs(0.0, 1, 0.25, 2.0, 0.7, q, A);
  EXPECT_NEAR(q, 5.0, 1e-14);
  EXPECT_NEAR(A, 0.25 * 2.0 * 0.7 / 60.0, 1e-14);
  // bundle is odd under reflection C0 -> -C0 (N=1 cases)
  double qm, Am;
  fbp_bundle_coeffs(0.5, 1, 0.2, 3.0, 0.4, q, A);
  fbp_bundle_coeffs(0.5, 1, 0.2, 3.0, -0.4, qm, Am);
  EXPECT_NEAR(Am, -A, 1e-14);
  EXPECT_THROW(fbp_bundle_coeffs(1.5, 1, 0.2, 1.0, 1.0, q, A), DomainError);
}

TEST(FbpTail, LeadingOrderLimit) {
  // f(y)/(y0-y)^2 -> C0 as y -> y0 for all cases (q > 2)
  for (double n : {0.0, 0.5, 1.0, 1.2}) {
    SolverConfig cfg;
    Profile pr = tail_segment_fbp(2.0, 0.8, n, 1, n + 2.5, 1.5, cfg);
    const double w = 2.0 - pr.grid.back();
    EXPECT_NEAR(pr.values.back() / (w * w), 0.8, 1e-3);
  }
}

int main(int argc, char** argv) {
  ::testing::InitGoogleTest(&argc, argv);
  return RUN_ALL_TESTS();
}
