#include <gtest/gtest.h>

#include <cmath>

#include "thinfilm/ivp.hpp"
#include "thinfilm/ode_forms.hpp"
#include "thinfilm/quadrature.hpp"
#include "thinfilm/similarity.hpp"

using namespace thinfilm;

TEST(Exponents, DirectSubstitution) {
  auto e = compute_exponents(1.0, 4.0, 1);
  EXPECT_DOUBLE_EQ(e.alpha, 0.2);
  EXPECT_DOUBLE_EQ(e.beta, 0.2);
  EXPECT_DOUBLE_EQ(e.p0, 4.0);

  e = compute_exponents(0.0, 3.0, 1);
  EXPECT_DOUBLE_EQ(e.alpha, 0.25);
  EXPECT_DOUBLE_EQ(e.beta, 0.25);
  EXPECT_DOUBLE_EQ(e.p0, 3.0);

  e = compute_exponents(0.5, 2.0, 1);
  EXPECT_DOUBLE_EQ(e.p0, 3.5);
  EXPECT_NEAR(e.alpha, 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(e.beta, 1.0 / 6.0, 1e-15);
}

TEST(Exponents, IdentityAndCriticalAgreement) {
  for (double n : {0.0, 0.5, 1.0, 1.5}) {
    for (int N : {1, 2, 3}) {
      for (double p : {n + 1.2, n + 2.0, n + 1.0 + 2.0 / N}) {
        auto e = compute_exponents(n, p, N);
        EXPECT_NEAR(e.alpha * (2 * p - (n + 2)), 1.0, 1e-15);
      }
      auto ec = compute_exponents(n, n + 1.0 + 2.0 / N, N);
      EXPECT_NEAR(ec.alpha, N / (4.0 + n * N), 1e-15);
      EXPECT_NEAR(ec.beta, 1.0 / (4.0 + n * N), 1e-15);
      EXPECT_NEAR(ec.alpha, N * ec.beta, 1e-15);
    }
  }
}

TEST(Exponents, RejectsInvalidRange) {
  EXPECT_THROW(compute_exponents(1.0, 2.0, 1), DomainError);   // p <= n+1
  EXPECT_THROW(compute_exponents(1.0, 1.9, 1), DomainError);
  EXPECT_THROW(compute_exponents(-0.1, 3.0, 1), DomainError);
  EXPECT_THROW(compute_exponents(1.0, 4.0, 0), DomainError);
}

TEST(RegularizedPower, BasicProperties) {
  EXPECT_NEAR(regularized_power(0.0, 1.0, 1e-6), 1e-6, 1e-20);
  EXPECT_DOUBLE_EQ(regularized_power(2.0, 3.0, 0.0), 8.0);
  EXPECT_DOUBLE_EQ(regularized_power(-2.0, 2.0, 0.0), 4.0);
  // monotone nondecreasing in |f| for q > 0
  double prev = 0.0;
  for (double f = 0.0; f < 2.0; f += 0.1) {
    double v = regularized_power(f, 0.7, 1e-3);
    EXPECT_GE(v, prev);
    prev = v;
  }
  EXPECT_THROW(regularized_power(1.0, 1.0, -1e-9), DomainError);
}

TEST(Ivp, LinearGrowthHitsE) {
  Rhs rhs = [](double, const Vec& y, Vec& dy) { dy[0] = y[0]; };
  Vec y0(1);
  y0 << 1.0;
  IvpOptions opt;
  opt.rel_tol = 1e-10;
  opt.abs_tol = 1e-12;
  auto r = integrate_ivp(rhs, 0.0, 1.0, y0, opt);
  ASSERT_EQ(r.status, SolveStatus::Ok);
  EXPECT_NEAR(r.y_final[0], std::exp(1.0), 10 * 1e-10 * std::exp(1.0));
}

TEST(Ivp, HarmonicOscillatorEnergyDrift) {
  Rhs rhs = [](double, const Vec& y, Vec& dy) {
    dy[0] = y[1];
    dy[1] = -y[0];
  };
  Vec y0(2);
  y0 << 1.0, 0.0;
  IvpOptions opt;
  opt.rel_tol = 1e-12;
  opt.abs_tol = 1e-14;
  opt.store_dense = false;
  auto r = integrate_ivp(rhs, 0.0, 200.0 * M_PI, y0, opt);
  ASSERT_EQ(r.status, SolveStatus::Ok);
  const double energy = 0.5 * (sqr(r.y_final[0]) + sqr(r.y_final[1]));
  EXPECT_NEAR(energy, 0.5, 1e-6);
}

TEST(Ivp, ToleranceHalvingMatchesOrder) {
  // error should drop roughly like tol when tolerances shrink (5th order pair
  // with step control tracking the tolerance)
  Rhs rhs = [](double t, const Vec& y, Vec& dy) { dy[0] = std::cos(t) * y[0]; };
  Vec y0(1);
  y0 << 1.0;
  double errs[2];
  int idx = 0;
  for (double tol : {1e-6, 1e-9}) {
    IvpOptions opt;
    opt.rel_tol = tol;
    opt.abs_tol = tol * 1e-2;
    opt.store_dense = false;
    auto r = integrate_ivp(rhs, 0.0, 3.0, y0, opt);
    errs[idx++] = std::fabs(r.y_final[0] - std::exp(std::sin(3.0)));
  }
  EXPECT_LT(errs[1], errs[0]);
  EXPECT_LT(errs[1], 1e-8);
}

TEST(Ivp, DenseOutputAndEvents) {
  Rhs rhs = [](double, const Vec& y, Vec& dy) {
    dy[0] = y[1];
    dy[1] = -y[0];
  };
  Vec y0(2);
  y0 << 0.0, 1.0;  // sin(t)
  IvpOptions opt;
  opt.rel_tol = 1e-11;
  opt.abs_tol = 1e-13;
  Event ev;
  ev.g = [](double, const Vec& y) { return y[0]; };
  ev.direction = -1;  // down-crossing at t = pi
  ev.terminal = true;
  opt.events.push_back(ev);
  auto r = integrate_ivp(rhs, 0.0, 10.0, y0, opt);
  ASSERT_EQ(r.events.size(), 1u);
  EXPECT_NEAR(r.events[0].t, M_PI, 1e-9);
  // dense interpolation accuracy mid-trajectory
  Vec s = r.dense.eval(1.0);
  EXPECT_NEAR(s[0], std::sin(1.0), 1e-9);
  Vec dsdt = r.dense.eval_deriv(1.0);
  EXPECT_NEAR(dsdt[0], std::cos(1.0), 1e-7);
}

TEST(Quadrature, AdaptiveGK) {
  auto f = [](double x) { return std::exp(-x * x); };
  double v = integrate_adaptive(f, 0.0, 6.0, 1e-13, 1e-13);
  EXPECT_NEAR(v, 0.5 * std::sqrt(M_PI), 1e-12);
  // endpoint algebraic singularity in the derivative
  auto g = [](double x) { return std::pow(1.0 - x * x, 1.0 / 3.0); };
  double w = integrate_adaptive(g, 0.0, 1.0, 1e-12, 1e-12);
  // 2F1 value: int_0^1 (1-x^2)^{1/3} dx = sqrt(pi) Gamma(4/3) / (2 Gamma(11/6))
  const double expected = 0.5 * std::sqrt(M_PI) * std::tgamma(4.0 / 3.0) /
                          std::tgamma(11.0 / 6.0);
  EXPECT_NEAR(w, expected, 1e-9);
}

TEST(Quadrature, NonuniformSimpson) {
  std::vector<double> x, y;
  double t = 0.0;
  while (t < 1.0) {
    x.push_back(t);
    y.push_back(t * t * t);
    t += (x.size() % 2 ? 0.013 : 0.019);
  }
  x.push_back(1.0);
  y.push_back(1.0);
  EXPECT_NEAR(simpson_nonuniform(x, y), 0.25, 1e-6);
}

TEST(OdeForms, ZeroIsExactPureTfeSolution) {
  auto sp = SimilarityParams::pure_tfe(1.0, 0.2, 1, ProblemKind::CauchyProblem);
  Vec s = Vec::Zero(4);
  Vec ds = ode_rhs(1.0, s, sp, OdeForm::PureTFE);
  EXPECT_EQ(ds.cwiseAbs().maxCoeff(), 0.0);
}

TEST(OdeForms, CriticalFormMatchesExpandedEquation) {
  // N=1, n=1, p=p0=4: |f| f''' - y f/5 - (|f| f^3)' = 0  =>
  // f''' = y f |f|^{-1}/5 + 4 f^2 f'
  auto sp = SimilarityParams::full(1.0, 4.0, 1, ProblemKind::FreeBoundaryProblem);
  SolverConfig cfg;
  cfg.delta = 0.0;
  Vec s(3);
  s << 0.7, -0.3, 0.1;
  Vec ds = ode_rhs(1.3, s, sp, OdeForm::IntegratedThirdOrderCritical, cfg);
  const double expect = 1.3 * 0.7 / (5.0 * 0.7) + 4.0 * 0.7 * 0.7 * (-0.3);
  EXPECT_NEAR(ds[2], expect, 1e-14);
  EXPECT_DOUBLE_EQ(ds[0], -0.3);
  EXPECT_DOUBLE_EQ(ds[1], 0.1);
}

TEST(OdeForms, StateDimensionValidated) {
  auto sp = SimilarityParams::full(1.0, 3.0, 1, ProblemKind::CauchyProblem);
  Vec s = Vec::Zero(3);
  EXPECT_THROW(ode_rhs(1.0, s, sp, OdeForm::FullFourthOrder), DomainError);
}

int main(int argc, char** argv) {
  ::testing::InitGoogleTest(&argc, argv);
  return RUN_ALL_TESTS();
}
