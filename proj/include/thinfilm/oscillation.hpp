#ifndef THINFILM_OSCILLATION_HPP
#define THINFILM_OSCILLATION_HPP

#include <cmath>
#include <memory>
#include <optional>

#include "thinfilm/common.hpp"
#include "thinfilm/ivp.hpp"
#include "thinfilm/newton.hpp"

namespace thinfilm {

/// Autonomous oscillatory-component equation near a Cauchy-problem interface
/// (eta = ln(y0-y), mu = 3/n):
///   phi''' + 3(mu-1) phi'' + (3mu^2-6mu+2) phi' + mu(mu-1)(mu-2) phi
///         + lambda0 |phi|^{-n} phi = 0.
inline Rhs oscillation_rhs(double n, double lambda0, double delta) {
  const double mu = 3.0 / n;
  const double c2 = 3.0 * (mu - 1.0);
  const double c1 = 3.0 * mu * mu - 6.0 * mu + 2.0;
  const double c0 = mu * (mu - 1.0) * (mu - 2.0);
  return [=](double, const Vec& s, Vec& ds) {
    ds[0] = s[1];
    ds[1] = s[2];
    ds[2] = -c2 * s[2] - c1 * s[1] - c0 * s[0] -
            lambda0 * signed_power(s[0], 1.0 - n, delta);
  };
}

/// Constant equilibria +-phi0 of the oscillatory equation; real only for
/// mu(mu-1)(mu-2) < 0, i.e. n in (3/2, 3).
inline double equilibria(double n, double beta, double y0) {
  if (!(n > 1.5 && n < 3.0))
    throw DomainError("equilibria: requires n in (3/2, 3) for a real root");
  const double mu = 3.0 / n;
  const double denom = mu * (mu - 1.0) * (mu - 2.0);
  const double rad = -beta * y0 / denom;
  if (rad <= 0) throw DomainError("equilibria: nonpositive radicand");
  return std::pow(rad, 1.0 / n);
}

/// The stable limit cycle of the oscillatory equation, stored as one period
/// of (phi, phi', phi'') with the phase fixed by the Poincare section
/// phi = 0, phi' > 0 at eta = 0.
struct PeriodicOrbit {
  double n = 0.0;
  double lambda0 = 1.0;
  double period = 0.0;
  bool converged = false;
  SolveStatus status = SolveStatus::NonConvergence;
  bool settled_at_zero = false;  // trajectory decayed to 0 instead of cycling
  std::shared_ptr<DenseTrajectory> cycle;  // one period, eta in [0, period]

  /// Cycle state at phase eta (periodic wrap).
  Vec state(double eta) const {
    double e = std::fmod(eta, period);
    if (e < 0) e += period;
    return cycle->eval(e);
  }

  /// The scaling group of the equation: the cycle for a different lambda0
  /// is lambda0^{1/n} times the lambda0 = 1 cycle with the same period.
  PeriodicOrbit rescaled(double new_lambda0) const {
    PeriodicOrbit o = *this;
    if (!converged) return o;
    const double factor = std::pow(new_lambda0 / lambda0, 1.0 / n);
    auto scaled = std::make_shared<DenseTrajectory>(*cycle);
    for (DenseStep& s : scaled->steps) {
      s.r1 *= factor;
      s.r2 *= factor;
      s.r3 *= factor;
      s.r4 *= factor;
      s.r5 *= factor;
    }
    o.cycle = scaled;
    o.lambda0 = new_lambda0;
    return o;
  }
};

/// Rough period scale from the linearized (n -> 0 style) equation: complex
/// roots of r^3 + 3(mu-1) r^2 + (3mu^2-6mu+2) r + mu(mu-1)(mu-2)+lambda0 = 0.
inline double nominal_period(double n, double lambda0) {
  const double mu = 3.0 / n;
  const double a = 3.0 * (mu - 1.0);
  const double b = 3.0 * mu * mu - 6.0 * mu + 2.0;
  const double c = mu * (mu - 1.0) * (mu - 2.0) + lambda0;
  // depressed cubic t^3 + pt + q, r = t - a/3
  const double p = b - a * a / 3.0;
  const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
  const double disc = q * q / 4.0 + p * p * p / 27.0;
  if (disc > 0) {
    // one real root, complex pair with Im = sqrt(3)/2 |u - v|
    const double u = std::cbrt(-q / 2.0 + std::sqrt(disc));
    const double v = std::cbrt(-q / 2.0 - std::sqrt(disc));
    const double im = std::fabs(u - v) * std::sqrt(3.0) / 2.0;
    if (im > 1e-8) return 2.0 * M_PI / im;
  }
  return 2.0;
}

struct CycleOptions {
  double delta_transient = 1e-8;  // regularization during capture
  double delta_polish = 0.0;      // removed for the periodicity solve (n <= 1)
  double transient_periods = 50.0;
  int iteration_cap = 10;
  double ivp_rel_tol = 1e-11;
  double ivp_abs_tol = 1e-13;
};

/// Locate the stable limit cycle by long-time integration from a generic
/// start followed by a Poincare-section periodicity solve (unknowns: section
/// state and period). converged = false (NoCycle) when trajectories settle
/// on the constant equilibria or decay to zero.
inline PeriodicOrbit find_periodic_orbit(double n, double lambda0,
                                         const CycleOptions& copt = {}) {
  if (!(n > 0.0 && n < 3.0))
    throw DomainError("find_periodic_orbit: requires n in (0, 3)");
  if (!(lambda0 > 0.0)) throw DomainError("find_periodic_orbit: lambda0 must be > 0");

  PeriodicOrbit orbit;
  orbit.n = n;
  orbit.lambda0 = lambda0;

  const double delta_polish =
      (n <= 1.0) ? copt.delta_polish : std::max(copt.delta_polish, 1e-10);
  Rhs rhs_t = oscillation_rhs(n, lambda0, copt.delta_transient);
  Rhs rhs_p = oscillation_rhs(n, lambda0, delta_polish);

  const double T_nominal = nominal_period(n, lambda0);
  const double t_trans = copt.transient_periods * T_nominal;

  // transient from a generic start, recording upward zero crossings
  Vec start(3);
  const double amp_scale = std::pow(lambda0, 1.0 / n);
  start << 0.3 * amp_scale, 0.0, 0.0;
  IvpOptions iopt;
  iopt.rel_tol = copt.ivp_rel_tol;
  iopt.abs_tol = copt.ivp_abs_tol * amp_scale;
  iopt.store_dense = false;
  Event up;
  up.g = [](double, const Vec& s) { return s[0]; };
  up.direction = +1;
  iopt.events.push_back(up);
  auto tr = integrate_ivp(rhs_t, 0.0, t_trans, start, iopt);

  // keep crossings in the last quarter of the transient
  std::vector<EventHit> tailhits;
  for (const auto& h : tr.events)
    if (h.t > 0.75 * t_trans) tailhits.push_back(h);

  if (tailhits.size() < 3) {
    // no sustained oscillation: classify the terminal state
    orbit.status = SolveStatus::NoCycle;
    const double fmag = std::fabs(tr.y_final[0]);
    orbit.settled_at_zero = fmag < 1e-6 * amp_scale;
    return orbit;
  }

  double T0 = tailhits.back().t - tailhits[tailhits.size() - 2].t;
  Vec sec = tailhits.back().state;

  // Newton on (phi'(0), phi''(0), T): Phi_T(0, a, b) = (0, a, b)
  ResidualMap F = [&](const Vec& x) -> std::optional<Vec> {
    if (x[2] <= 0.01 * T0) return std::nullopt;
    Vec y0(3);
    y0 << 0.0, x[0], x[1];
    IvpOptions o2;
    o2.rel_tol = copt.ivp_rel_tol;
    o2.abs_tol = copt.ivp_abs_tol * amp_scale;
    o2.store_dense = false;
    auto r = integrate_ivp(rhs_p, 0.0, x[2], y0, o2);
    if (r.status != SolveStatus::Ok) return std::nullopt;
    Vec out(3);
    out << r.y_final[0], r.y_final[1] - x[0], r.y_final[2] - x[1];
    return out / amp_scale;
  };
  Vec x0(3);
  x0 << sec[1], sec[2], T0;
  NewtonOptions nopt;
  nopt.tol = 1e-10;
  nopt.max_iters = copt.iteration_cap * 3;
  nopt.fd_step = 1e-7;
  auto nr = newton_solve(F, x0, nopt);
  if (nr.status != SolveStatus::Ok || nr.x[0] <= 0) {
    orbit.status = SolveStatus::NonConvergence;
    return orbit;
  }

  // store one polished period with dense output
  Vec y0(3);
  y0 << 0.0, nr.x[0], nr.x[1];
  IvpOptions o3;
  o3.rel_tol = copt.ivp_rel_tol;
  o3.abs_tol = copt.ivp_abs_tol * amp_scale;
  auto per = integrate_ivp(rhs_p, 0.0, nr.x[2], y0, o3);
  if (per.status != SolveStatus::Ok) {
    orbit.status = SolveStatus::NonConvergence;
    return orbit;
  }
  orbit.period = nr.x[2];
  orbit.cycle = std::make_shared<DenseTrajectory>(std::move(per.dense));
  orbit.converged = true;
  orbit.status = SolveStatus::Ok;
  return orbit;
}

struct HeteroclinicResult {
  SolveStatus status = SolveStatus::Ok;
  double n_h = kNaN;
  double bracket_lo = kNaN;
  double bracket_hi = kNaN;
};

/// Bisection on the cycle-existence flag. Existence is independent of
/// lambda0 (the scaling group), so the flag is evaluated at the given
/// lambda0 throughout.
inline HeteroclinicResult detect_heteroclinic(double n_lo, double n_hi,
                                              double lambda0 = 1.0,
                                              double width = 1e-2,
                                              const CycleOptions& copt = {}) {
  if (!(n_lo < n_hi)) throw DomainError("detect_heteroclinic: need n_lo < n_hi");
  HeteroclinicResult res;
  auto exists = [&](double n) { return find_periodic_orbit(n, lambda0, copt).converged; };
  bool lo = exists(n_lo), hi = exists(n_hi);
  if (lo == hi) {
    res.status = SolveStatus::BracketInvalid;
    return res;
  }
  while (n_hi - n_lo > width) {
    const double mid = 0.5 * (n_lo + n_hi);
    if (exists(mid) == lo) n_lo = mid;
    else n_hi = mid;
  }
  res.bracket_lo = n_lo;
  res.bracket_hi = n_hi;
  res.n_h = 0.5 * (n_lo + n_hi);
  return res;
}

}  // namespace thinfilm

#endif  // THINFILM_OSCILLATION_HPP
