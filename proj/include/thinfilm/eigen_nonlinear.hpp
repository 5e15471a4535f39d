#ifndef THINFILM_EIGEN_NONLINEAR_HPP
#define THINFILM_EIGEN_NONLINEAR_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <vector>

#include "thinfilm/common.hpp"
#include "thinfilm/newton.hpp"
#include "thinfilm/oscillation.hpp"
#include "thinfilm/profile.hpp"
#include "thinfilm/shooting.hpp"
#include "thinfilm/similarity.hpp"
#include "thinfilm/tails.hpp"

namespace thinfilm {

/// Nonlinear eigenvalue record of the pure thin-film equation.
/// CP records carry (l, alpha, y0, s0); FBP records carry (k, alpha, y0, C0)
/// and, for the integro-differential families, the set index m and lambda.
struct EigenPair {
  SolveStatus status = SolveStatus::NotFound;
  double n = 0.0;
  int l = -1;          // CP eigenindex
  int m = -1;          // FBP even-set index (lambda_m family)
  int k = -1;          // FBP within-set index
  double alpha = kNaN;
  double lambda = kNaN;  // FBP general sets: lambda = (1 - alpha(n+4))/4
  double y0 = kNaN;
  double s0 = kNaN;      // CP tail phase
  double C0 = kNaN;      // FBP tail curvature/2 (signed: sign of f near y0)
  double residual = kInf;
  Profile profile;
  Parity parity = Parity::Even;
};

/// Count of "dominant" lobes of a half-line profile: maximal |f| between
/// consecutive sign changes, counted while it stays above frac*max|f|.
/// CP profiles have infinitely many interface oscillations, so the raw zero
/// count cannot index the eigenfunctions; the dominant structure can.
inline int dominant_lobes(const std::vector<double>& vals, double frac = 0.02) {
  double global = 0.0;
  for (double v : vals) global = std::max(global, std::fabs(v));
  if (global == 0.0) return 0;
  int lobes = 0;
  double lobe_max = 0.0;
  int cur_sign = 0;
  for (double v : vals) {
    const int s = sign(v);
    if (s == 0) continue;
    if (cur_sign == 0) cur_sign = s;
    if (s != cur_sign) {
      if (lobe_max >= frac * global) ++lobes;
      cur_sign = s;
      lobe_max = 0.0;
    }
    lobe_max = std::max(lobe_max, std::fabs(v));
  }
  if (lobe_max >= frac * global) ++lobes;
  return lobes;
}

/// CP eigenindex from the half-line dominant-lobe count.
inline int classify_cp_index(const Profile& pr, Parity parity) {
  const int lobes = dominant_lobes(pr.values);
  return parity == Parity::Even ? 2 * (lobes - 1) : 2 * lobes - 1;
}

namespace detail {

/// Shape residual of the quotiented CP problem. The scaling group of the
/// pure TFE is removed by pinning lambda0 = beta*y0 = 1, i.e.
/// y0 = 4/(1 - alpha n); unknowns are (alpha, s0) only and the residual is
/// normalized by the free amplitude.
struct CpShapeResult {
  Vec residual;
  double amplitude;   // f(0) (even) or f'(0) (odd)
  double y0_rep;
};

inline std::optional<CpShapeResult> cp_shape_residual(
    double n, Parity parity, double alpha, double s0, const PeriodicOrbit& orbit1,
    const SolverConfig& cfg) {
  const double beta = (1.0 - alpha * n) / 4.0;
  if (!(beta > 0)) return std::nullopt;
  const double y0 = 1.0 / beta;
  TailShot shot = shoot_cp_tail(EtaForm::PureTFE, n, kNaN, alpha, beta, y0, s0,
                                orbit1, cfg, false, false);
  if (shot.status != SolveStatus::Ok) return std::nullopt;
  const double F = shot.end_state[0], F1 = shot.end_state[1],
               F2 = shot.end_state[2], Phi = shot.end_state[3];
  CpShapeResult out;
  out.y0_rep = y0;
  Vec r(2);
  if (parity == Parity::Even) {
    out.amplitude = F;
    const double a = std::fabs(F) + 1e-300;
    r << F1 / a, Phi / a;
  } else {
    out.amplitude = F1;
    const double a = std::fabs(F1) + 1e-300;
    r << F / a, F2 / a;
  }
  out.residual = r;
  return out;
}

}  // namespace detail

struct CpEigenSeeds {
  std::vector<double> alpha;           // candidate eigenvalue guesses
  int s0_samples = 12;                 // phase-scan resolution over one period
};

/// Solve the Cauchy-problem nonlinear eigenvalue problem
///   -(|f|^n f''')' + ((1-alpha n)/4) y f' + alpha f = 0,  f compactly
/// supported with the oscillatory interface bundle, normalized F_l(0) = 1
/// (even l) or F_l'(0) = 1 (odd l).
inline EigenPair solve_cp_eigen(double n, int l, const SolverConfig& cfg = {},
                                CpEigenSeeds seeds = {}) {
  if (!(n > 0))
    throw DomainError("solve_cp_eigen: n must be positive (n = 0 is the linear theory)");
  if (l < 0 || l > 3)
    throw DomainError("solve_cp_eigen: supported eigenindex range is 0..3");
  EigenPair rec;
  rec.n = n;
  rec.l = l;
  rec.parity = (l % 2 == 0) ? Parity::Even : Parity::Odd;

  PeriodicOrbit orbit1 = find_periodic_orbit(n, 1.0);
  if (!orbit1.converged) {
    rec.status = orbit1.status;
    return rec;
  }

  if (seeds.alpha.empty()) {
    // branch start values (l+1)/4 at n = 0 bent toward the explicit l = 0 law
    const double a0 = 1.0 / (4.0 + n);
    const double scale = a0 * 4.0;  // = alpha_0(n)/alpha_0(0)
    const double base = (l + 1) * 0.25 * scale;
    if (l == 0) seeds.alpha = {a0};
    else seeds.alpha = {0.8 * base, 0.9 * base, base, 1.1 * base};
  }

  auto shape = [&](const Vec& x) -> std::optional<Vec> {
    auto r = detail::cp_shape_residual(n, rec.parity, x[0], x[1], orbit1, cfg);
    if (!r) return std::nullopt;
    return r->residual;
  };

  // multistart over (alpha, s0); the cycle's odd symmetry phi(eta + T/2) =
  // -phi(eta) halves the phase scan (the other half gives -f).
  struct Cand {
    double score, a, s0;
  };
  std::vector<Cand> cands;
  const double T = orbit1.period;
  for (double a : seeds.alpha) {
    for (int i = 0; i < seeds.s0_samples; ++i) {
      const double s0 = T * i / seeds.s0_samples;
      auto r = detail::cp_shape_residual(n, rec.parity, a, s0, orbit1, cfg);
      if (r) cands.push_back({r->residual.cwiseAbs().maxCoeff(), a, s0});
    }
  }
  std::sort(cands.begin(), cands.end(),
            [](const Cand& a, const Cand& b) { return a.score < b.score; });

  NewtonOptions nopt;
  nopt.tol = cfg.newton_tol;
  nopt.max_iters = cfg.max_newton_iters;
  nopt.fd_step = 3e-7;
  nopt.min_damping = cfg.min_damping;

  NewtonResult best;
  for (size_t ic = 0; ic < cands.size() && ic < 10; ++ic) {
    Vec x0(2);
    x0 << cands[ic].a, cands[ic].s0;
    auto nr = newton_solve(shape, x0, nopt);
    if (nr.status != SolveStatus::Ok) continue;
    // validate the index before accepting
    auto sr = detail::cp_shape_residual(n, rec.parity, nr.x[0], nr.x[1], orbit1, cfg);
    if (!sr) continue;
    double amp = sr->amplitude;
    double s0 = nr.x[1];
    if (amp < 0) {  // reflected profile: shift phase by half a period
      s0 = std::fmod(s0 + T / 2, T);
      auto sr2 = detail::cp_shape_residual(n, rec.parity, nr.x[0], s0, orbit1, cfg);
      if (!sr2 || sr2->amplitude < 0) continue;
      amp = sr2->amplitude;
    }
    // rescale to unit normalization: b = 1/amp, y0 -> y0 * amp^{-n/4},
    // s0 -> s0 - (n/4) ln b
    const double alpha = nr.x[0];
    const double beta = (1.0 - alpha * n) / 4.0;
    const double y0n = (1.0 / beta) * std::pow(amp, -n / 4.0);
    const double s0n = s0 + (n / 4.0) * std::log(amp);
    TailShot shot = shoot_cp_tail(EtaForm::PureTFE, n, kNaN, alpha, beta, y0n, s0n,
                                  orbit1, cfg, true, true);
    if (shot.status != SolveStatus::Ok) continue;
    Profile pr = assemble_cp_profile(shot, EtaForm::PureTFE, n, y0n, 1, cfg);
    fill_third_derivative(pr, n, kNaN, true, cfg);
    const int lhat = classify_cp_index(pr, rec.parity);
    if (lhat != l) {
      if (best.status != SolveStatus::Ok) {
        best = nr;
        best.status = SolveStatus::WrongIndex;
      }
      continue;
    }
    rec.status = SolveStatus::Ok;
    rec.alpha = alpha;
    rec.y0 = y0n;
    rec.s0 = std::fmod(s0n, T);
    rec.profile = std::move(pr);
    rec.residual = nr.residual_norm;
    return rec;
  }
  rec.status = (best.status == SolveStatus::WrongIndex) ? SolveStatus::WrongIndex
                                                        : SolveStatus::NewtonDiverged;
  return rec;
}

// ---------------------------------------------------------------------------
// FBP nonlinear eigenfunctions of the pure TFE
// ---------------------------------------------------------------------------

namespace detail {

/// System for -|f|^n f''' + beta_eff y f = lambda I, I' = f (lambda = 0
/// reduces to the classic zero-eigenvalue problem). State (f, f', f'', I).
inline Rhs fbp_pure_rhs(double n, double beta_eff, double lambda, double delta) {
  return [=](double y, const Vec& s, Vec& ds) {
    ds[0] = s[1];
    ds[1] = s[2];
    ds[2] = (beta_eff * y * s[0] - lambda * s[3]) * regularized_power(s[0], -n, delta);
    ds[3] = s[0];
  };
}

}  // namespace detail

/// Solve the FBP lambda = 0 nonlinear eigenproblem
///   -|f|^n f''' + y f/(4+n) = 0, f(0) = 1, f'(0) = 0, f(y0) = f'(y0) = 0
/// by shooting in (y0, C0) through the quadratic interface bundle. The k-th
/// record has k - 1 interior sign changes (k zeros counting the interface).
inline EigenPair solve_fbp_lambda0(double n, int k, const SolverConfig& cfg = {},
                                   std::vector<std::pair<double, double>> seeds = {}) {
  if (!(n > 0 && n < 1.5))
    throw DomainError("solve_fbp_lambda0: FBP bundle requires n in (0, 3/2)");
  if (k < 1) throw DomainError("solve_fbp_lambda0: k >= 1");
  EigenPair rec;
  rec.n = n;
  rec.k = k;
  rec.m = 0;
  rec.alpha = 1.0 / (4.0 + n);
  rec.lambda = 0.0;

  const double beta_eff = 1.0 / (4.0 + n);
  const double sigma = (k % 2 == 1) ? 1.0 : -1.0;  // sign of f near y0 for f(0)=+1
  OdeSystem sys;
  sys.dim = 4;
  sys.rhs = detail::fbp_pure_rhs(n, beta_eff, 0.0, std::min(cfg.delta, 1e-10));

  // the bundle table assumes f > 0 near y0; sign-changing members are
  // solved as the reflected profile (target f(0) = sigma) and flipped back
  auto resid = [&](const Vec& x) -> std::optional<Vec> {
    const double y0 = x[0], C0 = x[1];
    if (!(y0 > 0.3) || !(C0 > 0)) return std::nullopt;
    TailBundle b = make_fbp_bundle(n, 1, beta_eff, y0, C0);
    TailShot shot = shoot_fbp_tail(sys, b, cfg, 0.0);
    if (shot.status != SolveStatus::Ok) return std::nullopt;
    Vec r(2);
    r << shot.end_state[1], shot.end_state[0] - sigma;
    return r;
  };

  if (seeds.empty()) {
    // k = 1 at n = 1 is the explicit drop (y0 = 120^{1/4}); scan outward
    const double y1 = std::pow(120.0, 0.25);
    if (k == 1) {
      for (double y0g : {0.9 * y1, y1, 1.15 * y1, 1.4 * y1})
        for (double cg : {0.15, 0.35, 0.8}) seeds.push_back({y0g, cg});
    } else {
      for (double y0g = 1.15 * y1; y0g < 2.2 * y1; y0g += 0.08 * y1)
        for (double cg : {0.05, 0.12, 0.25, 0.6}) seeds.push_back({y0g, cg});
    }
  }

  struct Cand {
    double score, y0, c0;
  };
  std::vector<Cand> cands;
  for (auto [y0g, cg] : seeds) {
    Vec x(2);
    x << y0g, cg;
    auto r = resid(x);
    if (r) cands.push_back({r->cwiseAbs().maxCoeff(), y0g, cg});
  }
  std::sort(cands.begin(), cands.end(),
            [](const Cand& a, const Cand& b) { return a.score < b.score; });

  NewtonOptions nopt;
  nopt.tol = cfg.newton_tol;
  nopt.max_iters = cfg.max_newton_iters;
  nopt.min_damping = cfg.min_damping;
  Vec lower(2);
  lower << 0.5, 1e-4;
  nopt.lower = lower;

  for (size_t ic = 0; ic < cands.size() && ic < 12; ++ic) {
    Vec x0(2);
    x0 << cands[ic].y0, cands[ic].c0;
    auto nr = newton_solve(resid, x0, nopt);
    if (nr.status != SolveStatus::Ok) continue;
    const double y0 = nr.x[0], C0 = nr.x[1];
    TailBundle b = make_fbp_bundle(n, 1, beta_eff, y0, C0);
    TailShot shot = shoot_fbp_tail(sys, b, cfg, 0.0, {}, true);
    if (shot.status != SolveStatus::Ok) continue;
    Profile pr = profile_from_dense(shot.phys, y0, 1);
    if (sigma < 0) {  // flip back to f(0) = +1
      for (auto& v : pr.values) v = -v;
      for (auto& d : pr.deriv)
        for (auto& v : d) v = -v;
      pr.mass = -pr.mass;
      pr.dense.reset();  // dense trajectory belongs to the reflected solve
      pr.state_dim = 0;
    }
    if (pr.sign_changes != k - 1) continue;  // wrong family member
    rec.status = SolveStatus::Ok;
    rec.y0 = y0;
    rec.C0 = sigma * C0;
    rec.residual = nr.residual_norm;
    rec.profile = std::move(pr);
    return rec;
  }
  rec.status = SolveStatus::NotFound;
  return rec;
}

/// General even FBP sets (m = 2, 4, ...): state-augmented integro-ODE
///   -|f|^n f''' + ((1+n lambda)/(n+4)) y f = lambda int_0^y f,
///   f(0)=1, f'(0)=0, f = f' = |f|^n f''' = 0 at y+,
/// solved by Newton in (lambda, y+, C0). alpha = (1 - 4 lambda)/(n+4).
inline EigenPair solve_fbp_general(double n, int m, int k, const SolverConfig& cfg = {},
                                   std::vector<std::array<double, 3>> seeds = {}) {
  if (m == 0) return solve_fbp_lambda0(n, k, cfg);
  if (m % 2 != 0 || m < 0) throw DomainError("solve_fbp_general: m must be even");
  if (!(n > 0 && n < 1.5)) throw DomainError("solve_fbp_general: n in (0, 3/2)");
  EigenPair rec;
  rec.n = n;
  rec.m = m;
  rec.k = k;

  const double sigma = (k % 2 == 1) ? 1.0 : -1.0;
  auto resid = [&](const Vec& x) -> std::optional<Vec> {
    const double lambda = x[0], yp = x[1], C0 = x[2];
    if (!(yp > 0.3) || !(C0 > 0)) return std::nullopt;
    const double beta_eff = (1.0 + n * lambda) / (n + 4.0);
    if (!(beta_eff > 0)) return std::nullopt;
    OdeSystem sys;
    sys.dim = 4;
    sys.rhs = detail::fbp_pure_rhs(n, beta_eff, lambda, cfg.delta);
    TailBundle b = make_fbp_bundle(n, 1, beta_eff, yp, C0);
    TailShot shot = shoot_fbp_tail(
        sys, b, cfg, 0.0,
        [&](double w, Vec& s) { s[3] = fbp_tail_integral(b, w); });
    if (shot.status != SolveStatus::Ok) return std::nullopt;
    Vec r(3);
    r << shot.end_state[1], shot.end_state[3], shot.end_state[0] - sigma;
    return r;
  };

  NewtonOptions nopt;
  nopt.tol = cfg.newton_tol;
  nopt.max_iters = cfg.max_newton_iters;
  nopt.min_damping = cfg.min_damping;
  Vec lower(3);
  lower << -5.0, 0.5, 1e-4;
  nopt.lower = lower;

  for (const auto& sd : seeds) {
    Vec x0(3);
    x0 << sd[0], sd[1], sd[2];
    auto nr = newton_solve(resid, x0, nopt);
    if (nr.status != SolveStatus::Ok) continue;
    const double lambda = nr.x[0], yp = nr.x[1], C0 = nr.x[2];
    const double beta_eff = (1.0 + n * lambda) / (n + 4.0);
    OdeSystem sys;
    sys.dim = 4;
    sys.rhs = detail::fbp_pure_rhs(n, beta_eff, lambda, cfg.delta);
    TailBundle b = make_fbp_bundle(n, 1, beta_eff, yp, C0);
    TailShot shot = shoot_fbp_tail(
        sys, b, cfg, 0.0,
        [&](double w, Vec& s) { s[3] = fbp_tail_integral(b, w); }, true);
    if (shot.status != SolveStatus::Ok) continue;
    rec.status = SolveStatus::Ok;
    rec.lambda = lambda;
    rec.alpha = (1.0 - 4.0 * lambda) / (n + 4.0);
    rec.y0 = yp;
    rec.C0 = sigma * C0;
    rec.residual = nr.residual_norm;
    rec.profile = profile_from_dense(shot.phys, yp, 1);
    if (sigma < 0) {
      for (auto& v : rec.profile.values) v = -v;
      for (auto& d : rec.profile.deriv)
        for (auto& v : d) v = -v;
      rec.profile.mass = -rec.profile.mass;
      rec.profile.dense.reset();
      rec.profile.state_dim = 0;
    }
    return rec;
  }
  rec.status = seeds.empty() ? SolveStatus::NotFound : SolveStatus::NewtonDiverged;
  return rec;
}

/// Convergence report for the FBP -> CP limit: interfaces must increase
/// toward the CP interface and sup-norm distances on [0, y0^(1)] decrease.
struct CpLimitReport {
  std::vector<double> fbp_interfaces;
  std::vector<double> sup_distances;
  double cp_interface = kNaN;
  bool interfaces_monotone = true;
  bool distances_monotone = true;
};

inline CpLimitReport cp_limit_check(const EigenPair& cp,
                                    const std::vector<EigenPair>& fbp_records) {
  CpLimitReport rep;
  rep.cp_interface = cp.y0;
  if (fbp_records.empty()) return rep;
  const double ya = fbp_records.front().y0;
  for (const auto& r : fbp_records) {
    rep.fbp_interfaces.push_back(r.y0);
    double d = 0.0;
    for (int i = 0; i <= 200; ++i) {
      const double y = ya * i / 200.0;
      d = std::max(d, std::fabs(r.profile.eval(y) - cp.profile.eval(y)));
    }
    rep.sup_distances.push_back(d);
  }
  for (size_t i = 1; i < rep.fbp_interfaces.size(); ++i) {
    if (rep.fbp_interfaces[i] <= rep.fbp_interfaces[i - 1])
      rep.interfaces_monotone = false;
    if (rep.sup_distances[i] >= rep.sup_distances[i - 1])
      rep.distances_monotone = false;
  }
  if (!rep.fbp_interfaces.empty() && rep.fbp_interfaces.back() >= cp.y0)
    rep.interfaces_monotone = false;
  return rep;
}

}  // namespace thinfilm

#endif  // THINFILM_EIGEN_NONLINEAR_HPP
