#ifndef THINFILM_SHOOTING_HPP
#define THINFILM_SHOOTING_HPP

#include <functional>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "thinfilm/collocation.hpp"
#include "thinfilm/common.hpp"
#include "thinfilm/ivp.hpp"
#include "thinfilm/newton.hpp"
#include "thinfilm/ode_forms.hpp"
#include "thinfilm/profile.hpp"
#include "thinfilm/tails.hpp"

namespace thinfilm {

/// Result of one tail-to-origin integration: terminal state plus the dense
/// trajectories of both zones.
struct TailShot {
  Vec end_state;
  std::shared_ptr<DenseTrajectory> phys;   // physical zone, y in [0, y0-d]
  std::shared_ptr<DenseTrajectory> eta;    // log zone (CP only)
  double w_handoff = 0.0;
  SolveStatus status = SolveStatus::Ok;
};

/// Integrate a CP oscillatory tail from w = w_a (on the cycle, phase s0)
/// through the log zone to w = d, hand off, then through the physical zone
/// to y = 0. `orbit1` is the lambda0 = 1 cycle for this n; it is rescaled to
/// lambda0 = beta*y0 internally. When with_mass is set, a trailing running
/// integral of y^{N-1} f (N = 1 here) is appended in the physical zone.
inline TailShot shoot_cp_tail(EtaForm form, double n, double p, double alpha,
                              double beta, double y0, double s0,
                              const PeriodicOrbit& orbit1, const SolverConfig& cfg,
                              bool with_mass = false, bool store_dense = false) {
  TailShot shot;
  const double lam0 = beta * y0;
  if (!(lam0 > 0) || !(y0 > cfg.tail_handoff * 2)) {
    shot.status = SolveStatus::NotFound;
    return shot;
  }
  PeriodicOrbit orbit = orbit1.rescaled(lam0);
  const double mu = 3.0 / n;
  const int eta_dim = (form == EtaForm::CriticalThirdOrder) ? 3 : 4;

  // regularization floor in the log zone scales with the cycle amplitude
  const double amp = std::pow(lam0, 1.0 / n);
  Rhs eta_rhs = make_eta_rhs(form, n, p, alpha, beta, y0, 1e-12 * amp);

  const double eta_a = std::log(cfg.tail_start);
  const double eta_b = std::log(cfg.tail_handoff);
  Vec s0v(eta_dim);
  {
    Vec c = orbit.state(eta_a + s0);
    s0v[0] = c[0];
    s0v[1] = c[1];
    s0v[2] = c[2];
    if (eta_dim == 4) s0v[3] = -lam0 * c[0];
  }
  IvpOptions eopt;
  eopt.rel_tol = cfg.ivp_rel_tol;
  eopt.abs_tol = cfg.ivp_abs_tol * amp;
  eopt.store_dense = store_dense;
  auto er = integrate_ivp(eta_rhs, eta_a, eta_b, s0v, eopt);
  if (er.status != SolveStatus::Ok) {
    shot.status = er.status;
    return shot;
  }

  Vec phys0 = eta_to_physical(form, n, cfg.tail_handoff, er.y_final);
  const int dim = eta_dim;
  Vec y0v(dim + (with_mass ? 1 : 0));
  y0v.head(dim) = phys0;
  if (with_mass) y0v[dim] = 0.0;  // integrated inward; fixed up by caller

  SimilarityParams sp;
  sp.n = n;
  sp.p = p;
  sp.N = 1;
  sp.alpha = alpha;
  sp.beta = beta;
  OdeForm oform = (form == EtaForm::CriticalThirdOrder)
                      ? OdeForm::IntegratedThirdOrderCritical
                      : (form == EtaForm::PureTFE ? OdeForm::PureTFE
                                                  : OdeForm::FullFourthOrder);
  SolverConfig body_cfg = cfg;
  body_cfg.delta = std::min(cfg.delta, 1e-10);  // tail already resolves zeros
  OdeSystem sys = make_ode(sp, oform, body_cfg, with_mass);

  IvpOptions popt;
  popt.rel_tol = cfg.ivp_rel_tol;
  popt.abs_tol = cfg.ivp_abs_tol;
  popt.store_dense = store_dense;
  auto prb = integrate_ivp(sys.rhs, y0 - cfg.tail_handoff, 0.0, y0v, popt);
  if (prb.status != SolveStatus::Ok) {
    shot.status = prb.status;
    return shot;
  }
  shot.end_state = prb.y_final;
  if (store_dense) {
    shot.phys = std::make_shared<DenseTrajectory>(std::move(prb.dense));
    shot.eta = std::make_shared<DenseTrajectory>(std::move(er.dense));
  }
  shot.w_handoff = cfg.tail_handoff;
  return shot;
}

/// Integrate an FBP quadratic tail from w = w_a to the origin (N = 1) or to
/// the parity cut y_cut (N >= 2). The state is that of `sys` whose leading
/// components are (f, f', f''); extra trailing states are initialized by
/// `extra_init(w_a)`.
inline TailShot shoot_fbp_tail(const OdeSystem& sys, const TailBundle& b,
                               const SolverConfig& cfg, double y_end,
                               std::function<void(double, Vec&)> extra_init = {},
                               bool store_dense = false) {
  TailShot shot;
  const double w_a = std::max(cfg.tail_start, 1e-9) * std::max(1.0, b.y0);
  Vec s(sys.full_dim());
  double t4[4];
  fbp_tail_state(b, w_a, t4);
  s[0] = t4[0];
  s[1] = t4[1];
  s[2] = t4[2];
  for (int i = 3; i < s.size(); ++i) s[i] = 0.0;
  if (extra_init) extra_init(w_a, s);
  IvpOptions opt;
  opt.rel_tol = cfg.ivp_rel_tol;
  opt.abs_tol = cfg.ivp_abs_tol;
  opt.store_dense = store_dense;
  auto r = integrate_ivp(sys.rhs, b.y0 - w_a, y_end, s, opt);
  shot.status = r.status;
  if (r.status == SolveStatus::Ok) {
    shot.end_state = r.y_final;
    if (store_dense) shot.phys = std::make_shared<DenseTrajectory>(std::move(r.dense));
  }
  return shot;
}

/// Even-parity origin condition for radial problems integrated to a cut
/// y_c > 0: for a regular even solution f' - y f'' = O(y^3), which kills the
/// singular local modes y^{2-N} (and log for N = 2).
inline double parity_cut_target(double yc, double f1, double f2) {
  return f1 - yc * f2;
}

/// Assemble an output profile from a CP two-zone shot: uniform sampling of
/// the physical zone plus a geometrically clustered tail segment.
inline Profile assemble_cp_profile(const TailShot& shot, EtaForm form, double n,
                                   double y0, int N, const SolverConfig& cfg,
                                   int body_samples = 601) {
  Profile pr;
  pr.y0 = y0;
  if (!shot.phys) throw DomainError("assemble_cp_profile: dense trajectories missing");
  const double y_handoff = y0 - shot.w_handoff;
  for (int i = 0; i < body_samples; ++i) {
    const double y = y_handoff * i / (body_samples - 1.0);
    Vec s = shot.phys->eval(y);
    pr.grid.push_back(y);
    pr.values.push_back(s[0]);
    pr.deriv[0].push_back(s[1]);
    pr.deriv[1].push_back(s[2]);
    pr.deriv[2].push_back(kNaN);
  }
  if (shot.eta) {
    const double mu = 3.0 / n;
    std::vector<double> tail_y =
        clustered_grid(y_handoff + 1e-12, y0, cfg.cluster_ratio,
                       std::max(cfg.cluster_floor, cfg.tail_start / y0));
    for (double y : tail_y) {
      if (y <= y_handoff) continue;
      const double w = y0 - y;
      Vec es = shot.eta->eval(std::log(w));
      Vec ps = eta_to_physical(form, n, w, es);
      pr.grid.push_back(y);
      pr.values.push_back(ps[0]);
      pr.deriv[0].push_back(ps[1]);
      pr.deriv[1].push_back(ps[2]);
      pr.deriv[2].push_back(kNaN);
    }
  }
  pr.dense = shot.phys;
  pr.state_dim = static_cast<int>(shot.phys->eval(0.0).size());
  pr.mass = mass(pr, N);
  pr.sign_changes = count_sign_changes(pr.values);
  return pr;
}

/// Fill the third-derivative column of a profile built on a flux-state
/// system: f''' = (Phi + (|f|^{p-1}f)') |f|^{-n}.
inline void fill_third_derivative(Profile& pr, double n, double p, bool pure_tfe,
                                  const SolverConfig& cfg) {
  if (!pr.dense) return;
  const double ylim = pr.dense->forward()
                          ? std::max(pr.dense->t_begin(), pr.dense->t_end())
                          : std::max(pr.dense->t_begin(), pr.dense->t_end());
  for (size_t i = 0; i < pr.grid.size(); ++i) {
    if (pr.grid[i] > ylim) continue;
    Vec s = pr.dense->eval(pr.grid[i]);
    if (s.size() < 4) continue;
    const double f = s[0], f1 = s[1], Phi = s[3];
    const double nl = pure_tfe ? 0.0 : p * regularized_power(f, p - 1.0, cfg.delta) * f1;
    pr.deriv[2][i] = (Phi + nl) * regularized_power(f, -n, std::max(cfg.delta, 1e-12));
  }
}

}  // namespace thinfilm

#endif  // THINFILM_SHOOTING_HPP
