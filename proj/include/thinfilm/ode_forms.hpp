#ifndef THINFILM_ODE_FORMS_HPP
#define THINFILM_ODE_FORMS_HPP

#include <functional>

#include "thinfilm/common.hpp"
#include "thinfilm/ivp.hpp"
#include "thinfilm/profile.hpp"
#include "thinfilm/similarity.hpp"

namespace thinfilm {

/// First-order system for one of the similarity ODE forms.
///
/// State conventions (documented once, used everywhere):
///   FullFourthOrder (N=1):  (f, f', f'', Phi),  Phi = |f|^n f''' - (|f|^{p-1}f)'
///   PureTFE        (N=1):   (f, f', f'', Phi),  Phi = |f|^n f'''
///   IntegratedThirdOrderCritical (N>=1): (f, f', f'')
/// with the once-integrated flux satisfying Phi' = beta y f' + alpha f.
/// An optional trailing mass component m' = y^{N-1} f can be appended.
struct OdeSystem {
  int dim = 0;
  bool has_mass = false;
  Rhs rhs;

  int full_dim() const { return dim + (has_mass ? 1 : 0); }
};

inline OdeSystem make_ode(const SimilarityParams& sp, OdeForm form,
                          const SolverConfig& cfg, bool with_mass = false) {
  OdeSystem sys;
  const double n = sp.n, p = sp.p, alpha = sp.alpha, beta = sp.beta;
  const int N = sp.N;
  const double delta = cfg.delta;
  // curvature terms vanish at the origin for regular (even) data
  const double y_floor = 1e-12;

  switch (form) {
    case OdeForm::FullFourthOrder: {
      if (N != 1)
        throw DomainError("FullFourthOrder is implemented in the 1D section only");
      sys.dim = 4;
      sys.rhs = [n, p, alpha, beta, delta, with_mass](double y, const Vec& s, Vec& ds) {
        const double f = s[0], f1 = s[1], Phi = s[3];
        const double nl1 = p * regularized_power(f, p - 1.0, delta) * f1;
        ds[0] = f1;
        ds[1] = s[2];
        ds[2] = (Phi + nl1) * regularized_power(f, -n, delta);
        ds[3] = beta * y * f1 + alpha * f;
        if (with_mass) ds[4] = f;
      };
      break;
    }
    case OdeForm::PureTFE: {
      if (N != 1)
        throw DomainError("PureTFE shooting form is implemented in 1D only");
      sys.dim = 4;
      sys.rhs = [n, alpha, beta, delta, with_mass](double y, const Vec& s, Vec& ds) {
        const double f = s[0], f1 = s[1], Phi = s[3];
        ds[0] = f1;
        ds[1] = s[2];
        ds[2] = Phi * regularized_power(f, -n, delta);
        ds[3] = beta * y * f1 + alpha * f;
        if (with_mass) ds[4] = f;
      };
      break;
    }
    case OdeForm::IntegratedThirdOrderCritical: {
      const double p0 = sp.p0();
      sys.dim = 3;
      sys.rhs = [n, beta, p0, N, delta, y_floor, with_mass](double y, const Vec& s,
                                                            Vec& ds) {
        const double f = s[0], f1 = s[1], f2 = s[2];
        double curv = 0.0;
        if (N > 1 && y > y_floor) curv = (N - 1) / y * (f2 - f1 / y);
        ds[0] = f1;
        ds[1] = f2;
        ds[2] = -curv + p0 * regularized_power(f, 2.0 / N, delta) * f1 +
                beta * y * signed_power(f, 1.0 - n, delta);
        if (with_mass) ds[3] = (N == 1 ? 1.0 : std::pow(y, N - 1)) * f;
      };
      break;
    }
  }
  sys.has_mass = with_mass;
  return sys;
}

/// Spec-level single-point evaluation of the selected form.
inline Vec ode_rhs(double y, const Vec& state, const SimilarityParams& sp,
                   OdeForm form, const SolverConfig& cfg = {}) {
  OdeSystem sys = make_ode(sp, form, cfg);
  if (state.size() != sys.dim)
    throw DomainError("ode_rhs: state dimension does not match the form");
  Vec ds(sys.dim);
  sys.rhs(y, state, ds);
  return ds;
}

/// Max-norm defect of a dense trajectory against a first-order system,
/// sampled at interior points between stored steps. Components are scaled
/// by (1 + |state|). This is the universal convergence certificate.
inline double residual_norm(const DenseTrajectory& dense, const Rhs& rhs, int dim,
                            int samples_per_step = 3) {
  double worst = 0.0;
  Vec s, ds_num, ds(dim);
  for (const DenseStep& st : dense.steps) {
    for (int k = 1; k <= samples_per_step; ++k) {
      const double t = st.t0 + (st.t1 - st.t0) * k / (samples_per_step + 1.0);
      st.eval(t, s);
      st.eval_deriv(t, ds_num);
      rhs(t, s, ds);
      for (int i = 0; i < dim && i < s.size(); ++i) {
        const double d = std::fabs(ds_num[i] - ds[i]) / (1.0 + std::fabs(s[i]));
        worst = std::max(worst, d);
      }
    }
  }
  return worst;
}

/// Defect of a stored profile against a similarity form. Requires the
/// profile to carry its dense trajectory.
inline double residual_norm(const Profile& pr, const SimilarityParams& sp,
                            OdeForm form, const SolverConfig& cfg = {}) {
  if (!pr.dense) throw DomainError("residual_norm: profile has no dense trajectory");
  const int base_dim = (form == OdeForm::IntegratedThirdOrderCritical) ? 3 : 4;
  OdeSystem sys = make_ode(sp, form, cfg, pr.state_dim > base_dim);
  return residual_norm(*pr.dense, sys.rhs, sys.dim);
}

}  // namespace thinfilm

#endif  // THINFILM_ODE_FORMS_HPP
