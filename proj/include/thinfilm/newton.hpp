#ifndef THINFILM_NEWTON_HPP
#define THINFILM_NEWTON_HPP

#include <functional>
#include <optional>

#include <Eigen/Dense>

#include "thinfilm/common.hpp"

namespace thinfilm {

/// Residual map for small shooting systems. Returns nullopt when the
/// integration failed at the trial point (treated as an uphill step).
using ResidualMap = std::function<std::optional<Vec>(const Vec&)>;

struct NewtonResult {
  SolveStatus status = SolveStatus::NewtonDiverged;
  Vec x;
  Vec residual;
  double residual_norm = kInf;
  int iterations = 0;
};

struct NewtonOptions {
  double tol = 1e-9;
  int max_iters = 40;
  double fd_step = 1e-6;
  double min_damping = 1e-5;
  // optional per-component lower bounds (e.g. y0 > 0); step is clipped
  Vec lower;
  Vec upper;
};

/// Damped Newton with a forward-difference Jacobian. The damping halves
/// until the residual norm decreases; no silent stagnation is allowed.
inline NewtonResult newton_solve(const ResidualMap& F, Vec x0,
                                 const NewtonOptions& opt = {}) {
  NewtonResult res;
  res.x = std::move(x0);
  const int m = static_cast<int>(res.x.size());

  auto clip = [&](Vec v) {
    if (opt.lower.size() == m)
      for (int i = 0; i < m; ++i) v[i] = std::max(v[i], opt.lower[i]);
    if (opt.upper.size() == m)
      for (int i = 0; i < m; ++i) v[i] = std::min(v[i], opt.upper[i]);
    return v;
  };

  std::optional<Vec> f0 = F(res.x);
  if (!f0) return res;
  double nf = f0->cwiseAbs().maxCoeff();

  for (int it = 0; it < opt.max_iters; ++it) {
    res.iterations = it;
    res.residual = *f0;
    res.residual_norm = nf;
    if (nf < opt.tol) {
      res.status = SolveStatus::Ok;
      return res;
    }
    // finite-difference Jacobian, step max(h, h|x_i|)
    Eigen::MatrixXd J(f0->size(), m);
    for (int j = 0; j < m; ++j) {
      Vec xp = res.x;
      const double h = std::max(opt.fd_step, opt.fd_step * std::fabs(xp[j]));
      xp[j] += h;
      std::optional<Vec> fp = F(clip(xp));
      if (!fp) {
        xp[j] = res.x[j] - h;
        fp = F(clip(xp));
        if (!fp) return res;
        J.col(j) = (*f0 - *fp) / h;
      } else {
        J.col(j) = (*fp - *f0) / h;
      }
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(J);
    if (!lu.isInvertible() && lu.rank() < m) {
      res.status = SolveStatus::JacobianSingular;
      return res;
    }
    Vec step = lu.solve(*f0);
    if (!step.allFinite()) {
      res.status = SolveStatus::JacobianSingular;
      return res;
    }

    double lambda = 1.0;
    bool improved = false;
    while (lambda >= opt.min_damping) {
      Vec xt = clip(res.x - lambda * step);
      std::optional<Vec> ft = F(xt);
      if (ft && ft->allFinite()) {
        const double nt = ft->cwiseAbs().maxCoeff();
        if (nt < nf) {
          res.x = xt;
          f0 = ft;
          nf = nt;
          improved = true;
          break;
        }
      }
      lambda *= 0.5;
    }
    if (!improved) {
      res.status = SolveStatus::NewtonDiverged;
      return res;
    }
  }
  res.residual = *f0;
  res.residual_norm = nf;
  res.status = (nf < opt.tol) ? SolveStatus::Ok : SolveStatus::NewtonDiverged;
  return res;
}

}  // namespace thinfilm

#endif  // THINFILM_NEWTON_HPP
