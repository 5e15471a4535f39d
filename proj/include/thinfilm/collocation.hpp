#ifndef THINFILM_COLLOCATION_HPP
#define THINFILM_COLLOCATION_HPP

#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "thinfilm/common.hpp"
#include "thinfilm/ivp.hpp"

namespace thinfilm {

/// Two-point boundary value problem with optional unknown constant
/// parameters:  y' = f(x, y, q),  g(y(a), y(b), q) = 0,
/// where g has dim + nq components.
struct BvpProblem {
  int dim = 0;
  int nq = 0;
  std::function<void(double, const Vec&, const Vec&, Vec&)> rhs;
  std::function<void(const Vec&, const Vec&, const Vec&, Vec&)> bc;
};

struct BvpOptions {
  double rel_tol = 1e-6;
  double abs_tol = 1e-8;
  int max_mesh_points = 12000;
  int max_newton_iters = 60;
  double newton_tol_factor = 1e-2;  // Newton residual below factor*abs_tol
  double fd_step = 1e-7;
  double min_damping = 1.0 / 1024.0;
  int max_refinements = 12;
};

struct BvpResult {
  SolveStatus status = SolveStatus::NewtonDiverged;
  std::vector<double> mesh;
  Eigen::MatrixXd states;  // dim x (mesh points)
  Vec params;
  double max_defect = kInf;
  int newton_iterations = 0;
  std::shared_ptr<DenseTrajectory> dense;

  Vec state_at(size_t i) const { return states.col(i); }
};

namespace detail {

/// Simpson/Lobatto-IIIA residual on one interval (the bvp4c scheme):
///   ymid = (y0+y1)/2 - h/8 (f1 - f0)
///   res  = y1 - y0 - h/6 (f0 + 4 fmid + f1)
inline void interval_residual(const BvpProblem& pb, double x0, double x1,
                              const Vec& y0, const Vec& y1, const Vec& q,
                              Vec& f0, Vec& f1, Vec& fm, Vec& out) {
  const double h = x1 - x0;
  pb.rhs(x0, y0, q, f0);
  pb.rhs(x1, y1, q, f1);
  Vec ym = 0.5 * (y0 + y1) - (h / 8.0) * (f1 - f0);
  pb.rhs(0.5 * (x0 + x1), ym, q, fm);
  out = y1 - y0 - (h / 6.0) * (f0 + 4.0 * fm + f1);
}

}  // namespace detail

/// Piecewise-polynomial collocation (4th order, Lobatto IIIA / MIRK4) with a
/// damped Newton iteration on the assembled sparse system and defect-driven
/// mesh refinement.
class CollocationSolver {
 public:
  CollocationSolver(BvpProblem pb, BvpOptions opt = {})
      : pb_(std::move(pb)), opt_(opt) {}

  BvpResult solve(const std::vector<double>& mesh0,
                  const std::function<Vec(double)>& guess, const Vec& q0) const {
    std::vector<double> mesh = mesh0;
    const int d = pb_.dim;
    Eigen::MatrixXd Y(d, mesh.size());
    for (size_t i = 0; i < mesh.size(); ++i) Y.col(i) = guess(mesh[i]);
    Vec q = q0;

    BvpResult res;
    for (int pass = 0; pass <= opt_.max_refinements; ++pass) {
      SolveStatus st = newton_pass(mesh, Y, q, res.newton_iterations);
      if (st != SolveStatus::Ok) {
        res.status = st;
        res.mesh = mesh;
        res.states = Y;
        res.params = q;
        return res;
      }
      // defect estimate per interval
      std::vector<double> defect(mesh.size() - 1, 0.0);
      double worst = 0.0;
      Vec f0(d), f1(d), fm(d), s(d), ds(d), fr(d);
      for (size_t i = 0; i + 1 < mesh.size(); ++i) {
        const double h = mesh[i + 1] - mesh[i];
        pb_.rhs(mesh[i], Y.col(i), q, f0);
        pb_.rhs(mesh[i + 1], Y.col(i + 1), q, f1);
        DenseStep hs = hermite_step(mesh[i], mesh[i + 1], Y.col(i), f0, Y.col(i + 1), f1);
        for (double th : {0.25, 0.75}) {
          const double x = mesh[i] + th * h;
          hs.eval(x, s);
          hs.eval_deriv(x, ds);
          pb_.rhs(x, s, q, fr);
          for (int c = 0; c < d; ++c) {
            const double sc = opt_.abs_tol + opt_.rel_tol * std::fabs(s[c]);
            defect[i] = std::max(defect[i], std::fabs(ds[c] - fr[c]) * h / sc);
          }
        }
        worst = std::max(worst, defect[i]);
      }
      res.max_defect = worst;
      if (worst <= 1.0 || pass == opt_.max_refinements) {
        res.status = (worst <= 1.0) ? SolveStatus::Ok : SolveStatus::MeshLimitExceeded;
        finalize(mesh, Y, q, res);
        return res;
      }
      // split offending intervals (twice when badly off)
      std::vector<double> nm;
      Eigen::MatrixXd NY(d, 0);
      std::vector<Vec> cols;
      for (size_t i = 0; i + 1 < mesh.size(); ++i) {
        nm.push_back(mesh[i]);
        cols.push_back(Y.col(i));
        int splits = defect[i] > 1.0 ? (defect[i] > 256.0 ? 3 : 1) : 0;
        for (int sdx = 1; sdx <= splits; ++sdx) {
          const double x = mesh[i] + (mesh[i + 1] - mesh[i]) * sdx / (splits + 1.0);
          pb_.rhs(mesh[i], Y.col(i), q, f0);
          pb_.rhs(mesh[i + 1], Y.col(i + 1), q, f1);
          DenseStep hs =
              hermite_step(mesh[i], mesh[i + 1], Y.col(i), f0, Y.col(i + 1), f1);
          hs.eval(x, s);
          nm.push_back(x);
          cols.push_back(s);
        }
      }
      nm.push_back(mesh.back());
      cols.push_back(Y.col(mesh.size() - 1));
      if (static_cast<int>(nm.size()) > opt_.max_mesh_points) {
        res.status = SolveStatus::MeshLimitExceeded;
        finalize(mesh, Y, q, res);
        return res;
      }
      mesh = nm;
      Y.resize(d, mesh.size());
      for (size_t i = 0; i < cols.size(); ++i) Y.col(i) = cols[i];
    }
    return res;
  }

  static DenseStep hermite_step(double x0, double x1, const Vec& y0, const Vec& f0,
                                const Vec& y1, const Vec& f1) {
    DenseStep s;
    const double h = x1 - x0;
    s.t0 = x0;
    s.t1 = x1;
    s.r1 = y0;
    s.r2 = y1 - y0;
    s.r3 = h * f0 - s.r2;
    s.r4 = s.r2 - h * f1 - s.r3;
    s.r5 = Vec::Zero(y0.size());
    return s;
  }

 private:
  void finalize(const std::vector<double>& mesh, const Eigen::MatrixXd& Y,
                const Vec& q, BvpResult& res) const {
    res.mesh = mesh;
    res.states = Y;
    res.params = q;
    auto dense = std::make_shared<DenseTrajectory>();
    Vec f0(pb_.dim), f1(pb_.dim);
    for (size_t i = 0; i + 1 < mesh.size(); ++i) {
      pb_.rhs(mesh[i], Y.col(i), q, f0);
      pb_.rhs(mesh[i + 1], Y.col(i + 1), q, f1);
      dense->steps.push_back(
          hermite_step(mesh[i], mesh[i + 1], Y.col(i), f0, Y.col(i + 1), f1));
    }
    res.dense = dense;
  }

  SolveStatus newton_pass(const std::vector<double>& mesh, Eigen::MatrixXd& Y, Vec& q,
                          int& iter_count) const {
    const int d = pb_.dim, nq = pb_.nq;
    const int M = static_cast<int>(mesh.size()) - 1;
    const int nun = d * (M + 1) + nq;

    auto assemble_residual = [&](const Eigen::MatrixXd& Yc, const Vec& qc, Vec& R) {
      Vec f0(d), f1(d), fm(d), out(d);
      R.resize(nun);
      for (int i = 0; i < M; ++i) {
        detail::interval_residual(pb_, mesh[i], mesh[i + 1], Yc.col(i), Yc.col(i + 1),
                                  qc, f0, f1, fm, out);
        R.segment(i * d, d) = out;
      }
      Vec g(d + nq);
      pb_.bc(Yc.col(0), Yc.col(M), qc, g);
      R.segment(M * d, d + nq) = g;
    };

    Vec R;
    assemble_residual(Y, q, R);
    if (!R.allFinite()) return SolveStatus::NewtonDiverged;
    double nr = R.cwiseAbs().maxCoeff();
    const double tol = opt_.newton_tol_factor * opt_.abs_tol;

    for (int it = 0; it < opt_.max_newton_iters; ++it) {
      ++iter_count;
      if (nr < tol) return SolveStatus::Ok;

      // sparse FD Jacobian
      std::vector<Eigen::Triplet<double>> trips;
      trips.reserve(static_cast<size_t>(M) * d * (2 * d + nq) +
                    static_cast<size_t>(d + nq) * (2 * d + nq));
      Vec f0(d), f1(d), fm(d), base(d), pert(d);
      for (int i = 0; i < M; ++i) {
        detail::interval_residual(pb_, mesh[i], mesh[i + 1], Y.col(i), Y.col(i + 1), q,
                                  f0, f1, fm, base);
        for (int side = 0; side < 2; ++side) {
          for (int c = 0; c < d; ++c) {
            Vec ya = Y.col(i), yb = Y.col(i + 1);
            double& ref = (side == 0) ? ya[c] : yb[c];
            const double h = std::max(opt_.fd_step, opt_.fd_step * std::fabs(ref));
            ref += h;
            detail::interval_residual(pb_, mesh[i], mesh[i + 1], ya, yb, q, f0, f1, fm,
                                      pert);
            const int col = (i + side) * d + c;
            for (int r = 0; r < d; ++r) {
              const double v = (pert[r] - base[r]) / h;
              if (v != 0.0) trips.emplace_back(i * d + r, col, v);
            }
          }
        }
        for (int c = 0; c < nq; ++c) {
          Vec qp = q;
          const double h = std::max(opt_.fd_step, opt_.fd_step * std::fabs(qp[c]));
          qp[c] += h;
          detail::interval_residual(pb_, mesh[i], mesh[i + 1], Y.col(i), Y.col(i + 1),
                                    qp, f0, f1, fm, pert);
          for (int r = 0; r < d; ++r) {
            const double v = (pert[r] - base[r]) / h;
            if (v != 0.0) trips.emplace_back(i * d + r, d * (M + 1) + c, v);
          }
        }
      }
      {
        Vec g0(d + nq), g1(d + nq);
        pb_.bc(Y.col(0), Y.col(M), q, g0);
        for (int side = 0; side < 2; ++side) {
          for (int c = 0; c < d; ++c) {
            Vec ya = Y.col(0), yb = Y.col(M);
            double& ref = (side == 0) ? ya[c] : yb[c];
            const double h = std::max(opt_.fd_step, opt_.fd_step * std::fabs(ref));
            ref += h;
            pb_.bc(ya, yb, q, g1);
            const int col = (side == 0 ? 0 : M) * d + c;
            for (int r = 0; r < d + nq; ++r) {
              const double v = (g1[r] - g0[r]) / h;
              if (v != 0.0) trips.emplace_back(M * d + r, col, v);
            }
          }
        }
        for (int c = 0; c < nq; ++c) {
          Vec qp = q;
          const double h = std::max(opt_.fd_step, opt_.fd_step * std::fabs(qp[c]));
          qp[c] += h;
          pb_.bc(Y.col(0), Y.col(M), qp, g1);
          for (int r = 0; r < d + nq; ++r) {
            const double v = (g1[r] - g0[r]) / h;
            if (v != 0.0) trips.emplace_back(M * d + r, d * (M + 1) + c, v);
          }
        }
      }

      Eigen::SparseMatrix<double> J(nun, nun);
      J.setFromTriplets(trips.begin(), trips.end());
      Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
      lu.analyzePattern(J);
      lu.factorize(J);
      if (lu.info() != Eigen::Success) return SolveStatus::JacobianSingular;
      Vec step = lu.solve(R);
      if (!step.allFinite()) return SolveStatus::JacobianSingular;

      double lambda = 1.0;
      bool improved = false;
      Eigen::MatrixXd Yt(d, M + 1);
      Vec qt, Rt;
      while (lambda >= opt_.min_damping) {
        for (int i = 0; i <= M; ++i)
          Yt.col(i) = Y.col(i) - lambda * step.segment(i * d, d);
        qt = q - lambda * step.tail(nq);
        assemble_residual(Yt, qt, Rt);
        if (Rt.allFinite()) {
          const double nt = Rt.cwiseAbs().maxCoeff();
          if (nt < nr || nt < tol) {
            Y = Yt;
            q = qt;
            R = Rt;
            nr = nt;
            improved = true;
            break;
          }
        }
        lambda *= 0.5;
      }
      if (!improved) return SolveStatus::NewtonDiverged;
    }
    return nr < tol ? SolveStatus::Ok : SolveStatus::NewtonDiverged;
  }

  BvpProblem pb_;
  BvpOptions opt_;
};

/// Convenience wrapper matching the shoot/collocate pairing.
inline BvpResult collocate(const BvpProblem& pb, const std::vector<double>& mesh,
                           const std::function<Vec(double)>& guess, const Vec& q0,
                           const BvpOptions& opt = {}) {
  return CollocationSolver(pb, opt).solve(mesh, guess, q0);
}

}  // namespace thinfilm

#endif  // THINFILM_COLLOCATION_HPP
