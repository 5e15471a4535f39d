#ifndef THINFILM_IVP_HPP
#define THINFILM_IVP_HPP

#include <algorithm>
#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "thinfilm/common.hpp"

namespace thinfilm {

using Vec = Eigen::VectorXd;
using Rhs = std::function<void(double, const Vec&, Vec&)>;

/// Scalar event g(t, y); a root of g along the trajectory is located on the
/// dense interpolant. direction: +1 up-crossings, -1 down-crossings, 0 both.
struct Event {
  std::function<double(double, const Vec&)> g;
  int direction = 0;
  bool terminal = false;
};

struct EventHit {
  int event_index;
  double t;
  Vec state;
};

/// One accepted Dormand-Prince step with its continuous extension.
struct DenseStep {
  double t0, t1;  // t1 may be < t0 for backward integration
  Vec r1, r2, r3, r4, r5;

  void eval(double t, Vec& y) const {
    const double h = t1 - t0;
    const double th = (t - t0) / h;
    const double th1 = 1.0 - th;
    y = r1 + th * (r2 + th1 * (r3 + th * (r4 + th1 * r5)));
  }
  void eval_deriv(double t, Vec& dy) const {
    const double h = t1 - t0;
    const double th = (t - t0) / h;
    dy = (r2 + (1.0 - 2.0 * th) * r3 + th * (2.0 - 3.0 * th) * r4 +
          th * (2.0 - th * (6.0 - 4.0 * th)) * r5) /
         h;
  }
};

/// Piecewise-polynomial trajectory from the adaptive integrator.
class DenseTrajectory {
 public:
  std::vector<DenseStep> steps;

  double t_begin() const { return steps.front().t0; }
  double t_end() const { return steps.back().t1; }
  bool forward() const { return steps.back().t1 >= steps.front().t0; }

  Vec eval(double t) const {
    Vec y;
    locate(t).eval(t, y);
    return y;
  }
  Vec eval_deriv(double t) const {
    Vec dy;
    locate(t).eval_deriv(t, dy);
    return dy;
  }

  const DenseStep& locate(double t) const {
    const bool fwd = forward();
    auto cmp = [fwd](const DenseStep& s, double tt) {
      return fwd ? s.t1 < tt : s.t1 > tt;
    };
    auto it = std::lower_bound(steps.begin(), steps.end(), t, cmp);
    if (it == steps.end()) --it;
    return *it;
  }
};

struct IvpResult {
  SolveStatus status = SolveStatus::Ok;
  double t_final = 0.0;
  Vec y_final;
  DenseTrajectory dense;
  std::vector<EventHit> events;
  long n_steps = 0;
  long n_rejected = 0;
};

struct IvpOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double initial_step = 0.0;  // 0: automatic
  double max_step = kInf;
  long max_steps = 2000000;
  bool store_dense = true;
  std::vector<Event> events;
};

namespace detail {
// Dormand-Prince 5(4) tableau.
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                        a53 = 64448.0 / 6561, a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                        a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
inline constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
inline constexpr double d1 = -12715105075.0 / 11282082432.0,
                        d3 = 87487479700.0 / 32700410799.0,
                        d4 = -10690763975.0 / 1880347072.0,
                        d5 = 701980252875.0 / 199316789632.0,
                        d6 = -1453857185.0 / 822651844.0,
                        d7 = 69997945.0 / 29380423.0;
}  // namespace detail

/// Adaptive embedded Dormand-Prince 5(4) with dense output and events.
/// Integrates from t0 to t1 (either direction).
inline IvpResult integrate_ivp(const Rhs& rhs, double t0, double t1, Vec y0,
                               const IvpOptions& opt = {}) {
  using namespace detail;
  IvpResult res;
  const int n = static_cast<int>(y0.size());
  const double dir = (t1 >= t0) ? 1.0 : -1.0;
  Vec k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n), yerr(n);

  rhs(t0, y0, k1);
  double h;
  if (opt.initial_step > 0) {
    h = dir * opt.initial_step;
  } else {
    double d0 = y0.cwiseAbs().maxCoeff() + opt.abs_tol;
    double d1n = k1.cwiseAbs().maxCoeff() + 1e-300;
    h = dir * std::min(std::fabs(t1 - t0), std::max(1e-8, 1e-2 * d0 / d1n));
  }
  double t = t0;
  const double hmin = 1e-14 * std::max(1.0, std::fabs(t1 - t0));

  auto finite = [](const Vec& v) { return v.allFinite(); };

  while (dir * (t1 - t) > 0) {
    if (std::fabs(h) > opt.max_step) h = dir * opt.max_step;
    if (dir * (t + h - t1) > 0) h = t1 - t;
    if (std::fabs(h) < hmin || res.n_steps > opt.max_steps) {
      res.status = SolveStatus::StepUnderflow;
      res.t_final = t;
      res.y_final = y0;
      return res;
    }

    ytmp = y0 + h * (a21 * k1);
    rhs(t + c2 * h, ytmp, k2);
    ytmp = y0 + h * (a31 * k1 + a32 * k2);
    rhs(t + c3 * h, ytmp, k3);
    ytmp = y0 + h * (a41 * k1 + a42 * k2 + a43 * k3);
    rhs(t + c4 * h, ytmp, k4);
    ytmp = y0 + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    rhs(t + c5 * h, ytmp, k5);
    ytmp = y0 + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    rhs(t + h, ytmp, k6);
    ynew = y0 + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    rhs(t + h, ynew, k7);

    if (!finite(ynew) || !finite(k7)) {
      h *= 0.3;
      ++res.n_rejected;
      continue;
    }

    yerr = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    double err = 0.0;
    for (int i = 0; i < n; ++i) {
      const double sc =
          opt.abs_tol + opt.rel_tol * std::max(std::fabs(y0[i]), std::fabs(ynew[i]));
      err += sqr(yerr[i] / sc);
    }
    err = std::sqrt(err / n);

    if (err > 1.0) {
      h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
      ++res.n_rejected;
      continue;
    }

    DenseStep step;
    step.t0 = t;
    step.t1 = t + h;
    step.r1 = y0;
    step.r2 = ynew - y0;
    step.r3 = h * k1 - step.r2;
    step.r4 = step.r2 - h * k7 - step.r3;
    step.r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);

    // event detection on this step
    bool stop = false;
    if (!opt.events.empty()) {
      for (size_t ie = 0; ie < opt.events.size(); ++ie) {
        const Event& ev = opt.events[ie];
        double ga = ev.g(t, y0), gb = ev.g(t + h, ynew);
        if (ga == 0.0 || ga * gb > 0) continue;
        if (ev.direction > 0 && !(ga < 0 && gb >= 0)) continue;
        if (ev.direction < 0 && !(ga > 0 && gb <= 0)) continue;
        // bisection on the dense interpolant
        double ta = t, tb = t + h;
        Vec ymid;
        for (int it = 0; it < 80 && std::fabs(tb - ta) > 1e-14 * (1 + std::fabs(tb)); ++it) {
          double tm = 0.5 * (ta + tb);
          step.eval(tm, ymid);
          double gm = ev.g(tm, ymid);
          if (ga * gm <= 0) tb = tm;
          else { ta = tm; ga = gm; }
        }
        double te = 0.5 * (ta + tb);
        step.eval(te, ymid);
        res.events.push_back({static_cast<int>(ie), te, ymid});
        if (ev.terminal) {
          step.t1 = te;
          ynew = ymid;
          h = te - t;
          stop = true;
          break;
        }
      }
    }

    if (opt.store_dense) res.dense.steps.push_back(step);
    t += h;
    y0 = ynew;
    k1 = k7;  // FSAL
    ++res.n_steps;
    if (stop) break;
    h *= std::min(5.0, std::max(0.2, 0.9 * std::pow(std::max(err, 1e-10), -0.2)));
  }

  res.t_final = t;
  res.y_final = y0;
  return res;
}

}  // namespace thinfilm

#endif  // THINFILM_IVP_HPP
