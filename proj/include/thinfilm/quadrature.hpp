#ifndef THINFILM_QUADRATURE_HPP
#define THINFILM_QUADRATURE_HPP

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "thinfilm/common.hpp"

namespace thinfilm {

namespace detail {
// 15-point Gauss-Kronrod pair on [-1,1].
inline constexpr double gk15_x[8] = {
    0.0,
    0.2077849550078985, 0.4058451513773972, 0.5860872354676911,
    0.7415311855993944, 0.8648644233597691, 0.9491079123427585,
    0.9914553711208126};
inline constexpr double gk15_wk[8] = {
    0.2094821410847278,
    0.2044329400752989, 0.1903505780647854, 0.1690047266392679,
    0.1406532597155259, 0.1047900103222502, 0.0630920926299786,
    0.0229353220105292};
inline constexpr double g7_w[4] = {
    0.4179591836734694, 0.3818300505051189, 0.2797053914892767,
    0.1294849661688697};
}  // namespace detail

/// One Gauss-Kronrod 15(7) panel; returns (integral, error estimate).
inline std::pair<double, double> gk15(const std::function<double(double)>& f,
                                      double a, double b) {
  using namespace detail;
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double fk = 0.0, fg = 0.0;
  const double f0 = f(c);
  fk += gk15_wk[0] * f0;
  fg += g7_w[0] * f0;
  for (int i = 1; i < 8; ++i) {
    const double fp = f(c + h * gk15_x[i]);
    const double fm = f(c - h * gk15_x[i]);
    fk += gk15_wk[i] * (fp + fm);
    if (i % 2 == 0) fg += g7_w[i / 2] * (fp + fm);
  }
  const double ik = fk * h, ig = fg * h;
  return {ik, std::fabs(ik - ig)};
}

/// Adaptive Gauss-Kronrod quadrature with interval bisection.
inline double integrate_adaptive(const std::function<double(double)>& f, double a,
                                 double b, double abs_tol = 1e-12,
                                 double rel_tol = 1e-10, int max_depth = 48) {
  struct Panel {
    double a, b, val, err;
    int depth;
  };
  auto [v0, e0] = gk15(f, a, b);
  std::vector<Panel> stack{{a, b, v0, e0, 0}};
  double total = 0.0;
  double budget = std::max(abs_tol, rel_tol * std::fabs(v0));
  while (!stack.empty()) {
    Panel p = stack.back();
    stack.pop_back();
    if (p.err <= budget * std::fabs(p.b - p.a) / std::fabs(b - a) ||
        p.depth >= max_depth) {
      total += p.val;
      continue;
    }
    const double m = 0.5 * (p.a + p.b);
    auto [vl, el] = gk15(f, p.a, m);
    auto [vr, er] = gk15(f, m, p.b);
    stack.push_back({p.a, m, vl, el, p.depth + 1});
    stack.push_back({m, p.b, vr, er, p.depth + 1});
  }
  return total;
}

/// Composite Simpson on a (possibly nonuniform) grid by local quadratic fit
/// over node triples; falls back to trapezoid on a final odd interval.
inline double simpson_nonuniform(const std::vector<double>& x,
                                 const std::vector<double>& y) {
  const size_t n = x.size();
  if (n != y.size() || n < 2) throw DomainError("simpson_nonuniform: bad grid");
  double s = 0.0;
  size_t i = 0;
  for (; i + 2 < n; i += 2) {
    const double h0 = x[i + 1] - x[i], h1 = x[i + 2] - x[i + 1];
    const double H = h0 + h1;
    // exact for quadratics through (x_i, x_{i+1}, x_{i+2})
    s += H / 6.0 * ((2.0 - h1 / h0) * y[i] + H * H / (h0 * h1) * y[i + 1] +
                    (2.0 - h0 / h1) * y[i + 2]);
  }
  if (i + 1 < n) s += 0.5 * (x[i + 1] - x[i]) * (y[i] + y[i + 1]);
  return s;
}

/// Brent root bracketing refinement on [a,b] with fa*fb <= 0.
inline double brent(const std::function<double(double)>& f, double a, double b,
                    double tol = 1e-13, int max_iter = 200) {
  double fa = f(a), fb = f(b);
  if (fa == 0) return a;
  if (fb == 0) return b;
  if (fa * fb > 0) throw DomainError("brent: root not bracketed");
  double c = a, fc = fa, d = b - a, e = d;
  for (int it = 0; it < max_iter; ++it) {
    if (std::fabs(fc) < std::fabs(fb)) {
      a = b; b = c; c = a;
      fa = fb; fb = fc; fc = fa;
    }
    const double tol1 = 2.0 * 2.22e-16 * std::fabs(b) + 0.5 * tol;
    const double xm = 0.5 * (c - b);
    if (std::fabs(xm) <= tol1 || fb == 0.0) return b;
    if (std::fabs(e) >= tol1 && std::fabs(fa) > std::fabs(fb)) {
      double p, q, r;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        q = fa / fc;
        r = fb / fc;
        p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0));
        q = (q - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0) q = -q;
      p = std::fabs(p);
      if (2.0 * p < std::min(3.0 * xm * q - std::fabs(tol1 * q), std::fabs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += (std::fabs(d) > tol1) ? d : (xm > 0 ? tol1 : -tol1);
    fb = f(b);
    if ((fb > 0) == (fc > 0)) {
      c = a;
      fc = fa;
      d = b - a;
      e = d;
    }
  }
  return b;
}

}  // namespace thinfilm

#endif  // THINFILM_QUADRATURE_HPP
