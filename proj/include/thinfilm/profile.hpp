#ifndef THINFILM_PROFILE_HPP
#define THINFILM_PROFILE_HPP

#include <algorithm>
#include <memory>
#include <vector>

#include "thinfilm/common.hpp"
#include "thinfilm/ivp.hpp"
#include "thinfilm/quadrature.hpp"
#include "thinfilm/similarity.hpp"

namespace thinfilm {

/// A radial similarity profile sampled on an increasing grid starting at 0.
/// deriv[k] holds the (k+1)-th derivative (k = 0,1,2). y0 is the interface
/// radius (kInf marks the unbounded n = 0 Cauchy case). The dense trajectory,
/// when present, gives continuous evaluation and defect-based residuals.
struct Profile {
  std::vector<double> grid;
  std::vector<double> values;
  std::vector<double> deriv[3];
  double y0 = kInf;
  double mass = 0.0;
  int sign_changes = 0;
  std::shared_ptr<const DenseTrajectory> dense;  // optional
  int state_dim = 0;      // dimension of the dense state, 0 if none
  int value_index = 0;    // component of the dense state holding f

  size_t size() const { return grid.size(); }

  double eval(double y) const {
    if (dense) return dense->eval(y)[value_index];
    // linear interpolation fallback
    auto it = std::lower_bound(grid.begin(), grid.end(), y);
    if (it == grid.begin()) return values.front();
    if (it == grid.end()) return values.back();
    size_t i = static_cast<size_t>(it - grid.begin());
    double t = (y - grid[i - 1]) / (grid[i] - grid[i - 1]);
    return (1 - t) * values[i - 1] + t * values[i];
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::fabs(v));
    return m;
  }
};

/// Weighted mass M = int_0^{y0} y^{N-1} f dy on the profile grid
/// (composite Simpson via local quadratic fit).
inline double mass(const Profile& pr, int N) {
  if (pr.grid.size() < 2) return 0.0;
  std::vector<double> w(pr.grid.size());
  for (size_t i = 0; i < pr.grid.size(); ++i)
    w[i] = (N == 1 ? 1.0 : std::pow(pr.grid[i], N - 1)) * pr.values[i];
  return simpson_nonuniform(pr.grid, w);
}

/// Transversal sign changes of the sampled values on (0, y0).
inline int count_sign_changes(const std::vector<double>& v) {
  int c = 0;
  double prev = 0.0;
  for (double x : v) {
    if (x == 0.0) continue;
    if (prev != 0.0 && sign(x) != sign(prev)) ++c;
    prev = x;
  }
  return c;
}

/// Build a Profile from a dense trajectory of a first-order system whose
/// leading components are (f, f', f'', ...). Grid nodes are taken ascending;
/// a node at y = 0 is included when the trajectory reaches it.
inline Profile profile_from_dense(std::shared_ptr<const DenseTrajectory> dense,
                                  double y0, int N, int value_index = 0,
                                  int deriv_count = 3, int n_samples = 801) {
  Profile pr;
  pr.dense = dense;
  pr.value_index = value_index;
  pr.y0 = y0;
  double a = std::min(dense->t_begin(), dense->t_end());
  double b = std::max(dense->t_begin(), dense->t_end());
  pr.state_dim = static_cast<int>(dense->eval(a).size());
  pr.grid.reserve(n_samples);
  for (int i = 0; i < n_samples; ++i) {
    double y = a + (b - a) * i / (n_samples - 1.0);
    Vec s = dense->eval(y);
    pr.grid.push_back(y);
    pr.values.push_back(s[value_index]);
    for (int d = 0; d < 3; ++d)
      pr.deriv[d].push_back(d + value_index + 1 < s.size() && d < deriv_count
                                ? s[value_index + d + 1]
                                : kNaN);
  }
  pr.mass = mass(pr, N);
  pr.sign_changes = count_sign_changes(pr.values);
  return pr;
}

}  // namespace thinfilm

#endif  // THINFILM_PROFILE_HPP
