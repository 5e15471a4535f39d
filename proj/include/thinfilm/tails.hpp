#ifndef THINFILM_TAILS_HPP
#define THINFILM_TAILS_HPP

#include <cmath>
#include <vector>

#include "thinfilm/common.hpp"
#include "thinfilm/ivp.hpp"
#include "thinfilm/oscillation.hpp"
#include "thinfilm/profile.hpp"
#include "thinfilm/similarity.hpp"

namespace thinfilm {

enum class TailKind { CPOscillatory, FBPQuadratic };

/// Local interface expansion data. CP: oscillatory bundle parameters
/// (y0, s0) on top of a periodic orbit. FBP: quadratic bundle (y0, C0).
struct TailBundle {
  TailKind kind = TailKind::FBPQuadratic;
  double y0 = 0.0;
  // CP fields
  double s0 = 0.0;
  const PeriodicOrbit* orbit = nullptr;
  // FBP fields
  double C0 = 0.0;
  double q = 0.0;
  double A = 0.0;
};

/// FBP correction-term exponent and coefficient for f = C0 w^2 - A w^q,
/// w = y0-y. The correction balances |f|^n (f'' + (N-1)/y f')' ~ beta y0 f:
///   N = 1 (and N >= 2 with n > 1):  q = 5-2n,
///       A = beta y0 C0 |C0|^{-n} / ((5-2n)(4-2n)(3-2n))
///   N >= 2, n < 1:  q = 3, A = -C0 (N-1)/(3 y0)
///   N >= 2, n = 1:  q = 3, A = beta y0/6 - C0 (N-1)/(3 y0)
/// (Signs fixed against the exact n = 1 drop profiles; see tests.)
inline void fbp_bundle_coeffs(double n, int N, double beta, double y0, double C0,
                              double& q, double& A) {
  if (!(n >= 0.0 && n < 1.5))
    throw DomainError("fbp_bundle_coeffs: FBP bundle requires n in [0, 3/2)");
  if (N >= 2 && std::fabs(n - 1.0) < 1e-12) {
    q = 3.0;
    A = beta * y0 / 6.0 - C0 * (N - 1) / (3.0 * y0);
  } else if (N >= 2 && n < 1.0) {
    q = 3.0;
    A = -C0 * (N - 1) / (3.0 * y0);
  } else {
    q = 5.0 - 2.0 * n;
    A = beta * y0 * C0 * std::pow(std::fabs(C0), -n) /
        ((5.0 - 2.0 * n) * (4.0 - 2.0 * n) * (3.0 - 2.0 * n));
  }
}

inline TailBundle make_fbp_bundle(double n, int N, double beta, double y0, double C0) {
  TailBundle b;
  b.kind = TailKind::FBPQuadratic;
  b.y0 = y0;
  b.C0 = C0;
  fbp_bundle_coeffs(n, N, beta, y0, C0, b.q, b.A);
  return b;
}

/// FBP tail state (f, f', f'', f''') at distance w from the interface.
inline void fbp_tail_state(const TailBundle& b, double w, double* out4) {
  const double wq = std::pow(w, b.q);
  out4[0] = b.C0 * w * w - b.A * wq;
  out4[1] = -(2.0 * b.C0 * w - b.q * b.A * wq / w);
  out4[2] = 2.0 * b.C0 - b.q * (b.q - 1.0) * b.A * wq / (w * w);
  out4[3] = b.q * (b.q - 1.0) * (b.q - 2.0) * b.A * wq / (w * w * w);
}

/// Running integral int_0^y f ds of the tail, given the profile's total
/// integral vanishes (zero-flux family): I(y0-w) = -(C0 w^3/3 - A w^{q+1}/(q+1)).
inline double fbp_tail_integral(const TailBundle& b, double w) {
  return -(b.C0 * w * w * w / 3.0 - b.A * std::pow(w, b.q + 1.0) / (b.q + 1.0));
}

/// CP oscillatory tail state at distance w: f = w^mu phi(ln w + s0), with
/// derivatives taken through the composite expression.
inline void cp_tail_state(const PeriodicOrbit& orbit, double n, double y0, double s0,
                          double w, double* out4) {
  (void)y0;
  const double mu = 3.0 / n;
  Vec st = orbit.state(std::log(w) + s0);
  const double ph = st[0], p1 = st[1], p2 = st[2];
  // phi''' from the cycle equation
  const double c2 = 3.0 * (mu - 1.0);
  const double c1 = 3.0 * mu * mu - 6.0 * mu + 2.0;
  const double c0 = mu * (mu - 1.0) * (mu - 2.0);
  const double p3 =
      -c2 * p2 - c1 * p1 - c0 * ph - orbit.lambda0 * signed_power(ph, 1.0 - n, 0.0);
  out4[0] = std::pow(w, mu) * ph;
  out4[1] = -std::pow(w, mu - 1.0) * (mu * ph + p1);
  out4[2] = std::pow(w, mu - 2.0) *
            (mu * (mu - 1.0) * ph + (2.0 * mu - 1.0) * p1 + p2);
  out4[3] = -std::pow(w, mu - 3.0) *
            (mu * (mu - 1.0) * (mu - 2.0) * ph +
             (3.0 * mu * mu - 6.0 * mu + 2.0) * p1 + 3.0 * (mu - 1.0) * p2 + p3);
}

/// Geometrically clustered grid approaching y0 from below: w decreases by
/// cluster_ratio per step down to the floor.
inline std::vector<double> clustered_grid(double y_start, double y0, double ratio,
                                          double floor_frac) {
  std::vector<double> g;
  double w = y0 - y_start;
  const double wmin = std::max(floor_frac * y0, 1e-300);
  while (w > wmin) {
    g.push_back(y0 - w);
    w *= ratio;
  }
  return g;
}

/// Evaluate the CP tail expansion on a clustered grid (used as shooting
/// initial data and for diagnostics).
inline Profile tail_segment_cp(double y0, double s0, const PeriodicOrbit& orbit,
                               double n, double y_start,
                               const SolverConfig& cfg = {}) {
  if (!orbit.converged) throw DomainError("tail_segment_cp: orbit not converged");
  if (!(y_start < y0)) throw DomainError("tail_segment_cp: window must end below y0");
  if (y0 - y_start < cfg.cluster_floor * y0)
    throw DomainError("tail_segment_cp: window below the regularization floor");
  Profile pr;
  pr.y0 = y0;
  for (double y : clustered_grid(y_start, y0, cfg.cluster_ratio, cfg.cluster_floor)) {
    double s[4];
    cp_tail_state(orbit, n, y0, s0, y0 - y, s);
    pr.grid.push_back(y);
    pr.values.push_back(s[0]);
    pr.deriv[0].push_back(s[1]);
    pr.deriv[1].push_back(s[2]);
    pr.deriv[2].push_back(s[3]);
  }
  pr.mass = pr.grid.size() >= 2 ? mass(pr, 1) : 0.0;
  pr.sign_changes = count_sign_changes(pr.values);
  return pr;
}

/// Evaluate the FBP bundle on a clustered grid.
inline Profile tail_segment_fbp(double y0, double C0, double n, int N, double p,
                                double y_start, const SolverConfig& cfg = {}) {
  Exponents e = compute_exponents(n, p, N);
  TailBundle b = make_fbp_bundle(n, N, e.beta, y0, C0);
  Profile pr;
  pr.y0 = y0;
  for (double y : clustered_grid(y_start, y0, cfg.cluster_ratio, cfg.cluster_floor)) {
    double s[4];
    fbp_tail_state(b, y0 - y, s);
    pr.grid.push_back(y);
    pr.values.push_back(s[0]);
    pr.deriv[0].push_back(s[1]);
    pr.deriv[1].push_back(s[2]);
    pr.deriv[2].push_back(s[3]);
  }
  pr.mass = pr.grid.size() >= 2 ? mass(pr, N) : 0.0;
  pr.sign_changes = count_sign_changes(pr.values);
  return pr;
}

// ---------------------------------------------------------------------------
// Log-variable interface zone. With eta = ln(y0 - y) the oscillatory tail is
// O(1), so the zone [w_a, d] is integrated without underflow and handed off
// to physical variables at w = d. The transformed systems below are exact.
// ---------------------------------------------------------------------------

enum class EtaForm { PureTFE, FullFourthOrder, CriticalThirdOrder };

/// Exact transformed system in eta. States:
///   PureTFE/FullFourthOrder: (phi, phi', phi'', H), H = -w^{-mu} Phi
///   CriticalThirdOrder (N=1): (phi, phi', phi'')
/// where Phi is the physical flux of the corresponding y-zone system.
inline Rhs make_eta_rhs(EtaForm form, double n, double p, double alpha, double beta,
                        double y0, double delta_phi) {
  const double mu = 3.0 / n;
  const double c2 = 3.0 * (mu - 1.0);
  const double c1 = 3.0 * mu * mu - 6.0 * mu + 2.0;
  const double c0 = mu * (mu - 1.0) * (mu - 2.0);
  const double lam0 = beta * y0;

  switch (form) {
    case EtaForm::PureTFE:
      return [=](double eta, const Vec& s, Vec& ds) {
        const double w = std::exp(eta);
        const double ph = s[0], p1 = s[1], p2 = s[2], H = s[3];
        ds[0] = p1;
        ds[1] = p2;
        ds[2] = regularized_power(ph, -n, delta_phi) * H - (c0 * ph + c1 * p1 + c2 * p2);
        ds[3] = -mu * H - lam0 * (mu * ph + p1) + w * (beta * (mu * ph + p1) + alpha * ph);
      };
    case EtaForm::FullFourthOrder:
      return [=](double eta, const Vec& s, Vec& ds) {
        const double w = std::exp(eta);
        const double ph = s[0], p1 = s[1], p2 = s[2], H = s[3];
        const double Psi = signed_power(ph, p, delta_phi);
        const double dPsi = p * regularized_power(ph, p - 1.0, delta_phi) * p1;
        const double wpow = std::pow(w, (p - 1.0) * mu - 1.0);
        ds[0] = p1;
        ds[1] = p2;
        ds[2] = regularized_power(ph, -n, delta_phi) * (H + wpow * (p * mu * Psi + dPsi)) -
                (c0 * ph + c1 * p1 + c2 * p2);
        ds[3] = -mu * H - lam0 * (mu * ph + p1) + w * (beta * (mu * ph + p1) + alpha * ph);
      };
    case EtaForm::CriticalThirdOrder:
      // N=1 critical: |phi|^n Q3 = w^{2+2mu}[(3+3mu) X + X'] - lam0 phi + beta w phi
      return [=](double eta, const Vec& s, Vec& ds) {
        const double w = std::exp(eta);
        const double ph = s[0], p1 = s[1], p2 = s[2];
        const double X = regularized_power(ph, n, delta_phi) * ph * ph * ph;
        const double dX = (n + 3.0) * regularized_power(ph, n, delta_phi) * ph * ph * p1;
        const double rhs_val = std::pow(w, 2.0 + 2.0 * mu) * ((3.0 + 3.0 * mu) * X + dX) -
                               lam0 * ph + beta * w * ph;
        ds[0] = p1;
        ds[1] = p2;
        ds[2] = regularized_power(ph, -n, delta_phi) * rhs_val -
                (c0 * ph + c1 * p1 + c2 * p2);
      };
  }
  throw DomainError("make_eta_rhs: unknown form");
}

/// Convert the eta-zone state at w into the physical y-zone state.
/// For 4-state forms the output is (f, f', f'', Phi); for the critical form
/// (f, f', f'').
inline Vec eta_to_physical(EtaForm form, double n, double w, const Vec& s) {
  const double mu = 3.0 / n;
  const double wmu = std::pow(w, mu);
  const double ph = s[0], p1 = s[1], p2 = s[2];
  const int dim = (form == EtaForm::CriticalThirdOrder) ? 3 : 4;
  Vec out(dim);
  out[0] = wmu * ph;
  out[1] = -wmu / w * (mu * ph + p1);
  out[2] = wmu / (w * w) * (mu * (mu - 1.0) * ph + (2.0 * mu - 1.0) * p1 + p2);
  if (dim == 4) out[3] = -wmu * s[3];
  return out;
}

}  // namespace thinfilm

#endif  // THINFILM_TAILS_HPP
