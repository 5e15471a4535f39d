#ifndef THINFILM_COMMON_HPP
#define THINFILM_COMMON_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace thinfilm {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Outcome of a solver invocation. Expected failure modes are values here,
/// not exceptions; contract violations (bad arguments) throw.
enum class SolveStatus {
  Ok,
  NewtonDiverged,
  JacobianSingular,
  StepUnderflow,
  NoCycle,
  NonConvergence,
  BracketInvalid,
  NotFound,
  WrongIndex,
  MeshLimitExceeded,
  TruncationTooSmall,
  QuadratureFailure,
  ContinuationStalled,
  BranchCollision,
};

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Ok: return "ok";
    case SolveStatus::NewtonDiverged: return "newton-diverged";
    case SolveStatus::JacobianSingular: return "jacobian-singular";
    case SolveStatus::StepUnderflow: return "step-underflow";
    case SolveStatus::NoCycle: return "no-cycle";
    case SolveStatus::NonConvergence: return "non-convergence";
    case SolveStatus::BracketInvalid: return "bracket-invalid";
    case SolveStatus::NotFound: return "not-found";
    case SolveStatus::WrongIndex: return "wrong-index";
    case SolveStatus::MeshLimitExceeded: return "mesh-limit-exceeded";
    case SolveStatus::TruncationTooSmall: return "truncation-too-small";
    case SolveStatus::QuadratureFailure: return "quadrature-failure";
    case SolveStatus::ContinuationStalled: return "continuation-stalled";
    case SolveStatus::BranchCollision: return "branch-collision";
  }
  return "unknown";
}

/// Thrown on contract violations (invalid parameters, not solver failures).
class DomainError : public std::invalid_argument {
 public:
  explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

/// Numerical controls shared by the integrators, shooting and collocation.
/// Defaults follow the collocation settings used throughout: RelTol 1e-3,
/// AbsTol 1e-6, with much tighter internal IVP tolerances.
struct SolverConfig {
  double rel_tol = 1e-3;        // collocation relative tolerance
  double abs_tol = 1e-6;        // collocation absolute tolerance
  double ivp_rel_tol = 1e-11;   // shooting integrator tolerance
  double ivp_abs_tol = 1e-13;
  double delta = 1e-6;          // |f|^q regularization parameter
  int max_newton_iters = 40;
  double newton_tol = 1e-9;     // max-norm on (scaled) shooting residuals
  double fd_step = 1e-6;        // finite-difference Jacobian base step
  double min_damping = 1e-5;    // smallest Newton line-search factor
  // interface handoff controls
  double tail_start = 1e-8;     // w_a: distance from the interface where the
                                // local expansion seeds the integration
  double tail_handoff = 0.3;    // d: log-zone -> physical-zone switch distance
  double cluster_ratio = 0.9;   // geometric grid clustering toward y0
  double cluster_floor = 1e-12; // (y0-y) >= floor * y0 on output grids
  // far-field truncation
  double y_max = 30.0;          // kernel / linear-eigen truncation radius
  double z_max = 30.0;          // inner boundary-layer truncation
  int max_mesh_points = 12000;  // collocation mesh cap

  void validate() const {
    if (rel_tol < 1e-12) throw DomainError("rel_tol must be >= 1e-12");
    if (delta < 0) throw DomainError("delta must be >= 0");
    if (abs_tol <= 0 || ivp_rel_tol <= 0) throw DomainError("tolerances must be positive");
  }
};

/// (delta^2 + f^2)^{q/2}; reduces to |f|^q at delta = 0.
inline double regularized_power(double f, double q, double delta) {
  if (delta < 0) throw DomainError("regularized_power: delta must be >= 0");
  if (delta == 0.0) {
    if (f == 0.0) return q > 0 ? 0.0 : (q == 0 ? 1.0 : kInf);
    return std::pow(std::fabs(f), q);
  }
  return std::pow(delta * delta + f * f, 0.5 * q);
}

/// Sign-preserving regularized power f*(delta^2+f^2)^{(q-1)/2} ~ sign(f)|f|^q.
/// Returns 0 at f = 0 even for q <= 0 (the product limit along transversal
/// zero crossings).
inline double signed_power(double f, double q, double delta) {
  if (f == 0.0) return 0.0;
  return f * regularized_power(f, q - 1.0, delta);
}

inline int sign(double x) { return (x > 0) - (x < 0); }

inline double sqr(double x) { return x * x; }

}  // namespace thinfilm

#endif  // THINFILM_COMMON_HPP
