#ifndef THINFILM_SIMILARITY_HPP
#define THINFILM_SIMILARITY_HPP

#include <cmath>

#include "thinfilm/common.hpp"

namespace thinfilm {

enum class ProblemKind { CauchyProblem, FreeBoundaryProblem };
enum class Parity { Even, Odd };

/// Which similarity ODE is being integrated.
///  FullFourthOrder:            -(|f|^n f''')' + (|f|^{p-1} f)'' + b y f' + a f = 0   (N=1)
///  IntegratedThirdOrderCritical: |f|^n (f'' + (N-1)/y f')' - (|f|^{p0-1} f)' - b y f = 0
///  PureTFE:                    -(|f|^n f''')' + b y f' + a f = 0, b = (1-a n)/4      (N=1)
enum class OdeForm { FullFourthOrder, IntegratedThirdOrderCritical, PureTFE };

struct Exponents {
  double alpha;
  double beta;
  double p0;
};

/// Similarity exponents of u(x,t) = t^{-alpha} f(x/t^beta) for the stable
/// equation u_t = -div(|u|^n grad lap u) + lap(|u|^{p-1}u):
///   alpha = 1/(2p-(n+2)),  beta = (p-(n+1))/(2(2p-(n+2))),
/// and the mass-conserving critical exponent p0 = n+1+2/N.
inline Exponents compute_exponents(double n, double p, int N) {
  if (N < 1) throw DomainError("compute_exponents: N must be >= 1");
  if (n < 0) throw DomainError("compute_exponents: n must be >= 0");
  if (p <= n + 1.0)
    throw DomainError("compute_exponents: requires p > n+1 (beta would be nonpositive)");
  Exponents e;
  e.alpha = 1.0 / (2.0 * p - (n + 2.0));
  e.beta = (p - (n + 1.0)) / (2.0 * (2.0 * p - (n + 2.0)));
  e.p0 = n + 1.0 + 2.0 / N;
  return e;
}

/// Problem family plus derived exponents.
struct SimilarityParams {
  double n = 1.0;   // mobility exponent, >= 0
  double p = 4.0;   // second-order exponent, > n+1 (ignored by PureTFE)
  int N = 1;        // space dimension
  ProblemKind kind = ProblemKind::CauchyProblem;
  Parity parity = Parity::Even;
  double alpha = 0.0;
  double beta = 0.0;

  static SimilarityParams full(double n, double p, int N, ProblemKind kind,
                               Parity parity = Parity::Even) {
    SimilarityParams sp;
    sp.n = n;
    sp.p = p;
    sp.N = N;
    sp.kind = kind;
    sp.parity = parity;
    Exponents e = compute_exponents(n, p, N);
    sp.alpha = e.alpha;
    sp.beta = e.beta;
    return sp;
  }

  /// Pure thin-film equation: alpha is a free (nonlinear) eigenvalue and
  /// beta = (1 - alpha n)/4.
  static SimilarityParams pure_tfe(double n, double alpha, int N, ProblemKind kind,
                                   Parity parity = Parity::Even) {
    if (n < 0) throw DomainError("pure_tfe: n must be >= 0");
    SimilarityParams sp;
    sp.n = n;
    sp.p = kNaN;
    sp.N = N;
    sp.kind = kind;
    sp.parity = parity;
    sp.alpha = alpha;
    sp.beta = (1.0 - alpha * n) / 4.0;
    return sp;
  }

  double p0() const { return n + 1.0 + 2.0 / N; }
  bool critical() const { return std::isfinite(p) && std::fabs(p - p0()) < 1e-13; }
};

}  // namespace thinfilm

#endif  // THINFILM_SIMILARITY_HPP
