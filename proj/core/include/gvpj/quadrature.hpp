#pragma once

#include <functional>
#include <span>

#include "gvpj/time_grid.hpp"

namespace gvpj {

// Integrand (x - lo)^alpha (hi - x)^beta g(x) on [lo, hi]. The exponents are
// applied analytically from exact endpoint distances, so g only has to be
// well behaved in the interior. When g depends on the distance to an endpoint
// (x - lo or hi - x below rounding level), supply g_dist instead; it receives
// (x, x - lo, hi - x) with both distances exact.
struct SingularIntegrand {
  std::function<double(double)> g;
  double alpha = 0.0;
  double beta = 0.0;
  double lo = 0.0;
  double hi = 1.0;
  std::function<double(double, double, double)> g_dist;
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int nodes_used = 0;
};

inline constexpr int kMaxQuadratureNodes = 1 << 14;

// Double-exponential (tanh-sinh) rule with step halving; the error estimate is
// the difference between consecutive levels. Throws QuadratureError if tol is
// not met before kMaxQuadratureNodes.
QuadratureResult integrate_singular(const SingularIntegrand& f, double tol);

// Same rule at a fixed refinement level (step 2^-level), no convergence test.
QuadratureResult integrate_singular_level(const SingularIntegrand& f, int level);

// Left-point Riemann-Stieltjes sum  sum_j f_j (X(t_{j+1}) - X(t_j)),  f_j sampled
// at the left end of cell j (t_0 = 0).
double stieltjes_sum(std::span<const double> f, const SamplePath& path);

}  // namespace gvpj
