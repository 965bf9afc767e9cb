#include "gvpj/quadrature.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "gvpj/errors.hpp"

namespace gvpj {
namespace {

// Beyond |tau| = 6 the nearest node sits ~1e-290 from an endpoint.
constexpr double kTauMax = 6.0;

struct Accumulator {
  double sum = 0.0;
  double abs_sum = 0.0;
  int nodes = 0;
};

class TanhSinh {
 public:
  explicit TanhSinh(const SingularIntegrand& f) : f_(f), r_(0.5 * (f.hi - f.lo)) {
    require(f.hi > f.lo, "integrate_singular: lo < hi required");
    require(f.alpha > -1.0 && f.beta > -1.0, "integrate_singular: exponents must exceed -1");
    require(static_cast<bool>(f.g) || static_cast<bool>(f.g_dist), "integrate_singular: empty integrand");
  }

  void add(double tau, Accumulator& acc) const {
    const double s = 0.5 * std::numbers::pi * std::sinh(tau);
    const double e = std::exp(-2.0 * std::abs(s));
    const double near = 2.0 * r_ * e / (1.0 + e);
    const double far = 2.0 * r_ / (1.0 + e);
    const double w = r_ * 0.5 * std::numbers::pi * std::cosh(tau) * 4.0 * e / ((1.0 + e) * (1.0 + e));
    if (near <= 0.0 || w <= 0.0) return;
    double d_lo, d_hi, x;
    if (tau >= 0.0) {
      d_hi = near;
      d_lo = far;
      x = f_.hi - d_hi;
    } else {
      d_lo = near;
      d_hi = far;
      x = f_.lo + d_lo;
    }
    double v = w * (f_.g_dist ? f_.g_dist(x, d_lo, d_hi) : f_.g(x));
    if (f_.alpha != 0.0) v *= std::pow(d_lo, f_.alpha);
    if (f_.beta != 0.0) v *= std::pow(d_hi, f_.beta);
    if (!std::isfinite(v)) {
      throw QuadratureError("integrate_singular: non-finite integrand at x = " + std::to_string(x),
                            std::numeric_limits<double>::quiet_NaN(),
                            std::numeric_limits<double>::infinity());
    }
    acc.sum += v;
    acc.abs_sum += std::abs(v);
    ++acc.nodes;
  }

  // Sum over the nodes first introduced at `level` (all nodes for level 0).
  Accumulator level_nodes(int level) const {
    Accumulator acc;
    if (level == 0) {
      for (int k = -static_cast<int>(kTauMax); k <= static_cast<int>(kTauMax); ++k) add(k, acc);
      return acc;
    }
    const double h = std::ldexp(1.0, -level);
    const long kmax = static_cast<long>(kTauMax / h);
    for (long k = 1; k <= kmax; k += 2) {
      add(k * h, acc);
      add(-k * h, acc);
    }
    return acc;
  }

 private:
  const SingularIntegrand& f_;
  double r_;
};

}  // namespace

QuadratureResult integrate_singular(const SingularIntegrand& f, double tol) {
  require(tol > 0.0, "integrate_singular: tol must be positive");
  TanhSinh rule(f);
  Accumulator total = rule.level_nodes(0);
  double prev = total.sum;
  int nodes = total.nodes;
  double err = std::numeric_limits<double>::infinity();
  for (int level = 1;; ++level) {
    const double h = std::ldexp(1.0, -level);
    Accumulator fresh = rule.level_nodes(level);
    total.sum += fresh.sum;
    total.abs_sum += fresh.abs_sum;
    nodes += fresh.nodes;
    const double value = h * total.sum;
    err = std::abs(value - prev);
    const double roundoff = 64.0 * std::numeric_limits<double>::epsilon() * h * total.abs_sum;
    if (level >= 2 && err <= std::max(tol, roundoff)) return {value, err, nodes};
    prev = value;
    if (2 * nodes > kMaxQuadratureNodes) {
      throw QuadratureError("integrate_singular: no convergence within node cap (error " +
                                std::to_string(err) + ", tol " + std::to_string(tol) + ")",
                            value, err);
    }
  }
}

QuadratureResult integrate_singular_level(const SingularIntegrand& f, int level) {
  require(level >= 0, "integrate_singular_level: level must be non-negative");
  TanhSinh rule(f);
  Accumulator total = rule.level_nodes(0);
  double prev = total.sum;
  int nodes = total.nodes;
  double value = total.sum;
  for (int l = 1; l <= level; ++l) {
    Accumulator fresh = rule.level_nodes(l);
    total.sum += fresh.sum;
    nodes += fresh.nodes;
    prev = value;
    value = std::ldexp(total.sum, -l);
  }
  return {value, level == 0 ? 0.0 : std::abs(value - prev), nodes};
}

double stieltjes_sum(std::span<const double> f, const SamplePath& path) {
  require(f.size() == path.values.size(), "stieltjes_sum: integrand and path lengths differ");
  double acc = 0.0;
  double prev = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) {
    acc += f[j] * (path.values[j] - prev);
    prev = path.values[j];
  }
  return acc;
}

}  // namespace gvpj
