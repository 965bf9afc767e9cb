#include "gvpj/fbm_kernel_table.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "fbm_detail.hpp"
#include "gvpj/errors.hpp"
#include "gvpj/kernels.hpp"

namespace gvpj {
namespace {

constexpr int P = FbmKernelTable::kPanelPoints;

// Coefficients of the antiderivative (vanishing at -1) of the Chebyshev
// interpolant through Lobatto samples, scaled by the panel half-width.
std::array<double, P> antiderivative_coefficients(const std::array<double, P>& v, double half) {
  std::array<double, P + 1> a{};
  const int m = P - 1;
  for (int k = 0; k <= m; ++k) {
    double s = 0.0;
    for (int j = 0; j <= m; ++j) {
      double w = (j == 0 || j == m) ? 0.5 : 1.0;
      s += w * v[j] * std::cos(std::numbers::pi * j * k / m);
    }
    a[k] = 2.0 * s / m;
  }
  a[0] *= 0.5;
  a[m] *= 0.5;
  std::array<double, P> c{};
  c[1] = a[0] - 0.5 * a[2];
  for (int k = 2; k < P; ++k) c[k] = (a[k - 1] - a[k + 1]) / (2.0 * k);
  double at_minus_one = 0.0;
  for (int k = 1; k < P; ++k) at_minus_one += (k % 2 ? -1.0 : 1.0) * c[k];
  c[0] = -at_minus_one;
  for (double& x : c) x *= half;
  return c;
}

double clenshaw(const std::array<double, P>& c, double xi) {
  double b1 = 0.0, b2 = 0.0;
  for (int k = P - 1; k >= 1; --k) {
    const double b0 = 2.0 * xi * b1 - b2 + c[k];
    b2 = b1;
    b1 = b0;
  }
  return xi * b1 - b2 + c[0];
}

}  // namespace

void FbmKernelTable::Side::cumulative(double y, double& f1, double& f2) const {
  if (y <= tail_y) {
    f1 = f2 = 0.0;
    for (int i = 0; i < 3; ++i) {
      if (tail1_coef[i] != 0.0) f1 += tail1_coef[i] * std::pow(y, tail1_pow[i]);
      if (tail2_coef[i] != 0.0) f2 += tail2_coef[i] * std::pow(y, tail2_pow[i]);
    }
    return;
  }
  int e = 0;
  std::frexp(y, &e);  // y in [2^{e-1}, 2^e)
  int k = -e;         // panel [2^{-k-1}, 2^{-k}]
  if (k < 1) k = 1;
  const Panel& p = panels[static_cast<std::size_t>(kPanelsPerSide - k)];
  const double half = 0.5 * (p.y1 - p.y0);
  const double xi = std::clamp((y - 0.5 * (p.y0 + p.y1)) / half, -1.0, 1.0);
  f1 = p.base1 + clenshaw(p.c1, xi);
  f2 = p.base2 + clenshaw(p.c2, xi);
}

FbmKernelTable::FbmKernelTable(double H) : H_(H) {
  detail::validate_hurst(H, "FbmKernelTable");
  const double c = fbm_normalizer(H);
  const double b0 = detail::kappa_b0(H);

  auto fill = [&](Side& side, auto&& f) {
    side.tail_y = std::ldexp(1.0, -(kPanelsPerSide + 1));
    side.panels.resize(kPanelsPerSide);
    double acc1 = 0.0, acc2 = 0.0;
    side.cumulative(side.tail_y, acc1, acc2);
    for (int idx = 0; idx < kPanelsPerSide; ++idx) {
      const int k = kPanelsPerSide - idx;
      Panel& p = side.panels[static_cast<std::size_t>(idx)];
      p.y0 = std::ldexp(1.0, -k - 1);
      p.y1 = std::ldexp(1.0, -k);
      const double mid = 0.5 * (p.y0 + p.y1), half = 0.5 * (p.y1 - p.y0);
      std::array<double, P> v1{}, v2{};
      for (int j = 0; j < P; ++j) {
        const double y = mid + half * std::cos(std::numbers::pi * j / (P - 1));
        v1[j] = f(y);
        v2[j] = v1[j] * v1[j];
      }
      p.c1 = antiderivative_coefficients(v1, half);
      p.c2 = antiderivative_coefficients(v2, half);
      p.base1 = acc1;
      p.base2 = acc2;
      acc1 += clenshaw(p.c1, 1.0);
      acc2 += clenshaw(p.c2, 1.0);
    }
    side.total1 = acc1;
    side.total2 = acc2;
  };

  // Leading behaviour below the last panel, relative error O(y).
  left_.tail1_coef[0] = c * b0 / (H + 0.5);
  left_.tail1_pow[0] = H + 0.5;
  left_.tail1_coef[1] = 0.5 * c / (1.5 - H);
  left_.tail1_pow[1] = 1.5 - H;
  left_.tail2_coef[0] = c * c * b0 * b0 / (2.0 * H);
  left_.tail2_pow[0] = 2.0 * H;
  left_.tail2_coef[1] = c * c * b0;
  left_.tail2_pow[1] = 1.0;
  left_.tail2_coef[2] = 0.25 * c * c / (2.0 - 2.0 * H);
  left_.tail2_pow[2] = 2.0 - 2.0 * H;
  right_.tail1_coef[0] = c / (H + 0.5);
  right_.tail1_pow[0] = H + 0.5;
  right_.tail2_coef[0] = c * c / (2.0 * H);
  right_.tail2_pow[0] = 2.0 * H;

  fill(left_, [H](double y) { return detail::kappa(y, H); });
  fill(right_, [H](double d) { return detail::kappa_from_delta(d, H); });
}

std::shared_ptr<const FbmKernelTable> FbmKernelTable::get(double H) {
  static std::mutex mutex;
  static std::map<double, std::shared_ptr<const FbmKernelTable>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(H);
  if (it != cache.end()) return it->second;
  auto table = std::make_shared<const FbmKernelTable>(H);
  cache.emplace(H, table);
  return table;
}

double FbmKernelTable::kernel(double t, double s) const { return fbm_kernel_hypergeometric(t, s, H_); }

double FbmKernelTable::cumulative_between(double x0, double x1, int power) const {
  // x0 <= x1 within [0,1]; the right side is addressed through 1 - x.
  auto side_value = [&](const Side& side, double y) {
    double f1, f2;
    side.cumulative(y, f1, f2);
    return power == 1 ? f1 : f2;
  };
  const double left_total = power == 1 ? left_.total1 : left_.total2;
  const double right_total = power == 1 ? right_.total1 : right_.total2;
  if (x1 <= 0.5) return side_value(left_, x1) - side_value(left_, x0);
  if (x0 >= 0.5) return side_value(right_, 1.0 - x0) - side_value(right_, 1.0 - x1);
  return (left_total - side_value(left_, x0)) + (right_total - side_value(right_, 1.0 - x1));
}

double FbmKernelTable::integral(double t, double lo, double hi) const {
  require(t > 0.0, "FbmKernelTable::integral: t must be positive");
  lo = std::max(lo, 0.0);
  hi = std::min(hi, t);
  if (hi <= lo) return 0.0;
  if (H_ == 0.5) return hi - lo;
  return std::pow(t, H_ + 0.5) * cumulative_between(lo / t, hi / t, 1);
}

double FbmKernelTable::integral_sq(double t, double lo, double hi) const {
  require(t > 0.0, "FbmKernelTable::integral_sq: t must be positive");
  lo = std::max(lo, 0.0);
  hi = std::min(hi, t);
  if (hi <= lo) return 0.0;
  if (H_ == 0.5) return hi - lo;
  return std::pow(t, 2.0 * H_) * cumulative_between(lo / t, hi / t, 2);
}

}  // namespace gvpj
