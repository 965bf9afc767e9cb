#include "gvpj/kernels.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_hyperg.h>

#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <string>

#include "fbm_detail.hpp"
#include "gvpj/errors.hpp"
#include "gvpj/quadrature.hpp"

namespace gvpj {
namespace detail {
namespace {

double hyp2f1(double a, double b, double c, double x) {
  static std::once_flag once;
  std::call_once(once, [] { gsl_set_error_handler_off(); });
  gsl_sf_result r;
  const int status = gsl_sf_hyperg_2F1_e(a, b, c, x, &r);
  if (status != GSL_SUCCESS || !std::isfinite(r.val)) {
    throw NumericalError(std::string("hypergeometric 2F1 failed: ") + gsl_strerror(status));
  }
  return r.val;
}

}  // namespace

void validate_hurst(double H, const char* where) {
  if (!(H > 0.0 && H < 1.0)) {
    throw DomainError(std::string(where) + ": H must lie in (0,1), got " + std::to_string(H));
  }
}

double kappa_b0(double H) {
  return std::tgamma(H + 0.5) * std::tgamma(2.0 - 2.0 * H) / (2.0 * std::tgamma(1.5 - H));
}

double kappa_from_delta(double delta, double H) {
  if (H == 0.5) return 1.0;
  const double x = 1.0 - delta;
  return fbm_normalizer(H) * std::pow(x * delta, H - 0.5) * hyp2f1(2.0 * H, H - 0.5, H + 0.5, delta);
}

double kappa(double x, double H) {
  if (H == 0.5) return 1.0;
  if (x > 0.5) return kappa_from_delta(1.0 - x, H);
  const double c = fbm_normalizer(H);
  const double tail = std::pow(x, 0.5 - H) * std::pow(1.0 - x, H - 0.5) *
                      hyp2f1(0.5 - H, 1.0, 2.0 - 2.0 * H, x);
  return c * (kappa_b0(H) * std::pow(x, H - 0.5) + 0.5 * tail);
}

}  // namespace detail

void HurstParams::validate_fbm() const { detail::validate_hurst(H, "fbm"); }

void HurstParams::validate_ccm() const {
  require(H > 0.5 && H < 1.0, "ccmfbm: H must lie in (1/2,1)");
  require(a != 0.0 && std::isfinite(a), "ccmfbm: a must be finite and nonzero");
  require(std::isfinite(b), "ccmfbm: b must be finite");
}

double fbm_covariance(double t, double s, double H) {
  detail::validate_hurst(H, "fbm_covariance");
  require(t >= 0.0 && s >= 0.0, "fbm_covariance: times must be non-negative");
  const double e = 2.0 * H;
  return 0.5 * (std::pow(t, e) + std::pow(s, e) - std::pow(std::abs(t - s), e));
}

double fbm_normalizer(double H) {
  detail::validate_hurst(H, "fbm_normalizer");
  return std::sqrt(2.0 * H * std::tgamma(1.5 - H) / (std::tgamma(0.5 + H) * std::tgamma(2.0 - 2.0 * H)));
}

KernelEval fbm_kernel(double t, double s, double H, double tol) {
  detail::validate_hurst(H, "fbm_kernel");
  require(tol > 0.0, "fbm_kernel: tol must be positive");
  if (s >= t) return {};
  require(s > 0.0, "fbm_kernel: s must be positive");
  if (H == 0.5) return {1.0, 0.0, 0, 0};
  const double c = fbm_normalizer(H);
  const double lead = std::pow(t / s, H - 0.5) * std::pow(t - s, H - 0.5);
  const double scale = c * std::abs(H - 0.5) * std::pow(s, 0.5 - H);
  SingularIntegrand f{[H](double u) { return std::pow(u, H - 1.5); }, H - 0.5, 0.0, s, t, {}};
  const QuadratureResult q = integrate_singular(f, tol / scale);
  return {c * lead - c * (H - 0.5) * std::pow(s, 0.5 - H) * q.value, scale * q.error_estimate,
          q.nodes_used, 0};
}

double fbm_kernel_hypergeometric(double t, double s, double H) {
  detail::validate_hurst(H, "fbm_kernel_hypergeometric");
  if (s >= t) return 0.0;
  require(s > 0.0, "fbm_kernel_hypergeometric: s must be positive");
  const double x = s / t;
  const double k = x > 0.5 ? detail::kappa_from_delta((t - s) / t, H) : detail::kappa(x, H);
  return std::pow(t, H - 0.5) * k;
}

double fbm_kernel_gap(double t, double gap, double H) {
  detail::validate_hurst(H, "fbm_kernel_gap");
  if (gap <= 0.0) return 0.0;
  require(gap < t, "fbm_kernel_gap: gap must be smaller than t");
  const double delta = gap / t;
  const double k = delta < 0.5 ? detail::kappa_from_delta(delta, H) : detail::kappa(1.0 - delta, H);
  return std::pow(t, H - 0.5) * k;
}

KernelEval fbm_psi(double t, double s, double u, double H, double tol) {
  detail::validate_hurst(H, "fbm_psi");
  require(tol > 0.0, "fbm_psi: tol must be positive");
  require(0.0 < s && s < u && u <= t, "fbm_psi: 0 < s < u <= t required");
  if (H == 0.5 || t == u) return {};
  const double pref = std::sin(std::numbers::pi * (H - 0.5)) / std::numbers::pi *
                      std::pow(s, 0.5 - H) * std::pow(u - s, 0.5 - H);
  const double gap = u - s;
  SingularIntegrand f;
  f.alpha = H - 0.5;
  f.lo = u;
  f.hi = t;
  f.g_dist = [H, gap](double z, double d_lo, double) { return std::pow(z, H - 0.5) / (d_lo + gap); };
  const QuadratureResult q = integrate_singular(f, tol / std::abs(pref));
  return {pref * q.value, std::abs(pref) * q.error_estimate, q.nodes_used, 0};
}

KernelEval ccm_kernel(double t, double s, double a, double b, double H, double tol) {
  HurstParams{H, a, b}.validate_ccm();
  if (s >= t) return {};
  if (b == 0.0) return {a, 0.0, 0, 0};
  KernelEval k = fbm_kernel(t, s, H, tol / std::abs(b));
  return {a + b * k.value, std::abs(b) * k.error_estimate, k.nodes_used, 0};
}

double ccm_gamma(int k, double t, double s, double H, double tol) {
  require(k >= 1, "ccm_gamma: k must be positive");
  require(H > 0.5 && H < 1.0, "ccm_gamma: H must lie in (1/2,1)");
  require(tol > 0.0, "ccm_gamma: tol must be positive");
  if (s >= t) return 0.0;
  require(s > 0.0, "ccm_gamma: s must be positive");
  const double beta = k * (H - 0.5);
  // gamma_k = P (t-s)^beta int_0^1 (s + (t-s) y)^{H-1/2} y^{beta-1} dy, with the
  // prefactor P assembled in logs to survive large k.
  const double log_scale = k * std::log(fbm_normalizer(H) * std::tgamma(H + 0.5)) - std::lgamma(beta) +
                           (0.5 - H) * std::log(s) + beta * std::log(t - s);
  const double scale = std::exp(log_scale);
  if (scale == 0.0) return 0.0;
  const double w = t - s;
  SingularIntegrand f{[s, w, H](double y) { return std::pow(s + w * y, H - 0.5); }, beta - 1.0, 0.0, 0.0, 1.0, {}};
  return scale * integrate_singular(f, tol / scale).value;
}

KernelEval ccm_inverse_kernel(double t, double s, double a, double b, double H, double series_tol) {
  HurstParams{H, a, b}.validate_ccm();
  require(series_tol > 0.0, "ccm_inverse_kernel: series_tol must be positive");
  if (s >= t) return {};
  require(s > 0.0, "ccm_inverse_kernel: s must be positive");
  if (b == 0.0) return {1.0 / a, 0.0, 0, 0};
  constexpr int kMaxTerms = 1000;
  const double ratio = -b / a;
  double sum = 1.0 / a;
  std::vector<double> mags;
  double err = 0.0;
  for (int k = 1; k <= kMaxTerms; ++k) {
    const double coef = std::pow(ratio, k) / a;
    const double g_tol = 1e-2 * series_tol / std::abs(coef);
    if (!std::isfinite(coef) || !(g_tol >= std::numeric_limits<double>::min())) {
      throw SeriesDivergenceError("ccm_inverse_kernel: terms overflow before reaching series_tol", k);
    }
    const double term = coef * ccm_gamma(k, t, s, H, g_tol);
    sum += term;
    err += 1e-2 * series_tol;
    mags.push_back(std::abs(term));
    if (mags.back() < series_tol) {
      const std::size_t n = mags.size();
      for (std::size_t i = n - 1; i >= 1 && i + 3 > n; --i) {
        if (!(mags[i] < mags[i - 1])) {
          throw SeriesDivergenceError("ccm_inverse_kernel: series tail is not monotone at term " +
                                          std::to_string(i + 1),
                                      k);
        }
      }
      return {sum, err + mags.back(), 0, k};
    }
  }
  throw SeriesDivergenceError("ccm_inverse_kernel: series_tol not reached within 1000 terms", kMaxTerms);
}

std::vector<double> ccm_adjoint_apply(std::span<const double> f, const TimeGrid& grid, double a,
                                      double b, double H, double tol) {
  HurstParams{H, a, b}.validate_ccm();
  require(f.size() == grid.size(), "ccm_adjoint_apply: f must be sampled on every grid time");
  const auto& t = grid.times();
  const std::size_t n = t.size();
  std::vector<double> out(n, 0.0);
  if (b == 0.0) {
    for (std::size_t j = 0; j < n; ++j) out[j] = a * f[j];
    return out;
  }
  // The literal integral diverges at u = t_j; use the regularized form
  //   f(t) K_H(T,t) + int_t^T (f(u) - f(t)) dK_H(u,t),
  // where dK_H(u,t)/du = c_H (H-1/2) (u/t)^{H-1/2} (u-t)^{H-3/2}.
  const double T = grid.horizon();
  const double pref = fbm_normalizer(H) * (H - 0.5);
  const double piece_tol = tol / (std::abs(b * pref) * static_cast<double>(n));
  for (std::size_t j = 0; j < n; ++j) {
    const double tj = t[j];
    double acc = 0.0;
    // f is constant on [t_i, t_{i+1}); on the first piece f(u) - f(t_j) = 0.
    for (std::size_t i = j + 1; i + 1 < n; ++i) {
      const double df = f[i] - f[j];
      if (df == 0.0) continue;
      SingularIntegrand g;
      g.lo = t[i];
      g.hi = t[i + 1];
      g.g = [H, tj](double u) { return std::pow(u, H - 0.5) * std::pow(u - tj, H - 1.5); };
      const double scale = std::pow(tj, 0.5 - H);
      acc += df * integrate_singular(g, piece_tol / (scale * std::abs(df))).value * scale;
    }
    const double k_end = f[j] == 0.0 ? 0.0 : f[j] * fbm_kernel_hypergeometric(T, tj, H);
    out[j] = a * f[j] + b * (k_end + pref * acc);
  }
  return out;
}

}  // namespace gvpj
