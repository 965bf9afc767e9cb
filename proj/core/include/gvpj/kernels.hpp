#pragma once

#include <span>
#include <vector>

#include "gvpj/time_grid.hpp"

namespace gvpj {

// Hurst index plus the mixing weights of the completely correlated model
// a W + b B^H (a, b unused for plain fBm).
struct HurstParams {
  double H = 0.5;
  double a = 1.0;
  double b = 0.0;

  void validate_fbm() const;
  void validate_ccm() const;
};

struct KernelEval {
  double value = 0.0;
  double error_estimate = 0.0;
  int nodes_used = 0;
  int terms_used = 0;
};

// R_H(t,s) = (t^{2H} + s^{2H} - |t-s|^{2H}) / 2.
double fbm_covariance(double t, double s, double H);

// c_H = sqrt(2H Gamma(3/2-H) / (Gamma(1/2+H) Gamma(2-2H))).
double fbm_normalizer(double H);

// K_H(t,s) with the inner integral done by singular quadrature; exactly 0 for s >= t.
KernelEval fbm_kernel(double t, double s, double H, double tol);

// K_H(t,s) through its Gauss hypergeometric representation. Fast; used for bulk
// evaluation and as an independent cross-check of fbm_kernel.
double fbm_kernel_hypergeometric(double t, double s, double H);

// K_H(t, t - gap), accurate when gap is far below the rounding level of t.
double fbm_kernel_gap(double t, double gap, double H);

// Prediction kernel Psi_H(t,s|u) for 0 < s < u <= t.
KernelEval fbm_psi(double t, double s, double u, double H, double tol);

// a 1_t(s) + b K_H(t,s).
KernelEval ccm_kernel(double t, double s, double a, double b, double H, double tol);

// gamma_k(t,s) of the inverse-kernel series, with c(H) = c_H.
double ccm_gamma(int k, double t, double s, double H, double tol);

// (1/a) 1_t(s) + (1/a) sum_k (-b/a)^k gamma_k(t,s); terms_used holds the truncation index.
KernelEval ccm_inverse_kernel(double t, double s, double a, double b, double H, double series_tol);

// Continuum adjoint (K*_{a,b,H} f)(t_j) at the grid times, with f piecewise
// constant from its left-endpoint samples f(t_j).
std::vector<double> ccm_adjoint_apply(std::span<const double> f, const TimeGrid& grid, double a,
                                      double b, double H, double tol);

}  // namespace gvpj
