#pragma once

// Shared helpers for the fBm kernel; not part of the installed interface.

namespace gvpj::detail {

// kappa(x) = K_H(1, x), 0 < x < 1, so that K_H(t,s) = t^{H-1/2} kappa(s/t).
// Near the origin it uses the connection formula
//   kappa(x) = c_H [B0 x^{H-1/2} + x^{1/2-H} (1-x)^{H-1/2} F(1/2-H, 1; 2-2H; x) / 2],
// near the diagonal the direct form c_H (x(1-x))^{H-1/2} F(2H, H-1/2; H+1/2; 1-x).
double kappa(double x, double H);

// kappa(1 - delta), accurate for small delta.
double kappa_from_delta(double delta, double H);

// Coefficient B0 = Gamma(H+1/2) Gamma(2-2H) / (2 Gamma(3/2-H)) of the connection formula.
double kappa_b0(double H);

void validate_hurst(double H, const char* where);

}  // namespace gvpj::detail
