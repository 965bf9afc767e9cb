#pragma once

#include <array>
#include <memory>
#include <vector>

namespace gvpj {

// Scale-free tabulation of the fBm kernel. With kappa(x) = K_H(1,x),
//   K_H(t,s) = t^{H-1/2} kappa(s/t),
//   int_a^b K_H(t,s) ds   = t^{H+1/2} int_{a/t}^{b/t} kappa,
//   int_a^b K_H(t,s)^2 ds = t^{2H}    int_{a/t}^{b/t} kappa^2,
// so two cumulative integrals of kappa serve every cell of every grid.
// Panels are geometric toward both endpoints; integrals near x = 1 are
// accumulated from the right to avoid cancellation.
class FbmKernelTable {
 public:
  explicit FbmKernelTable(double H);

  // Shared per-H instance; construction is serialized, reads are lock-free.
  static std::shared_ptr<const FbmKernelTable> get(double H);

  double hurst() const noexcept { return H_; }
  double kernel(double t, double s) const;
  // int_lo^hi K_H(t,s) ds and int_lo^hi K_H(t,s)^2 ds, with [lo,hi] clipped to [0,t].
  double integral(double t, double lo, double hi) const;
  double integral_sq(double t, double lo, double hi) const;

  static constexpr int kPanelPoints = 24;
  static constexpr int kPanelsPerSide = 50;

 private:
  struct Panel {
    double y0 = 0.0, y1 = 0.0;           // range in the side variable
    std::array<double, kPanelPoints> c1{};  // antiderivative coefficients of f
    std::array<double, kPanelPoints> c2{};  // ... of f^2
    double base1 = 0.0, base2 = 0.0;     // cumulative from 0 to y0
  };
  // One side of (0,1): y = x on the left, y = 1 - x on the right, y in (0, 1/2].
  struct Side {
    std::vector<Panel> panels;
    double total1 = 0.0, total2 = 0.0;  // integrals over (0, 1/2]
    double tail_y = 0.0;
    double tail1_coef[3] = {}, tail1_pow[3] = {};
    double tail2_coef[3] = {}, tail2_pow[3] = {};
    // int_0^y f and int_0^y f^2.
    void cumulative(double y, double& f1, double& f2) const;
  };

  // int_0^x kappa^p for p = 1, 2 using the side that avoids cancellation.
  double cumulative_between(double x0, double x1, int power) const;

  double H_;
  Side left_, right_;
};

}  // namespace gvpj
