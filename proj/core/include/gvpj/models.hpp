#pragma once

#include <memory>
#include <optional>
#include <string>

#include "gvpj/fbm_kernel_table.hpp"
#include "gvpj/kernels.hpp"
#include "gvpj/time_grid.hpp"
#include "gvpj/wiener_hopf.hpp"

namespace gvpj {

// A Gaussian Volterra model G_t = int_0^t K(t,s) dM_s: covariance R, kernel K
// and bracket v of the driving martingale.
class VolterraModel {
 public:
  virtual ~VolterraModel() = default;

  virtual std::string name() const = 0;
  virtual double covariance(double t, double s) const = 0;
  virtual double bracket(double t) const { return t; }
  virtual double kernel(double t, double s) const = 0;

  // Representative value of K(t, .) on the cell [lo, hi) with hi <= t. Analytic
  // kernels use sign(mean) * RMS over the cell, which keeps
  // sum_j K(t,cell j)^2 dv_j equal to int_0^t K(t,s)^2 ds.
  virtual double cell_kernel(double t, double lo, double hi) const = 0;

  virtual std::optional<double> hurst() const { return std::nullopt; }
  // Grid the model is tied to, for grid-backed kernels.
  virtual const TimeGrid* native_grid() const { return nullptr; }
};

class FbmModel : public VolterraModel {
 public:
  explicit FbmModel(double H);
  std::string name() const override;
  double covariance(double t, double s) const override;
  double kernel(double t, double s) const override;
  double cell_kernel(double t, double lo, double hi) const override;
  std::optional<double> hurst() const override { return H_; }

 private:
  double H_;
  std::shared_ptr<const FbmKernelTable> table_;
};

// a W + b B^H with B^H driven by the same W.
class CcmfbmModel : public VolterraModel {
 public:
  CcmfbmModel(double a, double b, double H);
  std::string name() const override;
  double covariance(double t, double s) const override;
  double kernel(double t, double s) const override;
  double cell_kernel(double t, double lo, double hi) const override;
  std::optional<double> hurst() const override { return p_.H; }
  const HurstParams& params() const noexcept { return p_; }

 private:
  HurstParams p_;
  std::shared_ptr<const FbmKernelTable> table_;
};

// W + B^H with independent components; kernel values come from a Wiener-Hopf
// solution and exist only on its grid.
class MfbmModel : public VolterraModel {
 public:
  explicit MfbmModel(std::shared_ptr<const WhSolution> solution);
  std::string name() const override;
  double covariance(double t, double s) const override;
  double kernel(double t, double s) const override;
  double cell_kernel(double t, double lo, double hi) const override;
  std::optional<double> hurst() const override { return sol_->H; }
  const TimeGrid* native_grid() const override { return &sol_->grid; }
  const WhSolution& solution() const noexcept { return *sol_; }

 private:
  std::shared_ptr<const WhSolution> sol_;
};

}  // namespace gvpj
