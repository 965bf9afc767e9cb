#include "gvpj/models.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gvpj/errors.hpp"

namespace gvpj {
namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

double signed_rms(double mean_integral, double sq_integral, double width) {
  const double rms = std::sqrt(std::max(sq_integral, 0.0) / width);
  return mean_integral < 0.0 ? -rms : rms;
}

}  // namespace

FbmModel::FbmModel(double H) : H_(H) {
  HurstParams{H}.validate_fbm();
  table_ = FbmKernelTable::get(H);
}

std::string FbmModel::name() const { return "fbm(H=" + fmt(H_) + ")"; }

double FbmModel::covariance(double t, double s) const { return fbm_covariance(t, s, H_); }

double FbmModel::kernel(double t, double s) const { return table_->kernel(t, s); }

double FbmModel::cell_kernel(double t, double lo, double hi) const {
  hi = std::min(hi, t);
  if (hi <= lo) return 0.0;
  if (H_ == 0.5) return 1.0;
  return std::sqrt(table_->integral_sq(t, lo, hi) / (hi - lo));
}

CcmfbmModel::CcmfbmModel(double a, double b, double H) : p_{H, a, b} {
  p_.validate_ccm();
  table_ = FbmKernelTable::get(H);
}

std::string CcmfbmModel::name() const {
  return "ccmfbm(a=" + fmt(p_.a) + ",b=" + fmt(p_.b) + ",H=" + fmt(p_.H) + ")";
}

double CcmfbmModel::covariance(double t, double s) const {
  // a^2 (t^s) + ab (E[W_t B_s] + E[B_t W_s]) + b^2 R_H, E[B_t W_m] = int_0^m K_H(t,u) du.
  const double m = std::min(t, s);
  if (m <= 0.0) return 0.0;
  const double cross = table_->integral(t, 0.0, m) + table_->integral(s, 0.0, m);
  return p_.a * p_.a * m + p_.a * p_.b * cross + p_.b * p_.b * fbm_covariance(t, s, p_.H);
}

double CcmfbmModel::kernel(double t, double s) const {
  if (s >= t) return 0.0;
  return p_.a + p_.b * table_->kernel(t, s);
}

double CcmfbmModel::cell_kernel(double t, double lo, double hi) const {
  hi = std::min(hi, t);
  if (hi <= lo) return 0.0;
  const double w = hi - lo;
  const double i1 = table_->integral(t, lo, hi);
  const double i2 = table_->integral_sq(t, lo, hi);
  const double a = p_.a, b = p_.b;
  return signed_rms(a * w + b * i1, a * a * w + 2.0 * a * b * i1 + b * b * i2, w);
}

MfbmModel::MfbmModel(std::shared_ptr<const WhSolution> solution) : sol_(std::move(solution)) {
  require(sol_ != nullptr, "mfbm: missing Wiener-Hopf solution");
  const auto n = static_cast<Eigen::Index>(sol_->grid.size());
  require(sol_->Ktilde.rows() == n && sol_->Ktilde.cols() == n, "mfbm: kernel matrix does not match grid");
}

std::string MfbmModel::name() const { return "mfbm(H=" + fmt(sol_->H) + ")"; }

double MfbmModel::covariance(double t, double s) const { return std::min(t, s) + fbm_covariance(t, s, sol_->H); }

double MfbmModel::kernel(double t, double s) const {
  if (s >= t || s < 0.0) return 0.0;
  const std::size_t r = sol_->grid.node_index(t) - 1;
  const auto& times = sol_->grid.times();
  // Cell containing s.
  const std::size_t j = static_cast<std::size_t>(std::upper_bound(times.begin(), times.end(), s) - times.begin());
  return sol_->Ktilde(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j));
}

double MfbmModel::cell_kernel(double t, double lo, double hi) const {
  if (hi > t || hi <= lo) return 0.0;
  const std::size_t r = sol_->grid.node_index(t);
  const std::size_t j = sol_->grid.node_index(lo);
  if (sol_->grid.node_index(hi) != j + 1) throw DomainError("mfbm: cell is not a grid cell");
  if (r == 0) return 0.0;
  return sol_->Ktilde(static_cast<Eigen::Index>(r - 1), static_cast<Eigen::Index>(j));
}

}  // namespace gvpj
