#include "gvpj/distribution.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>

#include "gvpj/errors.hpp"

namespace gvpj {
namespace {

// FFTW planning is not thread-safe; execution on distinct plans is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

std::vector<double> convolve_direct(std::span<const double> a, std::span<const double> b) {
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

std::vector<double> convolve_fft(std::span<const double> a, std::span<const double> b) {
  const std::size_t n_out = a.size() + b.size() - 1;
  std::size_t n = 1;
  while (n < n_out) n <<= 1;
  const std::size_t nc = n / 2 + 1;
  double* buf = fftw_alloc_real(n);
  fftw_complex* fa = fftw_alloc_complex(nc);
  fftw_complex* fb = fftw_alloc_complex(nc);
  fftw_plan fwd_a, fwd_b, inv;
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fwd_a = fftw_plan_dft_r2c_1d(static_cast<int>(n), buf, fa, FFTW_ESTIMATE);
    fwd_b = fftw_plan_dft_r2c_1d(static_cast<int>(n), buf, fb, FFTW_ESTIMATE);
    inv = fftw_plan_dft_c2r_1d(static_cast<int>(n), fa, buf, FFTW_ESTIMATE);
  }
  std::fill(buf, buf + n, 0.0);
  std::copy(a.begin(), a.end(), buf);
  fftw_execute(fwd_a);
  std::fill(buf, buf + n, 0.0);
  std::copy(b.begin(), b.end(), buf);
  fftw_execute(fwd_b);
  for (std::size_t k = 0; k < nc; ++k) {
    const std::complex<double> z = std::complex<double>(fa[k][0], fa[k][1]) * std::complex<double>(fb[k][0], fb[k][1]);
    fa[k][0] = z.real();
    fa[k][1] = z.imag();
  }
  fftw_execute(inv);
  std::vector<double> out(n_out);
  const double scale = 1.0 / static_cast<double>(n);
  // Masses are nonnegative; clip round-off of the transform.
  for (std::size_t i = 0; i < n_out; ++i) out[i] = std::max(buf[i] * scale, 0.0);
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(fwd_a);
    fftw_destroy_plan(fwd_b);
    fftw_destroy_plan(inv);
  }
  fftw_free(buf);
  fftw_free(fa);
  fftw_free(fb);
  return out;
}

}  // namespace

ValueGrid ValueGrid::covering(double lo, double hi, double h, double anchor) {
  require(h > 0.0 && std::isfinite(h), "value grid: spacing must be positive");
  require(lo <= hi, "value grid: empty range");
  const double k0 = std::floor((lo - anchor) / h);
  const double k1 = std::ceil((hi - anchor) / h);
  ValueGrid g;
  g.h = h;
  g.x0 = anchor + k0 * h;
  g.size = static_cast<std::size_t>(k1 - k0) + 1;
  return g;
}

DiscreteDistribution::DiscreteDistribution(ValueGrid grid, std::vector<double> cell_mass, std::vector<Atom> atoms)
    : grid_(grid), mass_(std::move(cell_mass)) {
  require(mass_.size() == grid_.size, "distribution: mass vector does not match value grid");
  cum_.assign(mass_.size() + 1, 0.0);
  for (std::size_t i = 0; i < mass_.size(); ++i) {
    require(mass_[i] >= 0.0, "distribution: negative cell mass");
    cum_[i + 1] = cum_[i] + mass_[i];
  }
  std::sort(atoms.begin(), atoms.end(), [](const Atom& l, const Atom& r) { return l.x < r.x; });
  for (const Atom& a : atoms) {
    require(a.mass >= 0.0, "distribution: negative atom mass");
    if (a.mass == 0.0) continue;
    if (!atoms_.empty() && atoms_.back().x == a.x)
      atoms_.back().mass += a.mass;
    else
      atoms_.push_back(a);
  }
  atom_cum_.assign(atoms_.size() + 1, 0.0);
  for (std::size_t i = 0; i < atoms_.size(); ++i) atom_cum_[i + 1] = atom_cum_[i] + atoms_[i].mass;
  total_ = cum_.back() + atom_cum_.back();
}

double DiscreteDistribution::mean() const {
  double s = 0.0;
  for (std::size_t i = 0; i < mass_.size(); ++i) s += mass_[i] * grid_.center(i);
  for (const Atom& a : atoms_) s += a.mass * a.x;
  return s / total_;
}

double DiscreteDistribution::variance() const {
  const double m = mean();
  double s = 0.0;
  for (std::size_t i = 0; i < mass_.size(); ++i) {
    const double d = grid_.center(i) - m;
    s += mass_[i] * (d * d + grid_.h * grid_.h / 12.0);
  }
  for (const Atom& a : atoms_) s += a.mass * (a.x - m) * (a.x - m);
  return s / total_;
}

double DiscreteDistribution::cell_part(double x) const {
  if (mass_.empty()) return 0.0;
  const double p = (x - grid_.lo()) / grid_.h;
  if (p <= 0.0) return 0.0;
  if (p >= static_cast<double>(mass_.size())) return cum_.back();
  const auto i = static_cast<std::size_t>(p);
  return cum_[i] + (p - static_cast<double>(i)) * mass_[i];
}

double DiscreteDistribution::atom_part(double x, bool inclusive) const {
  const auto it = inclusive
                      ? std::upper_bound(atoms_.begin(), atoms_.end(), x, [](double v, const Atom& a) { return v < a.x; })
                      : std::lower_bound(atoms_.begin(), atoms_.end(), x, [](const Atom& a, double v) { return a.x < v; });
  return atom_cum_[static_cast<std::size_t>(it - atoms_.begin())];
}

double DiscreteDistribution::cdf(double x) const { return cell_part(x) + atom_part(x, true); }

double DiscreteDistribution::cdf_left(double x) const { return cell_part(x) + atom_part(x, false); }

double deposit(std::vector<double>& cells, const ValueGrid& grid, double x, double mass) {
  const double p = (x - grid.x0) / grid.h;
  const double f = std::floor(p);
  const double w = p - f;
  const auto n = static_cast<double>(grid.size);
  double lost = 0.0;
  const auto put = [&](double k, double m) {
    if (m == 0.0) return;
    if (k < 0.0 || k >= n)
      lost += m;
    else
      cells[static_cast<std::size_t>(k)] += m;
  };
  put(f, mass * (1.0 - w));
  put(f + 1.0, mass * w);
  return lost;
}

std::vector<double> convolve(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) return {};
  if (std::min(a.size(), b.size()) <= kDirectConvolutionLimit) return convolve_direct(a, b);
  return convolve_fft(a, b);
}

}  // namespace gvpj
