#include "gvpj/discrete_operators.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "gvpj/errors.hpp"
#include "gvpj/quadrature.hpp"

namespace gvpj {
namespace {

void check_diagonal(const Eigen::MatrixXd& B, Eigen::Index k) {
  for (Eigen::Index j = 0; j < k; ++j) {
    if (!(std::abs(B(j, j)) > kDiagonalThreshold)) {
      throw NumericalError("discrete kernel is not invertible: |B(" + std::to_string(j) + "," +
                           std::to_string(j) + ")| <= 1e-12");
    }
  }
}

// Average of Psi_H(t, . | u) over [lo, hi] with hi <= u.
double psi_cell_average(double t, double u, double lo, double hi, double H) {
  const double c = std::sin(std::numbers::pi * (H - 0.5)) / std::numbers::pi;
  const bool at_origin = lo == 0.0;
  const bool at_u = hi == u;
  SingularIntegrand outer;
  outer.lo = lo;
  outer.hi = hi;
  outer.alpha = at_origin ? 0.5 - H : 0.0;
  outer.beta = at_u ? 0.5 - H : 0.0;
  outer.g_dist = [=](double s, double, double d_hi) {
    const double gap = at_u ? d_hi : u - s;
    double v = c;
    if (!at_origin) v *= std::pow(s, 0.5 - H);
    if (!at_u) v *= std::pow(gap, 0.5 - H);
    SingularIntegrand inner;
    inner.lo = u;
    inner.hi = t;
    inner.alpha = H - 0.5;
    inner.g_dist = [H, gap](double z, double d_lo, double) { return std::pow(z, H - 0.5) / (d_lo + gap); };
    return v * integrate_singular(inner, 1e-11).value;
  };
  return integrate_singular(outer, 1e-10 * (hi - lo)).value / (hi - lo);
}

}  // namespace

DiscreteOperator build_operator(std::shared_ptr<const VolterraModel> model, const TimeGrid& grid) {
  require(model != nullptr, "build_operator: missing model");
  require(!grid.empty(), "build_operator: empty grid");
  if (const TimeGrid* native = model->native_grid()) {
    require(*native == grid, "build_operator: " + model->name() + " is only defined on its own grid");
  }
  const auto n = static_cast<Eigen::Index>(grid.size());
  DiscreteOperator op;
  op.model = model;
  op.grid = grid;
  op.kernel = Eigen::MatrixXd::Zero(n + 1, n);
  for (Eigen::Index k = 1; k <= n; ++k) {
    const double t = grid.node(static_cast<std::size_t>(k));
    for (Eigen::Index j = 0; j < k; ++j) {
      const double v = model->cell_kernel(t, grid.cell_lo(j), grid.cell_hi(j));
      if (!std::isfinite(v)) throw NumericalError("build_operator: non-finite kernel value");
      op.kernel(k, j) = v;
    }
  }
  op.B = (op.kernel.bottomRows(n) - op.kernel.topRows(n)).transpose();
  op.B.triangularView<Eigen::StrictlyLower>().setZero();
  op.dv.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    op.dv(j) = model->bracket(grid.cell_hi(j)) - model->bracket(grid.cell_lo(j));
    if (!(op.dv(j) > 0.0)) throw NumericalError("build_operator: bracket must increase strictly");
  }
  return op;
}

std::vector<double> adjoint_apply(const DiscreteOperator& op, std::span<const double> f) {
  require(f.size() == op.size(), "adjoint_apply: dimension mismatch");
  const Eigen::Map<const Eigen::VectorXd> fv(f.data(), static_cast<Eigen::Index>(f.size()));
  const Eigen::VectorXd g = op.B.triangularView<Eigen::Upper>() * fv;
  return {g.data(), g.data() + g.size()};
}

std::vector<double> adjoint_invert(const DiscreteOperator& op, std::span<const double> g) {
  require(g.size() == op.size(), "adjoint_invert: dimension mismatch");
  check_diagonal(op.B, op.B.rows());
  Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(g.data(), static_cast<Eigen::Index>(g.size()));
  op.B.triangularView<Eigen::Upper>().solveInPlace(x);
  return {x.data(), x.data() + x.size()};
}

std::vector<double> discrete_psi(const DiscreteOperator& op, double t, double u, PsiMethod method) {
  require(u <= t, "discrete_psi: u <= t required");
  const std::size_t k = op.grid.node_index(u);
  const std::size_t m = op.grid.node_index(t);
  std::vector<double> psi(op.size(), 0.0);
  if (k == 0 || k == m) return psi;
  const auto kk = static_cast<Eigen::Index>(k);
  if (method == PsiMethod::closed_form) {
    const auto* fbm = dynamic_cast<const FbmModel*>(op.model.get());
    require(fbm != nullptr, "discrete_psi: the closed form exists for fBm models only");
    const double H = *fbm->hurst();
    if (H == 0.5) return psi;
    const double tt = op.grid.node(m), uu = op.grid.node(k);
    for (std::size_t j = 0; j < k; ++j)
      psi[j] = psi_cell_average(tt, uu, op.grid.cell_lo(j), op.grid.cell_hi(j), H);
    return psi;
  }
  check_diagonal(op.B, kk);
  Eigen::VectorXd g = op.kernel.row(static_cast<Eigen::Index>(m)).head(kk) - op.kernel.row(kk).head(kk);
  op.B.topLeftCorner(kk, kk).triangularView<Eigen::Upper>().solveInPlace(g);
  for (Eigen::Index j = 0; j < kk; ++j) psi[static_cast<std::size_t>(j)] = g(j);
  return psi;
}

SamplePath recover_martingale(const DiscreteOperator& op, const SamplePath& G) {
  require(G.grid == op.grid, "recover_martingale: path is not on the operator grid");
  check_diagonal(op.B, op.B.rows());
  const std::vector<double> dG = G.increments();
  Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(dG.data(), static_cast<Eigen::Index>(dG.size()));
  op.B.transpose().triangularView<Eigen::Lower>().solveInPlace(x);
  return SamplePath::from_increments(op.grid, {x.data(), x.data() + x.size()});
}

SamplePath forward_map(const DiscreteOperator& op, std::span<const double> dM) {
  require(dM.size() == op.size(), "forward_map: dimension mismatch");
  const auto n = static_cast<Eigen::Index>(dM.size());
  const Eigen::Map<const Eigen::VectorXd> m(dM.data(), n);
  // Row k-1 of the lower block is node k; entries right of the diagonal are zero.
  const Eigen::VectorXd g = op.kernel.bottomRows(n).triangularView<Eigen::Lower>() * m;
  return SamplePath(op.grid, {g.data(), g.data() + g.size()});
}

std::shared_ptr<const DiscreteOperator> OperatorCache::get(const std::shared_ptr<const VolterraModel>& model,
                                                           const TimeGrid& grid) {
  std::lock_guard<std::mutex> lock(mutex_);
  auto key = std::make_pair(model.get(), grid.times());
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  auto op = std::make_shared<const DiscreteOperator>(build_operator(model, grid));
  cache_.emplace(std::move(key), op);
  return op;
}

}  // namespace gvpj
