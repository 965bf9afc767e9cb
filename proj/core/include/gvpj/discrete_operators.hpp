#pragma once

#include <Eigen/Dense>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "gvpj/models.hpp"
#include "gvpj/time_grid.hpp"

namespace gvpj {

// Grid realization of a Volterra model. With nodes t_0 = 0 < t_1 < ... < t_n
// and cells [t_j, t_{j+1}):
//   kernel(k, j) = representative of K(t_k, .) on cell j   (zero for j >= k),
//   B(j, i)      = kernel(i+1, j) - kernel(i, j)          (zero for j > i),
//   dv(j)        = v(t_{j+1}) - v(t_j).
// Functions on the grid are left-endpoint samples, one per cell.
struct DiscreteOperator {
  std::shared_ptr<const VolterraModel> model;
  TimeGrid grid;
  Eigen::MatrixXd kernel;  // (n+1) x n
  Eigen::MatrixXd B;       // n x n, upper triangular
  Eigen::VectorXd dv;

  std::size_t size() const noexcept { return grid.size(); }
};

inline constexpr double kDiagonalThreshold = 1e-12;

DiscreteOperator build_operator(std::shared_ptr<const VolterraModel> model, const TimeGrid& grid);

// (K* f)_j = sum_{i >= j} f_i B(j, i).
std::vector<double> adjoint_apply(const DiscreteOperator& op, std::span<const double> f);

// Solves adjoint_apply(op, f) = g by back substitution.
std::vector<double> adjoint_invert(const DiscreteOperator& op, std::span<const double> g);

enum class PsiMethod {
  triangular_solve,  // (K*)^{-1}[K(t,.) - K(u,.)] restricted to [0,u)
  closed_form,       // cell averages of the fBm closed form (fBm models only)
};

// Psi(t, . | u) on the cells left of u, zero beyond. t and u must be grid nodes
// (u may be 0).
std::vector<double> discrete_psi(const DiscreteOperator& op, double t, double u,
                                 PsiMethod method = PsiMethod::triangular_solve);

// Driving martingale from an observed path: solves B^T dM = dG, which only
// looks at G up to the current node.
SamplePath recover_martingale(const DiscreteOperator& op, const SamplePath& G);

// G(t_k) = sum_{j<k} kernel(k, j) dM_j.
SamplePath forward_map(const DiscreteOperator& op, std::span<const double> dM);

// Memoizes operators per (model instance, grid); safe for concurrent use.
class OperatorCache {
 public:
  std::shared_ptr<const DiscreteOperator> get(const std::shared_ptr<const VolterraModel>& model,
                                              const TimeGrid& grid);

 private:
  std::mutex mutex_;
  std::map<std::pair<const VolterraModel*, std::vector<double>>, std::shared_ptr<const DiscreteOperator>> cache_;
};

}  // namespace gvpj
