#include "gvpj/wiener_hopf.hpp"

#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <string>

#include "csv_util.hpp"
#include "gvpj/errors.hpp"

namespace gvpj {
namespace {

constexpr const char* kBundleFormat = "gvpj-wh-1";

void check_hurst(double H) { require(H > 0.5 && H < 1.0, "wiener_hopf: H must lie in (1/2,1)"); }

// D + C with D = diag(cell widths) and C the exact cell-pair integrals
//   int_{cell j} int_{cell k} H(2H-1)|x-y|^{2H-2} dx dy
//     = (|b_j-a_k|^{2H} + |a_j-b_k|^{2H} - |b_j-b_k|^{2H} - |a_j-a_k|^{2H}) / 2.
Eigen::MatrixXd galerkin_matrix(const TimeGrid& grid, double H, double kernel_scale) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  const double e = 2.0 * H;
  auto p = [e](double d) { return std::pow(std::abs(d), e); };
  Eigen::MatrixXd A(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double aj = grid.cell_lo(j), bj = grid.cell_hi(j);
    for (Eigen::Index k = 0; k <= j; ++k) {
      const double ak = grid.cell_lo(k), bk = grid.cell_hi(k);
      const double c = 0.5 * (p(bj - ak) + p(aj - bk) - p(bj - bk) - p(aj - ak));
      A(j, k) = A(k, j) = kernel_scale * c;
    }
    A(j, j) += grid.cell_width(j);
  }
  return A;
}

// Solves the leading (r+1)x(r+1) block for every row r, reusing one Cholesky
// factor: the factor of a leading principal block is the leading block of the factor.
template <class Rhs>
Eigen::MatrixXd solve_rows(const TimeGrid& grid, double H, const WhOptions& options, Rhs&& rhs,
                           double* residual, const char* what) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  const Eigen::MatrixXd A = galerkin_matrix(grid, H, options.kernel_scale);
  Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() != Eigen::Success) {
    throw NumericalError(std::string(what) + ": discrete system is not positive definite");
  }
  const Eigen::MatrixXd& factor = llt.matrixLLT();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  double worst = 0.0;
  for (Eigen::Index r = 0; r < n; ++r) {
    const Eigen::Index m = r + 1;
    const Eigen::VectorXd b = rhs(r);
    const auto Lb = factor.topLeftCorner(m, m).triangularView<Eigen::Lower>();
    Eigen::VectorXd x = Lb.solve(b);
    Lb.adjoint().solveInPlace(x);
    const double res = (A.topLeftCorner(m, m) * x - b).lpNorm<Eigen::Infinity>();
    if (!std::isfinite(res)) throw NumericalError(std::string(what) + ": non-finite solution");
    worst = std::max(worst, res);
    out.row(r).head(m) = x.transpose();
  }
  if (residual) *residual = worst;
  if (worst > options.max_residual) {
    throw NumericalError(std::string(what) + ": discrete residual " + std::to_string(worst) +
                         " exceeds " + std::to_string(options.max_residual));
  }
  return out;
}

void check_shape(const Eigen::MatrixXd& M, const TimeGrid& grid, const char* what) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  if (M.rows() != n || M.cols() != n) throw DomainError(std::string(what) + ": grid mismatch");
}

std::string matrix_csv(const Eigen::MatrixXd& M, const TimeGrid& grid) {
  std::string s = "t";
  for (Eigen::Index j = 0; j < M.cols(); ++j) s += ",cell_" + std::to_string(j);
  s += '\n';
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    s += detail::format_double(grid.times()[r]);
    for (Eigen::Index j = 0; j < M.cols(); ++j) s += "," + detail::format_double(M(r, j));
    s += '\n';
  }
  return s;
}

Eigen::MatrixXd read_matrix(const std::filesystem::path& path, std::size_t n) {
  const detail::CsvTable t = detail::read_csv(path);
  if (t.rows.size() != n || t.header.size() != n + 1) throw IoError(path.string() + ": unexpected shape");
  Eigen::MatrixXd M(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t j = 0; j < n; ++j) M(r, j) = t.rows[r][j + 1];
  return M;
}

nlohmann::json read_summary(const std::filesystem::path& dir) {
  std::ifstream in(dir / "summary.json");
  if (!in) throw IoError("cannot open " + (dir / "summary.json").string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw IoError("summary.json: " + std::string(e.what()));
  }
}

}  // namespace

Eigen::MatrixXd solve_L(const TimeGrid& grid, double H, const WhOptions& options, double* residual) {
  check_hurst(H);
  const double e = 2.0 * H - 1.0;
  auto rhs = [&](Eigen::Index r) {
    const double t = grid.times()[r];
    Eigen::VectorXd b(r + 1);
    for (Eigen::Index m = 0; m <= r; ++m) {
      b(m) = -options.forcing_scale * H * (std::pow(t - grid.cell_lo(m), e) - std::pow(t - grid.cell_hi(m), e));
    }
    return b;
  };
  return solve_rows(grid, H, options, rhs, residual, "solve_L");
}

Eigen::VectorXd compute_phi(const Eigen::MatrixXd& L, const TimeGrid& grid) {
  check_shape(L, grid, "compute_phi");
  const auto n = L.rows();
  Eigen::VectorXd phi(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j <= r; ++j) acc += L(r, j) * grid.cell_width(j);
    phi(r) = 1.0 - acc;
  }
  return phi;
}

Eigen::MatrixXd solve_q(const TimeGrid& grid, double H, const Eigen::VectorXd& phi, const WhOptions& options,
                        double* residual) {
  check_hurst(H);
  if (phi.size() != static_cast<Eigen::Index>(grid.size())) throw DomainError("solve_q: grid mismatch");
  // phi enters cell j through its value at the right node t_{j+1}.
  auto rhs = [&](Eigen::Index r) {
    Eigen::VectorXd b(r + 1);
    for (Eigen::Index m = 0; m <= r; ++m) b(m) = grid.cell_width(m) * phi(m);
    return b;
  };
  return solve_rows(grid, H, options, rhs, residual, "solve_q");
}

Eigen::MatrixXd mfbm_kernel(const Eigen::MatrixXd& q, const TimeGrid& grid) {
  check_shape(q, grid, "mfbm_kernel");
  const auto n = q.rows();
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    // I_j = int_{s_j}^{t} q(t,x) dx for s_j the left node of cell j.
    Eigen::VectorXd I = Eigen::VectorXd::Zero(r + 2);
    for (Eigen::Index j = r; j >= 0; --j) I(j) = I(j + 1) + q(r, j) * grid.cell_width(j);
    for (Eigen::Index j = 0; j <= r; ++j) K(r, j) = -(I(j + 1) - I(j)) / grid.cell_width(j);
  }
  return K;
}

Eigen::MatrixXd mfbm_innovation_kernel(const Eigen::MatrixXd& L, const TimeGrid& grid) {
  check_shape(L, grid, "mfbm_innovation_kernel");
  const auto n = L.rows();
  // Inverse kernel on cells, s-integral by the right-endpoint rule over rows.
  Eigen::MatrixXd Kinv = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double acc = 0.0;
    for (Eigen::Index r = j; r < n; ++r) {
      acc += L(r, j) * grid.cell_width(r);
      Kinv(r, j) = 1.0 + acc;
    }
  }
  // Increment matrix of the inverse map (lower triangular: row i = increment over
  // cell i), inverted and re-accumulated into the forward kernel.
  Eigen::MatrixXd inc = Kinv;
  for (Eigen::Index r = n - 1; r >= 1; --r) inc.row(r) -= Kinv.row(r - 1);
  const Eigen::MatrixXd fwd_inc =
      inc.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(n, n));
  Eigen::MatrixXd K = fwd_inc;
  for (Eigen::Index r = 1; r < n; ++r) K.row(r) += K.row(r - 1);
  return K.triangularView<Eigen::Lower>();
}

WhSolution solve_wiener_hopf(const TimeGrid& grid, double H, const WhOptions& options) {
  WhSolution sol;
  sol.grid = grid;
  sol.H = H;
  sol.L = solve_L(grid, H, options, &sol.residual_L);
  sol.phi = compute_phi(sol.L, grid);
  sol.q = solve_q(grid, H, sol.phi, options, &sol.residual_q);
  sol.Kq = mfbm_kernel(sol.q, grid);
  sol.Ktilde = mfbm_innovation_kernel(sol.L, grid);
  return sol;
}

void save_wh_solution(const WhSolution& sol, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  std::string g = "index,time\n";
  for (std::size_t i = 0; i < sol.grid.size(); ++i)
    g += std::to_string(i + 1) + "," + detail::format_double(sol.grid.times()[i]) + "\n";
  detail::write_text(dir / "grid.csv", g);
  std::string p = "t,phi\n";
  for (Eigen::Index r = 0; r < sol.phi.size(); ++r)
    p += detail::format_double(sol.grid.times()[r]) + "," + detail::format_double(sol.phi(r)) + "\n";
  detail::write_text(dir / "phi.csv", p);
  detail::write_text(dir / "L.csv", matrix_csv(sol.L, sol.grid));
  detail::write_text(dir / "q.csv", matrix_csv(sol.q, sol.grid));
  detail::write_text(dir / "Ktilde.csv", matrix_csv(sol.Ktilde, sol.grid));
  detail::write_text(dir / "Kq.csv", matrix_csv(sol.Kq, sol.grid));
  nlohmann::json summary = {{"format", kBundleFormat},
                            {"H", sol.H},
                            {"n", sol.grid.size()},
                            {"T", sol.grid.horizon()},
                            {"residual_L", sol.residual_L},
                            {"residual_q", sol.residual_q}};
  detail::write_text(dir / "summary.json", summary.dump(2) + "\n");
}

WhSolution load_wh_solution(const std::filesystem::path& dir) {
  const nlohmann::json summary = read_summary(dir);
  if (summary.value("format", "") != kBundleFormat) throw IoError(dir.string() + ": unknown bundle format");
  const detail::CsvTable g = detail::read_csv(dir / "grid.csv");
  std::vector<double> times;
  for (const auto& row : g.rows) times.push_back(row.at(1));
  WhSolution sol;
  sol.grid = TimeGrid(times);
  sol.H = summary.at("H").get<double>();
  sol.residual_L = summary.at("residual_L").get<double>();
  sol.residual_q = summary.at("residual_q").get<double>();
  const std::size_t n = times.size();
  sol.L = read_matrix(dir / "L.csv", n);
  sol.q = read_matrix(dir / "q.csv", n);
  sol.Ktilde = read_matrix(dir / "Ktilde.csv", n);
  sol.Kq = read_matrix(dir / "Kq.csv", n);
  const detail::CsvTable p = detail::read_csv(dir / "phi.csv");
  if (p.rows.size() != n) throw IoError("phi.csv: unexpected length");
  sol.phi.resize(static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < n; ++r) sol.phi(static_cast<Eigen::Index>(r)) = p.rows[r].at(1);
  return sol;
}

bool wh_cache_matches(const std::filesystem::path& dir, double H, const TimeGrid& grid) {
  if (!std::filesystem::exists(dir / "summary.json") || !std::filesystem::exists(dir / "grid.csv")) return false;
  try {
    const nlohmann::json summary = read_summary(dir);
    if (summary.value("format", "") != kBundleFormat || summary.at("H").get<double>() != H) return false;
    const detail::CsvTable g = detail::read_csv(dir / "grid.csv");
    if (g.rows.size() != grid.size()) return false;
    for (std::size_t i = 0; i < g.rows.size(); ++i)
      if (g.rows[i].at(1) != grid.times()[i]) return false;
    return true;
  } catch (const Error&) {
    return false;
  } catch (const nlohmann::json::exception&) {
    return false;
  }
}

}  // namespace gvpj
