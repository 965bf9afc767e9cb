#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>

#include "gvpj/time_grid.hpp"

namespace gvpj {

// Discrete solution of the mixed-fBm integral equations. Functions of s are
// stored as cell values: row r belongs to t = t_{r+1}, column j to cell j, and
// entries with j > r are zero.
struct WhSolution {
  TimeGrid grid;
  double H = 0.75;
  Eigen::MatrixXd L;
  Eigen::VectorXd phi;        // phi(t_{r+1})
  Eigen::MatrixXd q;
  Eigen::MatrixXd Ktilde;     // Volterra kernel of W + B^H (innovation route)
  Eigen::MatrixXd Kq;         // -d/ds int_s^t q(t,x) dx, realized literally
  double residual_L = 0.0;
  double residual_q = 0.0;
};

// Test hooks: scale the forcing term or the weakly singular kernel.
struct WhOptions {
  double forcing_scale = 1.0;
  double kernel_scale = 1.0;
  double max_residual = 1e-8;
};

// Solves L(t,s) + H(2H-1) int_0^t L(t,x)|s-x|^{2H-2} dx = -H(2H-1)|t-s|^{2H-2}
// row by row with piecewise-constant Galerkin and exact cell-pair integrals of
// the singular kernel. `residual` receives the sup-norm discrete residual.
Eigen::MatrixXd solve_L(const TimeGrid& grid, double H, const WhOptions& options = {},
                        double* residual = nullptr);

// phi(t_i) = 1 - int_0^{t_i} L(t_i,x) dx.
Eigen::VectorXd compute_phi(const Eigen::MatrixXd& L, const TimeGrid& grid);

// q(t,s) + H(2H-1) int_0^t q(t,x)|s-x|^{2H-2} dx = phi(s), row by row.
Eigen::MatrixXd solve_q(const TimeGrid& grid, double H, const Eigen::VectorXd& phi,
                        const WhOptions& options = {}, double* residual = nullptr);

// Finite difference of the cumulative integral of q(t,.) over each cell.
Eigen::MatrixXd mfbm_kernel(const Eigen::MatrixXd& q, const TimeGrid& grid);

// Kernel of W + B^H obtained by inverting the innovation map
// K^{-1}(t,x) = 1 + int_x^t L(s,x) ds on the grid.
Eigen::MatrixXd mfbm_innovation_kernel(const Eigen::MatrixXd& L, const TimeGrid& grid);

WhSolution solve_wiener_hopf(const TimeGrid& grid, double H, const WhOptions& options = {});

// CSV bundle: grid.csv, L.csv, phi.csv, q.csv, Ktilde.csv, Kq.csv and summary.json.
void save_wh_solution(const WhSolution& sol, const std::filesystem::path& dir);
WhSolution load_wh_solution(const std::filesystem::path& dir);

// True when dir holds a bundle for exactly this (H, grid).
bool wh_cache_matches(const std::filesystem::path& dir, double H, const TimeGrid& grid);

}  // namespace gvpj
