#pragma once

#include <functional>
#include <memory>

#include "gvpj/discrete_operators.hpp"
#include "gvpj/distribution.hpp"
#include "gvpj/jumps.hpp"
#include "gvpj/simulation.hpp"
#include "gvpj/time_grid.hpp"

namespace gvpj {

// E[G_t | G_s, s <= u] = G_u + sum_j Psi(t, t_j | u) dG_j. G must live on
// op.grid; values after u are ignored.
double gvp_conditional_mean(const DiscreteOperator& op, const SamplePath& G, double u, double t,
                            PsiMethod method = PsiMethod::triangular_solve);

// R(t,s) - sum_{t_j < u} K(t,t_j) K(s,t_j) dv_j; t, s, u grid nodes, u <= min(t,s).
// Clamped at 0 on the diagonal.
double gvp_conditional_cov(const DiscreteOperator& op, double t, double s, double u);

// Continuum counterpart for fBm: R_H(t,s) - int_0^u K_H(t,x) K_H(s,x) dx.
double fbm_conditional_cov(double H, double t, double s, double u);

// Smallest N with P(Poisson(mean) > N) <= tail_tol.
int poisson_truncation(double mean, double tail_tol);

struct CompoundPoissonLaw {
  DiscreteDistribution law;
  int n_max = 0;
  double poisson_tail = 0.0;  // P(N > n_max), left out of the law
};

// Law of J_u + (J_{u+tau} - J_u). The no-jump term is an exact atom at J_u,
// two-point sums stay atoms, normal sums use exact cell masses, and uniform
// sums are convolved on the lattice.
CompoundPoissonLaw compound_poisson_law(const JumpSpec& spec, double tau, double J_u, const ValueGrid& vgrid,
                                        double tail_tol);

// X_u + sum_j Psi_j dG_j + lambda (t-u) mu1, from the decomposed observation.
double mixed_conditional_mean(const DiscreteOperator& op, const MixedPath& observed, const JumpSpec& spec, double u,
                              double t, PsiMethod method = PsiMethod::triangular_solve);

// Gaussian conditional covariance plus lambda (min(t,s) - u) mu2. Takes no path.
double mixed_conditional_cov(const DiscreteOperator& op, const JumpSpec& spec, double t, double s, double u);

struct DensityOptions {
  std::size_t cells = 8192;    // target number of value cells
  double sd_multiplier = 8.0;  // half-width of the Gaussian window in sd
  double tail_tol = 1e-8;      // Poisson truncation
  double max_mass_defect = 1e-6;
  PsiMethod psi = PsiMethod::triangular_solve;
};

struct PredictionLaw {
  double u = 0.0;
  double t = 0.0;
  double m_hat = 0.0;           // conditional mean of X_t
  double r_hat_tt = 0.0;        // conditional variance of X_t
  double gaussian_mean = 0.0;   // conditional mean of G_t
  double gaussian_var = 0.0;    // conditional variance of G_t
  double lambda_term_mean = 0.0;
  double lambda_term_var = 0.0;
  std::function<double(double, double)> r_hat;  // (t', s') -> conditional covariance of X
  DiscreteDistribution density;                 // conditional law of X_t
  int n_max = 0;
  double poisson_tail = 0.0;
  double mass_defect = 0.0;
};

// Conditional law of X_t given the observation up to u: the Gaussian law
// N(m^G, R^G) convolved with the compound Poisson law started at J_u.
// Throws NumericalError if the mass defect exceeds opts.max_mass_defect.
PredictionLaw mixed_conditional_density(std::shared_ptr<const DiscreteOperator> op, const JumpSpec& spec,
                                        const MixedPath& observed, double u, double t,
                                        const DensityOptions& opts = {});

}  // namespace gvpj
