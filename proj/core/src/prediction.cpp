#include "gvpj/prediction.hpp"

#include <gsl/gsl_cdf.h>
#include <gsl/gsl_randist.h>

#include <algorithm>
#include <cmath>

#include "gvpj/errors.hpp"
#include "gvpj/fbm_kernel_table.hpp"
#include "gvpj/kernels.hpp"
#include "gvpj/quadrature.hpp"

namespace gvpj {
namespace {

// P(a < Z <= b) for standard normal Z, evaluated on the tail side.
double normal_mass(double a, double b) {
  if (a >= 0.0) return gsl_cdf_ugaussian_Q(a) - gsl_cdf_ugaussian_Q(b);
  if (b <= 0.0) return gsl_cdf_ugaussian_P(b) - gsl_cdf_ugaussian_P(a);
  return 1.0 - gsl_cdf_ugaussian_P(a) - gsl_cdf_ugaussian_Q(b);
}

// Adds mass * P(x in cell) for x ~ N(mean, sd^2) to the cells within `window` sd.
void add_gaussian(std::vector<double>& cells, const ValueGrid& g, double mean, double sd, double mass, double window) {
  const double p_lo = (mean - window * sd - g.lo()) / g.h;
  const double p_hi = (mean + window * sd - g.lo()) / g.h;
  const auto n = static_cast<double>(g.size);
  const auto i0 = static_cast<std::size_t>(std::clamp(std::floor(p_lo), 0.0, n));
  const auto i1 = static_cast<std::size_t>(std::clamp(std::ceil(p_hi), 0.0, n));
  for (std::size_t i = i0; i < i1; ++i) {
    const double c = g.center(i);
    cells[i] += mass * normal_mass((c - 0.5 * g.h - mean) / sd, (c + 0.5 * g.h - mean) / sd);
  }
}

struct GaussianPart {
  std::size_t k = 0;  // node index of u
  std::size_t m = 0;  // node index of t
  double mean = 0.0;
};

GaussianPart gaussian_mean(const DiscreteOperator& op, const SamplePath& G, double u, double t, PsiMethod method) {
  require(G.grid == op.grid, "prediction: observed path is not on the operator grid");
  require(u <= t, "prediction: u <= t required");
  GaussianPart gp;
  gp.k = op.grid.node_index(u);
  gp.m = op.grid.node_index(t);
  const std::vector<double> psi = discrete_psi(op, t, u, method);
  gp.mean = G.at_node(gp.k) + stieltjes_sum(psi, G);
  return gp;
}

}  // namespace

double gvp_conditional_mean(const DiscreteOperator& op, const SamplePath& G, double u, double t, PsiMethod method) {
  return gaussian_mean(op, G, u, t, method).mean;
}

double gvp_conditional_cov(const DiscreteOperator& op, double t, double s, double u) {
  const std::size_t k = op.grid.node_index(u);
  const std::size_t mt = op.grid.node_index(t);
  const std::size_t ms = op.grid.node_index(s);
  require(k <= std::min(mt, ms), "gvp_conditional_cov: u <= min(t,s) required");
  const auto kk = static_cast<Eigen::Index>(k);
  const double seen = (op.kernel.row(static_cast<Eigen::Index>(mt)).head(kk).array() *
                       op.kernel.row(static_cast<Eigen::Index>(ms)).head(kk).array() * op.dv.head(kk).transpose().array())
                          .sum();
  const double r = op.model->covariance(op.grid.node(mt), op.grid.node(ms)) - seen;
  return mt == ms ? std::max(r, 0.0) : r;
}

double fbm_conditional_cov(double H, double t, double s, double u) {
  require(0.0 <= u && u <= std::min(t, s), "fbm_conditional_cov: 0 <= u <= min(t,s) required");
  const double R = fbm_covariance(t, s, H);
  if (u == 0.0) return R;
  if (H == 0.5) return R - u;
  const auto table = FbmKernelTable::get(H);
  if (t == s) return std::max(R - table->integral_sq(t, 0.0, u), 0.0);
  // K_H(., x) ~ x^{1/2-H} at the origin; near x = min(t,s) one factor behaves
  // like (min - x)^{H-1/2}.
  const double lo_t = std::min(t, s), hi_t = std::max(t, s);
  const bool touches = u == lo_t;
  SingularIntegrand f;
  f.lo = 0.0;
  f.hi = u;
  f.alpha = 1.0 - 2.0 * H;
  f.beta = touches ? H - 0.5 : 0.0;
  f.g_dist = [&](double x, double d_lo, double d_hi) {
    double k_near = table->kernel(lo_t, x);
    if (touches) k_near = (d_hi < 0.5 * lo_t ? fbm_kernel_gap(lo_t, d_hi, H) : k_near) / std::pow(d_hi, H - 0.5);
    return k_near * table->kernel(hi_t, x) * std::pow(d_lo, 2.0 * H - 1.0);
  };
  return R - integrate_singular(f, 1e-12 * std::max(R, 1e-300)).value;
}

int poisson_truncation(double mean, double tail_tol) {
  require(mean >= 0.0 && std::isfinite(mean), "poisson_truncation: mean must be finite and >= 0");
  require(tail_tol > 0.0, "poisson_truncation: tail_tol must be positive");
  if (mean == 0.0) return 0;
  unsigned n = 0;
  while (gsl_cdf_poisson_Q(n, mean) > tail_tol) ++n;
  return static_cast<int>(n);
}

CompoundPoissonLaw compound_poisson_law(const JumpSpec& spec, double tau, double J_u, const ValueGrid& vgrid,
                                        double tail_tol) {
  require(tau >= 0.0, "compound_poisson_law: tau must be >= 0");
  require(tail_tol > 0.0, "compound_poisson_law: tail_tol must be positive");
  require(vgrid.size > 0, "compound_poisson_law: empty value grid");
  const double mu = spec.lambda() * tau;
  CompoundPoissonLaw out;
  std::vector<double> cells(vgrid.size, 0.0);
  if (mu == 0.0) {
    out.law = DiscreteDistribution(vgrid, std::move(cells), {{J_u, 1.0}});
    return out;
  }
  out.n_max = poisson_truncation(mu, tail_tol);
  out.poisson_tail = gsl_cdf_poisson_Q(static_cast<unsigned>(out.n_max), mu);
  std::vector<Atom> atoms{{J_u, gsl_ran_poisson_pdf(0, mu)}};

  if (const auto* d = std::get_if<NormalJumps>(&spec.dist())) {
    for (int n = 1; n <= out.n_max; ++n) {
      const double w = gsl_ran_poisson_pdf(static_cast<unsigned>(n), mu);
      add_gaussian(cells, vgrid, J_u + n * d->mean, std::sqrt(n * d->variance), w, 40.0);
    }
  } else if (const auto* d = std::get_if<TwoPointJumps>(&spec.dist())) {
    for (int n = 1; n <= out.n_max; ++n) {
      const double w = gsl_ran_poisson_pdf(static_cast<unsigned>(n), mu);
      for (int k = 0; k <= n; ++k) {
        const double pk = gsl_ran_binomial_pdf(static_cast<unsigned>(k), d->p, static_cast<unsigned>(n));
        if (pk > 0.0) atoms.push_back({J_u + k * d->x1 + (n - k) * d->x2, w * pk});
      }
    }
  } else {
    // One jump discretized on the lattice {d h}, then convolved n-fold.
    const double h = vgrid.h;
    const double d0 = std::floor(std::get<UniformJumps>(spec.dist()).lo / h - 0.5);
    const double d1 = std::ceil(std::get<UniformJumps>(spec.dist()).hi / h + 0.5);
    std::vector<double> p1;
    for (double dd = d0; dd <= d1; dd += 1.0) p1.push_back(spec.cdf((dd + 0.5) * h) - spec.cdf((dd - 0.5) * h));
    std::vector<double> pn = p1;
    double offset = d0;
    for (int n = 1; n <= out.n_max; ++n) {
      const double w = gsl_ran_poisson_pdf(static_cast<unsigned>(n), mu);
      for (std::size_t i = 0; i < pn.size(); ++i) {
        if (pn[i] > 0.0) deposit(cells, vgrid, J_u + (offset + static_cast<double>(i)) * h, w * pn[i]);
      }
      if (n < out.n_max) {
        pn = convolve(pn, p1);
        offset += d0;
      }
    }
  }
  out.law = DiscreteDistribution(vgrid, std::move(cells), std::move(atoms));
  return out;
}

double mixed_conditional_mean(const DiscreteOperator& op, const MixedPath& observed, const JumpSpec& spec, double u,
                              double t, PsiMethod method) {
  const GaussianPart gp = gaussian_mean(op, observed.G, u, t, method);
  require(observed.X.grid == op.grid, "mixed_conditional_mean: observed path is not on the operator grid");
  const double tau = op.grid.node(gp.m) - op.grid.node(gp.k);
  const double X_u = observed.X.at_node(gp.k);
  return X_u + (gp.mean - observed.G.at_node(gp.k)) + spec.lambda() * tau * spec.mu1();
}

double mixed_conditional_cov(const DiscreteOperator& op, const JumpSpec& spec, double t, double s, double u) {
  const double g = gvp_conditional_cov(op, t, s, u);
  const double horizon = op.grid.node(op.grid.node_index(std::min(t, s))) - op.grid.node(op.grid.node_index(u));
  return g + spec.lambda() * horizon * spec.mu2();
}

PredictionLaw mixed_conditional_density(std::shared_ptr<const DiscreteOperator> op, const JumpSpec& spec,
                                        const MixedPath& observed, double u, double t, const DensityOptions& opts) {
  require(op != nullptr, "mixed_conditional_density: missing operator");
  require(opts.cells >= 16, "mixed_conditional_density: need at least 16 value cells");
  require(opts.sd_multiplier > 0.0, "mixed_conditional_density: sd_multiplier must be positive");
  const GaussianPart gp = gaussian_mean(*op, observed.G, u, t, opts.psi);
  require(observed.J.grid == op->grid, "mixed_conditional_density: jump path is not on the operator grid");

  PredictionLaw law;
  law.u = op->grid.node(gp.k);
  law.t = op->grid.node(gp.m);
  const double tau = law.t - law.u;
  law.gaussian_mean = gp.mean;
  law.gaussian_var = gp.k == gp.m ? 0.0 : gvp_conditional_cov(*op, law.t, law.t, law.u);
  law.lambda_term_mean = spec.lambda() * tau * spec.mu1();
  law.lambda_term_var = spec.lambda() * tau * spec.mu2();
  law.m_hat = mixed_conditional_mean(*op, observed, spec, law.u, law.t, opts.psi);
  law.r_hat_tt = law.gaussian_var + law.lambda_term_var;
  law.r_hat = [op, spec, uu = law.u](double a, double b) { return mixed_conditional_cov(*op, spec, a, b, uu); };

  const double J_u = observed.J.at_node(gp.k);
  const double mu = spec.lambda() * tau;
  const int n_max = mu > 0.0 ? poisson_truncation(mu, opts.tail_tol) : 0;
  double jlo = 0.0, jhi = 0.0;
  for (int n = 1; n <= n_max; ++n) {
    const auto [a, b] = spec.sum_range(n, opts.sd_multiplier);
    jlo = std::min(jlo, a);
    jhi = std::max(jhi, b);
  }
  const double sd = std::sqrt(law.gaussian_var);
  const double span = (jhi - jlo) + 2.0 * opts.sd_multiplier * sd;
  const double h = span > 0.0 ? span / static_cast<double>(opts.cells) : 1.0;
  const ValueGrid jgrid = ValueGrid::covering(J_u + jlo, J_u + jhi, h, J_u);
  const CompoundPoissonLaw cp = compound_poisson_law(spec, tau, J_u, jgrid, opts.tail_tol);
  law.n_max = cp.n_max;
  law.poisson_tail = cp.poisson_tail;

  if (sd == 0.0) {
    // Degenerate Gaussian part: the jump law shifted by the Gaussian mean.
    ValueGrid g = jgrid;
    g.x0 += gp.mean;
    std::vector<Atom> atoms = cp.law.atoms();
    for (Atom& a : atoms) a.x += gp.mean;
    law.density = DiscreteDistribution(g, cp.law.cell_mass(), std::move(atoms));
  } else {
    const double window = opts.sd_multiplier + 1.0;
    const auto D = static_cast<std::size_t>(std::ceil(window * sd / h));
    std::vector<double> w(2 * D + 1);
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double d = static_cast<double>(i) - static_cast<double>(D);
      w[i] = normal_mass((d - 0.5) * h / sd, (d + 0.5) * h / sd);
    }
    ValueGrid g;
    g.h = h;
    g.x0 = jgrid.x0 + gp.mean - static_cast<double>(D) * h;
    g.size = jgrid.size + 2 * D;
    std::vector<double> cells = convolve(cp.law.cell_mass(), w);
    cells.resize(g.size, 0.0);
    for (const Atom& a : cp.law.atoms()) add_gaussian(cells, g, a.x + gp.mean, sd, a.mass, window);
    law.density = DiscreteDistribution(g, std::move(cells));
  }
  law.mass_defect = std::abs(1.0 - law.density.total_mass());
  if (law.mass_defect > opts.max_mass_defect) {
    throw NumericalError("mixed_conditional_density: mass defect " + std::to_string(law.mass_defect) +
                         " exceeds tolerance; widen the value grid");
  }
  return law;
}

}  // namespace gvpj
