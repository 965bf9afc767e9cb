#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "gvpj/discrete_operators.hpp"
#include "gvpj/errors.hpp"
#include "gvpj/kernels.hpp"
#include "gvpj/simulation.hpp"

namespace gvpj {
namespace {

std::vector<double> random_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  std::vector<double> v(n);
  for (double& x : v) x = z(rng);
  return v;
}

double sup_rel(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0, m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d = std::max(d, std::abs(a[i] - b[i]));
    m = std::max(m, std::abs(b[i]));
  }
  return d / m;
}

std::vector<std::shared_ptr<const VolterraModel>> model_families(const TimeGrid& g) {
  return {std::make_shared<FbmModel>(0.75), std::make_shared<FbmModel>(0.25),
          std::make_shared<CcmfbmModel>(1.0, 0.5, 0.75), std::make_shared<CcmfbmModel>(2.0, -0.7, 0.9),
          std::make_shared<MfbmModel>(std::make_shared<WhSolution>(solve_wiener_hopf(g, 0.75)))};
}

TEST(BuildOperator, BrownianIsIdentityPattern) {
  const DiscreteOperator op = build_operator(std::make_shared<FbmModel>(0.5), TimeGrid::uniform(1.0, 6));
  for (Eigen::Index j = 0; j < 6; ++j)
    for (Eigen::Index i = 0; i < 6; ++i) EXPECT_EQ(op.B(j, i), i == j ? 1.0 : 0.0);
  const std::vector<double> f = random_vector(6, 3);
  EXPECT_EQ(adjoint_apply(op, f), f);
}

TEST(BuildOperator, TriangularAndPositiveBracket) {
  const TimeGrid g = TimeGrid::uniform(1.0, 16);
  for (const auto& m : model_families(g)) {
    const DiscreteOperator op = build_operator(m, g);
    for (Eigen::Index j = 0; j < 16; ++j) {
      EXPECT_GT(op.dv(j), 0.0);
      for (Eigen::Index i = 0; i < j; ++i) EXPECT_EQ(op.B(j, i), 0.0) << m->name();
    }
  }
}

TEST(BuildOperator, GramReproducesCovariance) {
  const TimeGrid g = TimeGrid::uniform(1.0, 8);
  const DiscreteOperator op = build_operator(std::make_shared<FbmModel>(0.75), g);
  // Diagonal entries are exact by the RMS cell convention.
  for (std::size_t k = 1; k <= 8; ++k) {
    double acc = 0.0;
    for (std::size_t j = 0; j < k; ++j) acc += std::pow(op.kernel(k, j), 2) * op.dv(j);
    EXPECT_NEAR(acc, fbm_covariance(g.node(k), g.node(k), 0.75), 1e-13);
  }
  // Off-diagonal entries approximate R on a coarse grid.
  for (std::size_t k = 2; k <= 8; ++k) {
    double acc = 0.0;
    for (std::size_t j = 0; j < k - 1; ++j) acc += op.kernel(k, j) * op.kernel(k - 1, j) * op.dv(j);
    EXPECT_NEAR(acc, fbm_covariance(g.node(k), g.node(k - 1), 0.75), 0.02);
  }
}

TEST(BuildOperator, GridBackedModelRequiresItsGrid) {
  auto m = std::make_shared<MfbmModel>(std::make_shared<WhSolution>(solve_wiener_hopf(TimeGrid::uniform(1.0, 8), 0.75)));
  EXPECT_THROW(build_operator(m, TimeGrid::uniform(1.0, 16)), DomainError);
}

TEST(AdjointApply, IndicatorGivesKernelColumn) {
  const TimeGrid g = TimeGrid::uniform(1.0, 12);
  const DiscreteOperator op = build_operator(std::make_shared<CcmfbmModel>(1.0, 0.5, 0.75), g);
  for (std::size_t k = 1; k <= 12; ++k) {
    std::vector<double> f(12, 0.0);
    for (std::size_t j = 0; j < k; ++j) f[j] = 1.0;
    const std::vector<double> col = adjoint_apply(op, f);
    for (std::size_t j = 0; j < 12; ++j) EXPECT_NEAR(col[j], op.kernel(k, j), 1e-14);
    EXPECT_EQ(adjoint_invert(op, col).size(), 12u);
    const std::vector<double> back = adjoint_invert(op, col);
    for (std::size_t j = 0; j < 12; ++j) EXPECT_NEAR(back[j], f[j], 1e-12);
  }
  EXPECT_EQ(adjoint_apply(op, std::vector<double>(12, 0.0)), std::vector<double>(12, 0.0));
  EXPECT_EQ(adjoint_invert(op, std::vector<double>(12, 0.0)), std::vector<double>(12, 0.0));
  EXPECT_THROW(adjoint_apply(op, std::vector<double>(5, 0.0)), DomainError);
}

TEST(AdjointInvert, ZeroDiagonalIsReported) {
  DiscreteOperator op = build_operator(std::make_shared<FbmModel>(0.75), TimeGrid::uniform(1.0, 4));
  op.B(2, 2) = 1e-13;
  EXPECT_THROW(adjoint_invert(op, std::vector<double>(4, 1.0)), NumericalError);
}

TEST(DiscretePsi, SimpleCases) {
  const TimeGrid g = TimeGrid::uniform(1.0, 16);
  const DiscreteOperator op = build_operator(std::make_shared<FbmModel>(0.75), g);
  for (double v : discrete_psi(op, 0.5, 0.5)) EXPECT_EQ(v, 0.0);
  const DiscreteOperator bm = build_operator(std::make_shared<FbmModel>(0.5), g);
  for (double v : discrete_psi(bm, 0.75, 0.5)) EXPECT_NEAR(v, 0.0, 1e-15);
  for (double v : discrete_psi(bm, 0.75, 0.5, PsiMethod::closed_form)) EXPECT_EQ(v, 0.0);
  const std::vector<double> psi = discrete_psi(op, 0.75, 0.5);
  for (std::size_t j = 8; j < 16; ++j) EXPECT_EQ(psi[j], 0.0);
  EXPECT_THROW(discrete_psi(op, 0.5, 0.75), DomainError);
  const DiscreteOperator ccm = build_operator(std::make_shared<CcmfbmModel>(1.0, 0.5, 0.75), g);
  EXPECT_THROW(discrete_psi(ccm, 0.75, 0.5, PsiMethod::closed_form), DomainError);
}

TEST(DiscretePsi, ClosedFormAndSolveAgreeAndConverge) {
  // Psi blows up like (u-s)^{1/2-H} below u, so the cell next to u converges
  // slowly in value; compare in L1 over the bracket measure instead.
  double prev = 1e300;
  for (std::size_t n : {64u, 128u, 256u}) {
    const DiscreteOperator op = build_operator(std::make_shared<FbmModel>(0.75), TimeGrid::uniform(1.0, n));
    const std::vector<double> a = discrete_psi(op, 0.75, 0.5, PsiMethod::triangular_solve);
    const std::vector<double> b = discrete_psi(op, 0.75, 0.5, PsiMethod::closed_form);
    double d = 0.0, norm = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      d += std::abs(a[j] - b[j]) * op.dv(static_cast<Eigen::Index>(j));
      norm += std::abs(b[j]) * op.dv(static_cast<Eigen::Index>(j));
    }
    if (n == 256) EXPECT_LE(d / norm, 1e-2);
    EXPECT_LT(d, prev) << "n=" << n;
    prev = d;
  }
}

TEST(RecoverMartingale, SimpleCases) {
  const TimeGrid g = TimeGrid::uniform(1.0, 10);
  const DiscreteOperator bm = build_operator(std::make_shared<FbmModel>(0.5), g);
  const SamplePath G = simulate_gaussian_volterra(bm, 11).G;
  const SamplePath M = recover_martingale(bm, G);
  for (std::size_t i = 0; i < 10; ++i) EXPECT_NEAR(M.values[i], G.values[i], 1e-14);
  const DiscreteOperator op = build_operator(std::make_shared<FbmModel>(0.75), g);
  for (double v : recover_martingale(op, SamplePath(g, std::vector<double>(10, 0.0))).values) EXPECT_EQ(v, 0.0);
}

TEST(RecoverMartingale, UsesOnlyThePast) {
  const TimeGrid g = TimeGrid::uniform(1.0, 20);
  const DiscreteOperator op = build_operator(std::make_shared<FbmModel>(0.75), g);
  SamplePath G = simulate_gaussian_volterra(op, 5).G;
  const SamplePath M1 = recover_martingale(op, G);
  for (std::size_t i = 12; i < 20; ++i) G.values[i] += 3.0;
  const SamplePath M2 = recover_martingale(op, G);
  for (std::size_t i = 0; i < 12; ++i) EXPECT_EQ(M1.values[i], M2.values[i]);
}

TEST(RecoverMartingale, IncrementVarianceMatchesBracket) {
  const TimeGrid g = TimeGrid::uniform(1.0, 16);
  const DiscreteOperator op = build_operator(std::make_shared<FbmModel>(0.75), g);
  const CholeskySampler sampler(*op.model, g);
  std::mt19937_64 rng(99);
  const int paths = 1000;
  std::vector<double> sum_sq(16, 0.0);
  for (int p = 0; p < paths; ++p) {
    const std::vector<double> dM = recover_martingale(op, sampler.sample(rng)).increments();
    for (std::size_t j = 0; j < 16; ++j) sum_sq[j] += dM[j] * dM[j];
  }
  for (std::size_t j = 0; j < 16; ++j) {
    const double var = sum_sq[j] / paths;
    const double dv = op.dv(static_cast<Eigen::Index>(j));
    EXPECT_NEAR(var, dv, 3.0 * std::sqrt(2.0 / paths) * dv + 0.03 * dv) << "cell " << j;
  }
}

TEST(Operators, RoundTripsForAllFamiliesUpTo512) {
  for (std::size_t n : {32u, 512u}) {
    const TimeGrid g = TimeGrid::uniform(1.0, n);
    for (const auto& m : model_families(g)) {
      const DiscreteOperator op = build_operator(m, g);
      const std::vector<double> f = random_vector(n, n);
      EXPECT_LE(sup_rel(adjoint_invert(op, adjoint_apply(op, f)), f), 1e-10) << m->name();
      const SamplePath G = simulate_gaussian_volterra(op, 17).G;
      const SamplePath back = forward_map(op, recover_martingale(op, G).increments());
      EXPECT_LE(sup_rel(back.values, G.values), 1e-10) << m->name();
    }
  }
}

TEST(OperatorCache, ReusesOperators) {
  OperatorCache cache;
  auto m = std::make_shared<const FbmModel>(0.75);
  const TimeGrid g = TimeGrid::uniform(1.0, 8);
  auto a = cache.get(m, g);
  EXPECT_EQ(a.get(), cache.get(m, g).get());
  EXPECT_NE(a.get(), cache.get(m, TimeGrid::uniform(1.0, 9)).get());
}

}  // namespace
}  // namespace gvpj
