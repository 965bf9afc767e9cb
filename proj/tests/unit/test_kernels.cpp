#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "gvpj/errors.hpp"
#include "gvpj/kernels.hpp"
#include "gvpj/quadrature.hpp"

namespace gvpj {
namespace {

// Reference values below come from 40-50 digit evaluations (Gamma functions and
// tanh-sinh quadrature in arbitrary precision) and are frozen here.
constexpr double kNormalizer075 = 1.0696446350319903241;
constexpr double kNormalizer025 = 0.64599800374075196761;
constexpr double kKernel075 = 0.93759196369805723330;  // K_H(1, 0.5), H = 0.75
constexpr double kKernel030 = 0.87301411433866805477;  // K_H(1, 0.5), H = 0.3
constexpr double kPsi075 = 0.15047236157353529451;     // Psi_H(0.75, 0.25 | 0.5), H = 0.75
constexpr double kGamma2 = 0.80232761154659490118;     // gamma_2(1, 0.5), H = 0.75
constexpr double kInverse = 0.67381440312442270999;    // inverse series at (1, 0.5), a=1, b=0.5, H=0.75, cut at 1e-12

TEST(FbmCovariance, Examples) {
  EXPECT_DOUBLE_EQ(fbm_covariance(1.0, 2.0, 0.5), 1.0);
  EXPECT_DOUBLE_EQ(fbm_covariance(1.0, 1.0, 0.75), 1.0);
  EXPECT_NEAR(fbm_covariance(1.0, 2.0, 0.75), std::sqrt(2.0), 1e-15);
}

TEST(FbmCovariance, SymmetricBitForBit) {
  for (double H : {0.1, 0.3, 0.5, 0.75, 0.95})
    for (double t : {0.1, 0.37, 1.0, 2.5})
      for (double s : {0.05, 0.37, 0.9, 3.0}) EXPECT_EQ(fbm_covariance(t, s, H), fbm_covariance(s, t, H));
}

TEST(FbmCovariance, DomainErrors) {
  EXPECT_THROW(fbm_covariance(1.0, 1.0, 0.0), DomainError);
  EXPECT_THROW(fbm_covariance(1.0, 1.0, 1.0), DomainError);
  EXPECT_THROW(fbm_covariance(-1.0, 1.0, 0.5), DomainError);
}

TEST(FbmNormalizer, FrozenValues) {
  EXPECT_NEAR(fbm_normalizer(0.5), 1.0, 1e-15);
  EXPECT_NEAR(fbm_normalizer(0.75), kNormalizer075, 1e-14);
  EXPECT_NEAR(fbm_normalizer(0.25), kNormalizer025, 1e-14);
  EXPECT_THROW(fbm_normalizer(1.2), DomainError);
}

TEST(FbmKernel, BrownianCaseIsIndicator) {
  EXPECT_EQ(fbm_kernel(1.0, 0.3, 0.5, 1e-12).value, 1.0);
  EXPECT_EQ(fbm_kernel(0.3, 1.0, 0.75, 1e-12).value, 0.0);
  EXPECT_EQ(fbm_kernel(0.5, 0.5, 0.3, 1e-12).value, 0.0);
}

TEST(FbmKernel, MatchesHighPrecisionReference) {
  const KernelEval k = fbm_kernel(1.0, 0.5, 0.75, 1e-13);
  EXPECT_NEAR(k.value, kKernel075, 1e-13);
  EXPECT_GE(k.error_estimate, 0.0);
  EXPECT_NEAR(fbm_kernel(1.0, 0.5, 0.3, 1e-13).value, kKernel030, 1e-13);
}

TEST(FbmKernel, QuadratureAgreesWithHypergeometricForm) {
  for (double H : {0.1, 0.3, 0.6, 0.75, 0.9}) {
    for (double x : {1e-12, 1e-6, 0.01, 0.3, 0.5, 0.8, 0.99, 1.0 - 1e-9}) {
      const double q = fbm_kernel(2.0, 2.0 * x, H, 1e-13).value;
      const double h = fbm_kernel_hypergeometric(2.0, 2.0 * x, H);
      EXPECT_NEAR(q, h, 1e-11 * std::max(1.0, std::abs(h))) << "H=" << H << " x=" << x;
    }
  }
}

TEST(FbmKernel, FactorizesCovarianceAtOnePair) {
  // int_0^{0.5} K(1,u) K(0.5,u) du = R(1, 0.5), inner kernels by quadrature.
  const double H = 0.75;
  SingularIntegrand f;
  f.lo = 0.0;
  f.hi = 0.5;
  f.alpha = 1.0 - 2.0 * H;
  f.beta = H - 0.5;
  f.g_dist = [H](double u, double d_lo, double d_hi) {
    // Near u = 0.5 the second kernel is taken from the exact gap.
    const double k_near = d_hi < 0.25 ? fbm_kernel_gap(0.5, d_hi, H) : fbm_kernel(0.5, u, H, 1e-13).value;
    return fbm_kernel(1.0, u, H, 1e-13).value * k_near * std::pow(d_lo, 2.0 * H - 1.0) / std::pow(d_hi, H - 0.5);
  };
  EXPECT_NEAR(integrate_singular(f, 1e-11).value, fbm_covariance(1.0, 0.5, H), 1e-9);
}

TEST(FbmPsi, DegenerateCases) {
  EXPECT_EQ(fbm_psi(0.75, 0.25, 0.5, 0.5, 1e-12).value, 0.0);
  EXPECT_EQ(fbm_psi(0.5, 0.25, 0.5, 0.75, 1e-12).value, 0.0);
  EXPECT_THROW(fbm_psi(0.75, 0.6, 0.5, 0.75, 1e-12), DomainError);
  EXPECT_THROW(fbm_psi(0.4, 0.25, 0.5, 0.75, 1e-12), DomainError);
}

TEST(FbmPsi, MatchesHighPrecisionReference) {
  EXPECT_NEAR(fbm_psi(0.75, 0.25, 0.5, 0.75, 1e-13).value, kPsi075, 1e-12);
}

TEST(CcmKernel, Examples) {
  EXPECT_EQ(ccm_kernel(1.0, 0.5, 2.0, 0.0, 0.75, 1e-12).value, 2.0);
  EXPECT_EQ(ccm_kernel(0.5, 1.0, 1.0, 0.0, 0.75, 1e-12).value, 0.0);
  EXPECT_NEAR(ccm_kernel(1.0, 0.5, 1.0, 1.0, 0.75, 1e-13).value, 1.0 + kKernel075, 1e-12);
  EXPECT_THROW(ccm_kernel(1.0, 0.5, 0.0, 1.0, 0.75, 1e-12), DomainError);
  EXPECT_THROW(ccm_kernel(1.0, 0.5, 1.0, 1.0, 0.4, 1e-12), DomainError);
}

TEST(CcmGamma, FirstTermIsTheFbmKernel) {
  // For H > 1/2 the k = 1 integral is the alternative representation of K_H.
  for (double s : {0.1, 0.5, 0.9}) EXPECT_NEAR(ccm_gamma(1, 1.0, s, 0.75, 1e-14), fbm_kernel(1.0, s, 0.75, 1e-14).value, 1e-12);
}

TEST(CcmGamma, SecondTermFrozenAndVanishesAtDiagonal) {
  EXPECT_NEAR(ccm_gamma(2, 1.0, 0.5, 0.75, 1e-14), kGamma2, 1e-13);
  EXPECT_LT(std::abs(ccm_gamma(2, 1.0, 1.0 - 1e-10, 0.75, 1e-14)), 1e-4);
  EXPECT_EQ(ccm_gamma(2, 1.0, 1.0, 0.75, 1e-14), 0.0);
  // Refinement oracle: a tenfold tighter tolerance moves the value by less than the looser one.
  EXPECT_NEAR(ccm_gamma(3, 1.0, 0.3, 0.75, 1e-9), ccm_gamma(3, 1.0, 0.3, 0.75, 1e-12), 1e-9);
}

TEST(CcmInverseKernel, FrozenSeriesValue) {
  const KernelEval k = ccm_inverse_kernel(1.0, 0.5, 1.0, 0.5, 0.75, 1e-12);
  EXPECT_NEAR(k.value, kInverse, 1e-12);
  EXPECT_EQ(k.terms_used, 24);
}

TEST(CcmInverseKernel, BrownianLimit) {
  EXPECT_EQ(ccm_inverse_kernel(1.0, 0.5, 2.0, 0.0, 0.75, 1e-12).value, 0.5);
  EXPECT_EQ(ccm_inverse_kernel(0.5, 1.0, 2.0, 0.5, 0.75, 1e-12).value, 0.0);
}

TEST(CcmInverseKernel, DivergesWhenTermsDoNotDecay) {
  EXPECT_THROW(ccm_inverse_kernel(1.0, 0.5, 1.0, 200.0, 0.75, 1e-12), SeriesDivergenceError);
}

TEST(CcmAdjointApply, SimpleCases) {
  const TimeGrid g = TimeGrid::uniform(1.0, 8);
  std::vector<double> f{1, -2, 3, 0.5, 4, -1, 2, 0};
  std::vector<double> af = ccm_adjoint_apply(f, g, 1.5, 0.0, 0.75, 1e-10);
  for (std::size_t j = 0; j < f.size(); ++j) EXPECT_DOUBLE_EQ(af[j], 1.5 * f[j]);
  for (double v : ccm_adjoint_apply(std::vector<double>(8, 0.0), g, 1.0, 0.5, 0.75, 1e-10)) EXPECT_EQ(v, 0.0);
}

TEST(CcmAdjointApply, IndicatorGivesKernelColumn) {
  const TimeGrid g = TimeGrid::uniform(1.0, 16);
  const auto& t = g.times();
  const std::size_t k = 12;  // samples at t_0..t_11 equal 1: the indicator of [0, t_12)
  std::vector<double> f(g.size(), 0.0);
  for (std::size_t j = 0; j < k; ++j) f[j] = 1.0;
  const std::vector<double> col = ccm_adjoint_apply(f, g, 1.0, 0.5, 0.75, 1e-11);
  for (std::size_t j = 0; j < k; ++j)
    EXPECT_NEAR(col[j], ccm_kernel(t[k], t[j], 1.0, 0.5, 0.75, 1e-12).value, 1e-8) << "j=" << j;
  for (std::size_t j = k; j < g.size(); ++j) EXPECT_NEAR(col[j], 0.0, 1e-12);
}

TEST(Kernels, BrownianDegeneracy) {
  EXPECT_NEAR(fbm_normalizer(0.5), 1.0, 1e-12);
  for (double s : {0.01, 0.5, 0.99}) {
    EXPECT_NEAR(fbm_kernel(1.0, s, 0.5, 1e-12).value, 1.0, 1e-12);
    EXPECT_NEAR(fbm_psi(1.0, s * 0.5, 0.5, 0.5, 1e-12).value, 0.0, 1e-12);
    EXPECT_NEAR(fbm_covariance(1.0, s, 0.5), s, 1e-12);
  }
}

TEST(Kernels, VolterraPropertyIsExact) {
  for (double H : {0.3, 0.75}) {
    EXPECT_EQ(fbm_kernel(0.4, 0.4, H, 1e-10).value, 0.0);
    EXPECT_EQ(fbm_kernel(0.4, 0.9, H, 1e-10).value, 0.0);
    EXPECT_EQ(fbm_kernel_hypergeometric(0.4, 0.9, H), 0.0);
  }
  EXPECT_EQ(ccm_kernel(0.4, 0.9, 1.0, 0.5, 0.75, 1e-10).value, 0.0);
  EXPECT_EQ(ccm_inverse_kernel(0.4, 0.9, 1.0, 0.5, 0.75, 1e-10).value, 0.0);
}

}  // namespace
}  // namespace gvpj
