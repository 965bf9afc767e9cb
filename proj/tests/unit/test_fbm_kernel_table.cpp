#include <gtest/gtest.h>

#include <cmath>

#include "gvpj/fbm_kernel_table.hpp"
#include "gvpj/kernels.hpp"
#include "gvpj/quadrature.hpp"

namespace gvpj {
namespace {

class TableByHurst : public ::testing::TestWithParam<double> {};

TEST_P(TableByHurst, SquareIntegralIsVariance) {
  const double H = GetParam();
  const auto table = FbmKernelTable::get(H);
  for (double t : {0.25, 1.0, 3.0}) EXPECT_NEAR(table->integral_sq(t, 0.0, t), std::pow(t, 2.0 * H), 1e-13);
}

TEST_P(TableByHurst, KernelMatchesHypergeometricForm) {
  const double H = GetParam();
  const auto table = FbmKernelTable::get(H);
  for (double x : {1e-14, 1e-8, 0.01, 0.2, 0.5, 0.77, 0.999, 1.0 - 1e-10}) {
    const double ref = fbm_kernel_hypergeometric(1.5, 1.5 * x, H);
    EXPECT_NEAR(table->kernel(1.5, 1.5 * x), ref, 1e-12 * std::max(1.0, std::abs(ref))) << "x=" << x;
  }
}

TEST_P(TableByHurst, CellIntegralsMatchQuadrature) {
  const double H = GetParam();
  const auto table = FbmKernelTable::get(H);
  const double t = 0.8;
  for (auto [lo, hi] : {std::pair{0.0, 0.1}, std::pair{0.3, 0.31}, std::pair{0.7, 0.8}, std::pair{0.79, 0.8}}) {
    // Endpoint behavior s^{1/2-H} at the origin and (t-s)^{H-1/2} at t is declared explicitly.
    SingularIntegrand f;
    f.lo = lo;
    f.hi = hi;
    f.alpha = lo == 0.0 ? 0.5 - H : 0.0;
    f.beta = hi == t ? H - 0.5 : 0.0;
    f.g_dist = [&](double s, double d_lo, double d_hi) {
      double k = hi == t ? fbm_kernel_gap(t, d_hi, H) : fbm_kernel_hypergeometric(t, s, H);
      if (lo == 0.0) k /= std::pow(d_lo, 0.5 - H);
      if (hi == t) k /= std::pow(d_hi, H - 0.5);
      return k;
    };
    const double ref = integrate_singular(f, 1e-14).value;
    EXPECT_NEAR(table->integral(t, lo, hi), ref, 1e-12 * std::max(1.0, std::abs(ref))) << lo << "," << hi;
  }
}

TEST_P(TableByHurst, IntegralsAreAdditive) {
  const auto table = FbmKernelTable::get(GetParam());
  const double a = table->integral_sq(2.0, 0.3, 1.1) + table->integral_sq(2.0, 1.1, 1.9);
  EXPECT_NEAR(a, table->integral_sq(2.0, 0.3, 1.9), 1e-14);
  EXPECT_EQ(table->integral(2.0, 2.5, 3.0), 0.0);
}

INSTANTIATE_TEST_SUITE_P(Hurst, TableByHurst, ::testing::Values(0.1, 0.3, 0.5, 0.6, 0.75, 0.9));

TEST(FbmKernelTable, SharedInstancePerHurst) {
  EXPECT_EQ(FbmKernelTable::get(0.7).get(), FbmKernelTable::get(0.7).get());
  EXPECT_NE(FbmKernelTable::get(0.7).get(), FbmKernelTable::get(0.71).get());
}

}  // namespace
}  // namespace gvpj
