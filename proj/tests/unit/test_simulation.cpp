#include <gtest/gtest.h>

#include <cmath>

#include "gvpj/errors.hpp"
#include "gvpj/kernels.hpp"
#include "gvpj/simulation.hpp"

namespace gvpj {
namespace {

struct Moments {
  double mean = 0.0, var = 0.0, se_mean = 0.0, se_var = 0.0;
};

Moments moments(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  Moments m;
  for (double v : x) m.mean += v;
  m.mean /= n;
  double m2 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double d = (v - m.mean) * (v - m.mean);
    m2 += d;
    m4 += d * d;
  }
  m2 /= n;
  m4 /= n;
  m.var = m2 * n / (n - 1.0);
  m.se_mean = std::sqrt(m.var / n);
  m.se_var = std::sqrt((m4 - m2 * m2) / n);
  return m;
}

TEST(Streams, SeedsAreDistinctAndDeterministic) {
  const StreamSeeds a = StreamSeeds::derive(42), b = StreamSeeds::derive(42), c = StreamSeeds::derive(43);
  EXPECT_EQ(a.gaussian, b.gaussian);
  EXPECT_EQ(a.jumps, b.jumps);
  EXPECT_NE(a.gaussian, a.jumps);
  EXPECT_NE(a.gaussian, c.gaussian);
  EXPECT_NE(chunk_seed(42, 0), chunk_seed(42, 1));
}

TEST(Cholesky, JitterRescuesRoundingOnly) {
  Eigen::MatrixXd c(2, 2);
  c << 1.0, 1.0, 1.0, 1.0;  // rank one: fails plain LLT only through rounding
  EXPECT_NO_THROW(cholesky_with_jitter(c));
  c << 1.0, 2.0, 2.0, 1.0;  // indefinite
  EXPECT_THROW(cholesky_with_jitter(c), NumericalError);
}

TEST(SimulateCholesky, SinglePointVariance) {
  const FbmModel m(0.75);
  const TimeGrid g({0.6});
  const CholeskySampler s(m, g);
  std::mt19937_64 rng(7);
  std::vector<double> x(10000);
  for (double& v : x) v = s.sample(rng).values[0];
  const Moments mo = moments(x);
  EXPECT_NEAR(mo.var, std::pow(0.6, 1.5), 3.0 * mo.se_var);
}

TEST(SimulateCholesky, FixedSeedIsReproducible) {
  const FbmModel m(0.75);
  const TimeGrid g = TimeGrid::uniform(1.0, 32);
  EXPECT_EQ(simulate_gaussian_cholesky(m, g, 5).values, simulate_gaussian_cholesky(m, g, 5).values);
  EXPECT_NE(simulate_gaussian_cholesky(m, g, 5).values, simulate_gaussian_cholesky(m, g, 6).values);
}

TEST(SimulateCholesky, BrownianIncrementsIndependent) {
  const FbmModel m(0.5);
  const TimeGrid g = TimeGrid::uniform(1.0, 4);
  const CholeskySampler s(m, g);
  std::mt19937_64 rng(8);
  std::vector<double> d0(10000), d1(10000), prod(10000);
  for (std::size_t i = 0; i < d0.size(); ++i) {
    const std::vector<double> dx = s.sample(rng).increments();
    d0[i] = dx[0];
    d1[i] = dx[3];
    prod[i] = dx[0] * dx[3];
  }
  const Moments m0 = moments(d0), m1 = moments(d1), mp = moments(prod);
  EXPECT_NEAR(m0.var, 0.25, 3.0 * m0.se_var);
  EXPECT_NEAR(m1.var, 0.25, 3.0 * m1.se_var);
  EXPECT_NEAR(mp.mean, 0.0, 3.0 * mp.se_mean);
}

TEST(SimulateVolterra, BrownianPathIsItsIncrementSum) {
  const DiscreteOperator op = build_operator(std::make_shared<FbmModel>(0.5), TimeGrid::uniform(1.0, 10));
  const VolterraSample s = simulate_gaussian_volterra(op, 3);
  double acc = 0.0;
  for (std::size_t i = 0; i < 10; ++i) {
    acc += s.M_increments[i];
    EXPECT_NEAR(s.G.values[i], acc, 1e-15);
  }
  EXPECT_EQ(forward_map(op, std::vector<double>(10, 0.0)).values, std::vector<double>(10, 0.0));
}

TEST(SimulateVolterra, SampleCovarianceMatchesModel) {
  const TimeGrid g = TimeGrid::uniform(1.0, 16);
  const DiscreteOperator op = build_operator(std::make_shared<FbmModel>(0.75), g);
  std::mt19937_64 rng(21);
  const std::pair<std::size_t, std::size_t> pairs[] = {{3, 3}, {7, 15}, {11, 12}, {15, 15}};
  std::vector<std::vector<double>> prods(4, std::vector<double>(10000));
  for (std::size_t p = 0; p < 10000; ++p) {
    const SamplePath G = simulate_gaussian_volterra(op, rng).G;
    for (std::size_t k = 0; k < 4; ++k) prods[k][p] = G.values[pairs[k].first] * G.values[pairs[k].second];
  }
  for (std::size_t k = 0; k < 4; ++k) {
    const Moments mo = moments(prods[k]);
    const double R = fbm_covariance(g.times()[pairs[k].first], g.times()[pairs[k].second], 0.75);
    EXPECT_NEAR(mo.mean, R, 3.0 * mo.se_mean) << pairs[k].first << "," << pairs[k].second;
  }
}

TEST(CompoundPoisson, NoIntensityNoJumps) {
  const JumpRecord r = simulate_compound_poisson(JumpSpec(0.0, NormalJumps{}), 10.0, 1);
  EXPECT_TRUE(r.times.empty());
}

TEST(CompoundPoisson, CountAndMomentsMatchPoisson) {
  const JumpSpec spec(5.0, NormalJumps{0.1, 0.04});
  std::mt19937_64 rng(12);
  const int runs = 100000;
  std::vector<double> counts(runs), sums(runs);
  for (int i = 0; i < runs; ++i) {
    const JumpRecord r = simulate_compound_poisson(spec, 0.0, 1.0, rng);
    counts[i] = static_cast<double>(r.times.size());
    double s = 0.0;
    for (double x : r.sizes) s += x;
    sums[i] = s;
    for (double t : r.times) ASSERT_TRUE(t > 0.0 && t <= 1.0);
  }
  const Moments c = moments(counts), s = moments(sums);
  EXPECT_NEAR(c.mean, 5.0, 3.0 * c.se_mean);
  EXPECT_NEAR(s.mean, 5.0 * spec.mu1(), 3.0 * s.se_mean);
  EXPECT_NEAR(s.var, 5.0 * spec.mu2(), 3.0 * s.se_var);
}

TEST(SimulateMixed, ConstructionIdentity) {
  const TimeGrid g = TimeGrid::uniform(1.0, 64);
  const DiscreteOperator op = build_operator(std::make_shared<FbmModel>(0.75), g);
  const JumpSpec spec(5.0, TwoPointJumps{-0.25, 0.4, 0.4});
  const MixedPath p = simulate_mixed(op, spec, 77);
  for (std::size_t i = 0; i < 64; ++i) EXPECT_EQ(p.X.values[i], p.G.values[i] + p.J.values[i]);
  // J counts exactly the jumps up to each grid time.
  for (std::size_t i = 0; i < 64; ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < p.jump_times.size(); ++k)
      if (p.jump_times[k] <= g.times()[i]) acc += p.jump_sizes[k];
    EXPECT_DOUBLE_EQ(p.J.values[i], acc);
  }
}

TEST(SimulateMixed, DegenerateParts) {
  const TimeGrid g = TimeGrid::uniform(1.0, 32);
  const DiscreteOperator op = build_operator(std::make_shared<FbmModel>(0.75), g);
  const MixedPath noj = simulate_mixed(op, JumpSpec::none(), 4);
  EXPECT_EQ(noj.X.values, noj.G.values);
  MixedOptions o;
  o.gaussian_scale = 0.0;
  const MixedPath nog = simulate_mixed(op, JumpSpec(5.0, NormalJumps{0.1, 0.04}), 4, o);
  EXPECT_EQ(nog.X.values, nog.J.values);
}

TEST(SimulateMixed, StreamsAreIndependent) {
  const TimeGrid g = TimeGrid::uniform(1.0, 32);
  auto model = std::make_shared<FbmModel>(0.75);
  const JumpSpec spec(5.0, NormalJumps{0.1, 0.04});
  const MixedPath a = simulate_mixed(model, spec, g, 100);
  const MixedPath b = simulate_mixed(model, spec, g, 100);
  EXPECT_EQ(a.X.values, b.X.values);
  EXPECT_EQ(a.jump_times, b.jump_times);
  // The Gaussian part does not depend on the jump law, nor the jumps on the model.
  const MixedPath c = simulate_mixed(model, JumpSpec(9.0, UniformJumps{0.0, 1.0}), g, 100);
  EXPECT_EQ(a.G.values, c.G.values);
  const MixedPath d = simulate_mixed(std::make_shared<FbmModel>(0.3), spec, g, 100);
  EXPECT_EQ(a.jump_times, d.jump_times);
  EXPECT_EQ(a.J.values, d.J.values);
}

TEST(DetectJumps, SimpleCases) {
  const TimeGrid g = TimeGrid::uniform(1.0, 10);
  EXPECT_TRUE(detect_jumps(SamplePath(g, std::vector<double>(10, 0.0)), 0.1).times.empty());
  std::vector<double> v(10, 0.0);
  for (std::size_t i = 4; i < 10; ++i) v[i] = 1.0;
  const JumpRecord r = detect_jumps(SamplePath(g, v), 0.1);
  ASSERT_EQ(r.times.size(), 1u);
  EXPECT_DOUBLE_EQ(r.times[0], g.times()[4]);
  EXPECT_EQ(r.sizes[0], 1.0);
  EXPECT_THROW(detect_jumps(SamplePath(g, v), 0.0), DomainError);
}

TEST(DetectJumps, RecallForLargeJumps) {
  const TimeGrid g = TimeGrid::uniform(1.0, 256);
  const DiscreteOperator op = build_operator(std::make_shared<FbmModel>(0.75), g);
  const double sd = std::pow(1.0 / 256.0, 0.75);  // sd of a grid increment of fBm
  const JumpSpec spec(5.0, UniformJumps{10.0 * sd, 20.0 * sd});
  int found = 0, total = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const MixedPath p = simulate_mixed(op, spec, seed);
    const JumpRecord r = detect_jumps(p.X, 5.0 * sd);
    for (double t : p.jump_times) {
      ++total;
      for (double s : r.times) {
        if (s >= t && s - t < g.cell_width(0) * (1.0 + 1e-9)) {
          ++found;
          break;
        }
      }
    }
  }
  ASSERT_GT(total, 0);
  EXPECT_GE(found / static_cast<double>(total), 0.9);
}

}  // namespace
}  // namespace gvpj
