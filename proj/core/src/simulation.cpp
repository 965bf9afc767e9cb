#include "gvpj/simulation.hpp"

#include <algorithm>
#include <cmath>

#include "gvpj/errors.hpp"

namespace gvpj {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

StreamSeeds StreamSeeds::derive(std::uint64_t seed) {
  std::uint64_t s = seed;
  const std::uint64_t g = splitmix64(s);
  const std::uint64_t j = splitmix64(s);
  return {g, j};
}

std::uint64_t chunk_seed(std::uint64_t seed, std::uint64_t chunk) {
  std::uint64_t s = seed ^ (0xD1B54A32D192ED03ULL * (chunk + 1));
  return splitmix64(s);
}

Eigen::MatrixXd cholesky_with_jitter(const Eigen::MatrixXd& cov) {
  require(cov.rows() == cov.cols(), "cholesky: matrix must be square");
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  Eigen::MatrixXd jittered = cov;
  const double n = static_cast<double>(cov.rows());
  jittered.diagonal().array() += kCholeskyJitter * cov.trace() / n;
  llt.compute(jittered);
  if (llt.info() != Eigen::Success)
    throw NumericalError("cholesky: covariance matrix is not positive semi-definite within jitter");
  return llt.matrixL();
}

Eigen::MatrixXd covariance_matrix(const VolterraModel& model, const TimeGrid& grid) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  Eigen::MatrixXd cov(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      cov(i, j) = model.covariance(grid.times()[i], grid.times()[j]);
      cov(j, i) = cov(i, j);
    }
  }
  return cov;
}

CholeskySampler::CholeskySampler(const VolterraModel& model, const TimeGrid& grid)
    : grid_(grid), L_(cholesky_with_jitter(covariance_matrix(model, grid))) {}

SamplePath CholeskySampler::sample(std::mt19937_64& rng) const {
  std::normal_distribution<double> z;
  Eigen::VectorXd e(L_.rows());
  for (Eigen::Index i = 0; i < e.size(); ++i) e(i) = z(rng);
  const Eigen::VectorXd g = L_.triangularView<Eigen::Lower>() * e;
  return SamplePath(grid_, {g.data(), g.data() + g.size()});
}

SamplePath simulate_gaussian_cholesky(const VolterraModel& model, const TimeGrid& grid, std::uint64_t seed) {
  std::mt19937_64 rng(StreamSeeds::derive(seed).gaussian);
  return CholeskySampler(model, grid).sample(rng);
}

VolterraSample simulate_gaussian_volterra(const DiscreteOperator& op, std::mt19937_64& rng) {
  std::normal_distribution<double> z;
  std::vector<double> dM(op.size());
  for (std::size_t j = 0; j < dM.size(); ++j) dM[j] = std::sqrt(op.dv(static_cast<Eigen::Index>(j))) * z(rng);
  SamplePath G = forward_map(op, dM);
  return {std::move(G), std::move(dM)};
}

VolterraSample simulate_gaussian_volterra(const DiscreteOperator& op, std::uint64_t seed) {
  std::mt19937_64 rng(StreamSeeds::derive(seed).gaussian);
  return simulate_gaussian_volterra(op, rng);
}

JumpRecord simulate_compound_poisson(const JumpSpec& spec, double start, double end, std::mt19937_64& rng) {
  require(end >= start, "simulate_compound_poisson: empty time range");
  JumpRecord out;
  if (spec.lambda() == 0.0) return out;
  std::exponential_distribution<double> gap(spec.lambda());
  for (double t = start + gap(rng); t <= end; t += gap(rng)) {
    out.times.push_back(t);
    out.sizes.push_back(spec.sample(rng));
  }
  return out;
}

JumpRecord simulate_compound_poisson(const JumpSpec& spec, double horizon, std::uint64_t seed) {
  require(horizon > 0.0, "simulate_compound_poisson: horizon must be positive");
  std::mt19937_64 rng(StreamSeeds::derive(seed).jumps);
  return simulate_compound_poisson(spec, 0.0, horizon, rng);
}

SamplePath jump_path(const JumpRecord& jumps, const TimeGrid& grid) {
  std::vector<double> values(grid.size(), 0.0);
  std::size_t next = 0;
  double running = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    while (next < jumps.times.size() && jumps.times[next] <= grid.times()[i]) running += jumps.sizes[next++];
    values[i] = running;
  }
  return SamplePath(grid, std::move(values));
}

MixedPath simulate_mixed(const DiscreteOperator& op, const JumpSpec& spec, std::uint64_t seed,
                         const MixedOptions& opts) {
  const StreamSeeds seeds = StreamSeeds::derive(seed);
  std::mt19937_64 g_rng(seeds.gaussian);
  std::mt19937_64 j_rng(seeds.jumps);

  VolterraSample gs = simulate_gaussian_volterra(op, g_rng);
  if (opts.gaussian_scale != 1.0) {
    for (double& v : gs.G.values) v *= opts.gaussian_scale;
    for (double& v : gs.M_increments) v *= opts.gaussian_scale;
  }
  JumpRecord jr = simulate_compound_poisson(spec, 0.0, op.grid.horizon(), j_rng);

  MixedPath out;
  out.J = jump_path(jr, op.grid);
  out.G = std::move(gs.G);
  out.X = out.G;
  for (std::size_t i = 0; i < out.X.values.size(); ++i) out.X.values[i] = out.G.values[i] + out.J.values[i];
  out.jump_times = std::move(jr.times);
  out.jump_sizes = std::move(jr.sizes);
  out.M_increments = std::move(gs.M_increments);
  return out;
}

MixedPath simulate_mixed(std::shared_ptr<const VolterraModel> model, const JumpSpec& spec, const TimeGrid& grid,
                         std::uint64_t seed, const MixedOptions& opts) {
  return simulate_mixed(build_operator(std::move(model), grid), spec, seed, opts);
}

JumpRecord detect_jumps(const SamplePath& X, double threshold) {
  require(threshold > 0.0, "detect_jumps: threshold must be positive");
  JumpRecord out;
  const std::vector<double> dx = X.increments();
  for (std::size_t j = 0; j < dx.size(); ++j) {
    if (std::abs(dx[j]) > threshold) {
      out.times.push_back(X.grid.cell_hi(j));
      out.sizes.push_back(dx[j]);
    }
  }
  return out;
}

}  // namespace gvpj
