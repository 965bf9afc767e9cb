#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include "gvpj/discrete_operators.hpp"
#include "gvpj/jumps.hpp"
#include "gvpj/models.hpp"
#include "gvpj/time_grid.hpp"

namespace gvpj {

// SplitMix64 step; used to derive independent generator seeds from one user seed.
std::uint64_t splitmix64(std::uint64_t& state);

// Seeds for the Gaussian and jump streams of one run. They come from
// different SplitMix64 outputs, so changing one never disturbs the other.
struct StreamSeeds {
  std::uint64_t gaussian;
  std::uint64_t jumps;
  static StreamSeeds derive(std::uint64_t seed);
};

// Seed for the chunk-th block of a parallel Monte Carlo run.
std::uint64_t chunk_seed(std::uint64_t seed, std::uint64_t chunk);

inline constexpr double kCholeskyJitter = 1e-12;

// Lower Cholesky factor of a covariance matrix. On failure adds
// kCholeskyJitter * trace / n to the diagonal once and retries.
Eigen::MatrixXd cholesky_with_jitter(const Eigen::MatrixXd& cov);

Eigen::MatrixXd covariance_matrix(const VolterraModel& model, const TimeGrid& grid);

// Exact sampler from the covariance matrix; the factor is computed once.
class CholeskySampler {
 public:
  CholeskySampler(const VolterraModel& model, const TimeGrid& grid);
  SamplePath sample(std::mt19937_64& rng) const;
  const Eigen::MatrixXd& factor() const noexcept { return L_; }

 private:
  TimeGrid grid_;
  Eigen::MatrixXd L_;
};

SamplePath simulate_gaussian_cholesky(const VolterraModel& model, const TimeGrid& grid, std::uint64_t seed);

struct VolterraSample {
  SamplePath G;
  std::vector<double> M_increments;
};

// Draws dM_j ~ N(0, dv_j) and applies the forward map.
VolterraSample simulate_gaussian_volterra(const DiscreteOperator& op, std::mt19937_64& rng);
VolterraSample simulate_gaussian_volterra(const DiscreteOperator& op, std::uint64_t seed);

struct JumpRecord {
  std::vector<double> times;
  std::vector<double> sizes;
};

// Jumps on (start, end] with exponential inter-arrival times.
JumpRecord simulate_compound_poisson(const JumpSpec& spec, double start, double end, std::mt19937_64& rng);
JumpRecord simulate_compound_poisson(const JumpSpec& spec, double horizon, std::uint64_t seed);

// Right-continuous running sum of the jumps sampled at the grid times.
SamplePath jump_path(const JumpRecord& jumps, const TimeGrid& grid);

struct MixedPath {
  SamplePath G;
  SamplePath J;
  SamplePath X;
  std::vector<double> jump_times;
  std::vector<double> jump_sizes;
  std::vector<double> M_increments;
};

struct MixedOptions {
  // Multiplies the Gaussian part; 0 switches it off.
  double gaussian_scale = 1.0;
};

MixedPath simulate_mixed(const DiscreteOperator& op, const JumpSpec& spec, std::uint64_t seed,
                         const MixedOptions& opts = {});
MixedPath simulate_mixed(std::shared_ptr<const VolterraModel> model, const JumpSpec& spec, const TimeGrid& grid,
                         std::uint64_t seed, const MixedOptions& opts = {});

// Heuristic: every grid increment with |dX| > threshold is reported as one jump
// at the right end of its cell. Not used by the predictor.
JumpRecord detect_jumps(const SamplePath& X, double threshold);

}  // namespace gvpj
