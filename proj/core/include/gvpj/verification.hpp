#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "gvpj/discrete_operators.hpp"
#include "gvpj/jumps.hpp"
#include "gvpj/simulation.hpp"

namespace gvpj {

struct OracleResult {
  double mean = 0.0;
  double variance = 0.0;
  std::vector<double> weights;  // regression coefficients on the observed values
};

using CovarianceFn = std::function<double(double, double)>;

// Textbook Gaussian conditioning of a centered process on its values at
// obs_times. Uses only R; the SPD solve follows the simulation jitter policy.
OracleResult conditioning_oracle(const CovarianceFn& R, std::span<const double> obs_times,
                                 std::span<const double> obs_values, double t);

// Monte Carlo draws of X_t given the observation up to u: the observed driving
// increments on [0,u) are kept, fresh ones are drawn on [u,t) together with
// fresh jumps on (u,t]. Paths are generated in fixed-size chunks with their own
// seeds, so the output does not depend on `threads`.
std::vector<double> mc_conditional_sample(const DiscreteOperator& op, const JumpSpec& spec,
                                          const MixedPath& observed, double u, double t, std::size_t n_paths,
                                          std::uint64_t seed, unsigned threads = 1);

inline constexpr std::size_t kMonteCarloChunk = 4096;

// Kolmogorov-Smirnov distance between the empirical law of `samples` and a
// CDF. With atoms in the reference law pass its left limit as cdf_left.
double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf,
                   const std::function<double(double)>& cdf_left = {});

struct CheckResult {
  std::string id;
  double formula = 0.0;
  double oracle = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct VerificationReport {
  std::vector<CheckResult> checks;
  bool all_passed() const;
  std::string to_json() const;
};

struct SuiteOptions {
  // Scales every tolerance; values below 1 tighten the suite.
  double tolerance_scale = 1.0;
  std::size_t mc_paths = 100000;
  std::uint64_t seed = 20240601;
  unsigned threads = 1;
};

VerificationReport run_verification_suite(const SuiteOptions& opts = {});

}  // namespace gvpj
