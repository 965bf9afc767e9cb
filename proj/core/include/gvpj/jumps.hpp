#pragma once

#include <random>
#include <string>
#include <utility>
#include <variant>

namespace gvpj {

// normal(mean, variance); the second parameter is the variance s^2.
struct NormalJumps {
  double mean = 0.0;
  double variance = 1.0;
};

// x1 with probability p, x2 otherwise.
struct TwoPointJumps {
  double x1 = -1.0;
  double p = 0.5;
  double x2 = 1.0;
};

struct UniformJumps {
  double lo = 0.0;
  double hi = 1.0;
};

using JumpDistribution = std::variant<NormalJumps, TwoPointJumps, UniformJumps>;

// Compound Poisson specification: intensity lambda and the jump law F. The
// moments mu1 = E[xi], mu2 = E[xi^2] are derived from F.
class JumpSpec {
 public:
  JumpSpec() : JumpSpec(0.0, NormalJumps{}) {}
  JumpSpec(double lambda, JumpDistribution dist);

  static JumpSpec none() { return {}; }

  double lambda() const noexcept { return lambda_; }
  const JumpDistribution& dist() const noexcept { return dist_; }
  double mu1() const noexcept { return mu1_; }
  double mu2() const noexcept { return mu2_; }

  double sample(std::mt19937_64& rng) const;
  double cdf(double x) const;

  // Interval holding the sum of n jumps except for mass of order
  // Phi(-sd_multiplier); exact support for bounded families.
  std::pair<double, double> sum_range(int n, double sd_multiplier) const;

  std::string describe() const;

 private:
  double lambda_;
  JumpDistribution dist_;
  double mu1_ = 0.0;
  double mu2_ = 0.0;
};

}  // namespace gvpj
