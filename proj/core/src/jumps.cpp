#include "gvpj/jumps.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gvpj/errors.hpp"

namespace gvpj {
namespace {

template <class... Fs>
struct overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

JumpSpec::JumpSpec(double lambda, JumpDistribution dist) : lambda_(lambda), dist_(dist) {
  require(std::isfinite(lambda) && lambda >= 0.0, "jumps.lambda must be finite and >= 0");
  std::visit(overloaded{
                 [this](const NormalJumps& d) {
                   require(std::isfinite(d.mean), "jumps normal mean must be finite");
                   require(std::isfinite(d.variance) && d.variance > 0.0, "jumps normal variance must be > 0");
                   mu1_ = d.mean;
                   mu2_ = d.variance + d.mean * d.mean;
                 },
                 [this](const TwoPointJumps& d) {
                   require(std::isfinite(d.x1) && std::isfinite(d.x2), "jumps two_point values must be finite");
                   require(d.p >= 0.0 && d.p <= 1.0, "jumps two_point p must lie in [0,1]");
                   mu1_ = d.p * d.x1 + (1.0 - d.p) * d.x2;
                   mu2_ = d.p * d.x1 * d.x1 + (1.0 - d.p) * d.x2 * d.x2;
                 },
                 [this](const UniformJumps& d) {
                   require(std::isfinite(d.lo) && std::isfinite(d.hi) && d.lo < d.hi,
                           "jumps uniform requires finite lo < hi");
                   mu1_ = 0.5 * (d.lo + d.hi);
                   mu2_ = (d.lo * d.lo + d.lo * d.hi + d.hi * d.hi) / 3.0;
                 },
             },
             dist_);
}

double JumpSpec::sample(std::mt19937_64& rng) const {
  return std::visit(overloaded{
                        [&rng](const NormalJumps& d) {
                          return std::normal_distribution<double>(d.mean, std::sqrt(d.variance))(rng);
                        },
                        [&rng](const TwoPointJumps& d) {
                          return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < d.p ? d.x1 : d.x2;
                        },
                        [&rng](const UniformJumps& d) {
                          return std::uniform_real_distribution<double>(d.lo, d.hi)(rng);
                        },
                    },
                    dist_);
}

double JumpSpec::cdf(double x) const {
  return std::visit(overloaded{
                        [x](const NormalJumps& d) { return normal_cdf((x - d.mean) / std::sqrt(d.variance)); },
                        [x](const TwoPointJumps& d) {
                          return (x >= d.x1 ? d.p : 0.0) + (x >= d.x2 ? 1.0 - d.p : 0.0);
                        },
                        [x](const UniformJumps& d) {
                          return x <= d.lo ? 0.0 : x >= d.hi ? 1.0 : (x - d.lo) / (d.hi - d.lo);
                        },
                    },
                    dist_);
}

std::pair<double, double> JumpSpec::sum_range(int n, double sd_multiplier) const {
  if (n <= 0) return {0.0, 0.0};
  return std::visit(overloaded{
                        [=](const NormalJumps& d) {
                          const double half = sd_multiplier * std::sqrt(n * d.variance);
                          return std::pair{n * d.mean - half, n * d.mean + half};
                        },
                        [=](const TwoPointJumps& d) {
                          return std::pair{n * std::min(d.x1, d.x2), n * std::max(d.x1, d.x2)};
                        },
                        [=](const UniformJumps& d) { return std::pair{n * d.lo, n * d.hi}; },
                    },
                    dist_);
}

std::string JumpSpec::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << "lambda=" << lambda_ << ",";
  std::visit(overloaded{
                 [&os](const NormalJumps& d) { os << "normal(" << d.mean << "," << d.variance << ")"; },
                 [&os](const TwoPointJumps& d) { os << "two_point(" << d.x1 << "," << d.p << "," << d.x2 << ")"; },
                 [&os](const UniformJumps& d) { os << "uniform(" << d.lo << "," << d.hi << ")"; },
             },
             dist_);
  return os.str();
}

}  // namespace gvpj
