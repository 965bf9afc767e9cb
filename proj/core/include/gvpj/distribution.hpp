#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace gvpj {

// Uniform value lattice: cell i is centered at x0 + i h with width h.
struct ValueGrid {
  double x0 = 0.0;
  double h = 1.0;
  std::size_t size = 0;

  double center(std::size_t i) const { return x0 + static_cast<double>(i) * h; }
  double lo() const { return x0 - 0.5 * h; }
  double hi() const { return lo() + static_cast<double>(size) * h; }

  // Lattice through `anchor` with spacing h that covers [lo, hi].
  static ValueGrid covering(double lo, double hi, double h, double anchor);
};

struct Atom {
  double x;
  double mass;
};

// A law made of cell masses (spread uniformly over their cells) plus point
// atoms kept at their exact locations.
class DiscreteDistribution {
 public:
  DiscreteDistribution() = default;
  DiscreteDistribution(ValueGrid grid, std::vector<double> cell_mass, std::vector<Atom> atoms = {});

  const ValueGrid& grid() const noexcept { return grid_; }
  const std::vector<double>& cell_mass() const noexcept { return mass_; }
  const std::vector<Atom>& atoms() const noexcept { return atoms_; }

  double total_mass() const noexcept { return total_; }
  double mean() const;
  double variance() const;
  double cdf(double x) const;       // P(X <= x)
  double cdf_left(double x) const;  // P(X < x)

 private:
  double cell_part(double x) const;
  double atom_part(double x, bool inclusive) const;

  ValueGrid grid_;
  std::vector<double> mass_;
  std::vector<double> cum_;  // cum_[i] = mass of cells < i
  std::vector<Atom> atoms_;  // sorted by location, merged
  std::vector<double> atom_cum_;
  double total_ = 0.0;
};

// Splits `mass` at x between the two nearest cell centers, preserving mass and
// first moment. Mass outside the lattice is dropped and returned.
double deposit(std::vector<double>& cells, const ValueGrid& grid, double x, double mass);

// Full linear convolution (length a + b - 1). Direct summation when either
// operand has at most 32 entries, FFT otherwise.
std::vector<double> convolve(std::span<const double> a, std::span<const double> b);

inline constexpr std::size_t kDirectConvolutionLimit = 32;

}  // namespace gvpj
