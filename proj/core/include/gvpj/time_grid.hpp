#pragma once

#include <cstddef>
#include <vector>

namespace gvpj {

// Observation times 0 < t_1 < ... < t_n = T. The origin is an implicit node
// t_0 = 0 that carries no sample, so cell j is [t_j, t_{j+1}) for j = 0..n-1.
class TimeGrid {
 public:
  TimeGrid() = default;
  explicit TimeGrid(std::vector<double> times);

  static TimeGrid uniform(double horizon, std::size_t n);

  std::size_t size() const noexcept { return times_.size(); }
  bool empty() const noexcept { return times_.empty(); }
  double horizon() const { return times_.back(); }
  const std::vector<double>& times() const noexcept { return times_; }

  // node(0) = 0, node(k) = t_k.
  double node(std::size_t k) const { return k == 0 ? 0.0 : times_[k - 1]; }
  double cell_lo(std::size_t j) const { return node(j); }
  double cell_hi(std::size_t j) const { return times_[j]; }
  double cell_width(std::size_t j) const { return cell_hi(j) - cell_lo(j); }

  // Node index k with node(k) == t up to a relative tolerance; throws if t is off-grid.
  std::size_t node_index(double t, double rel_tol = 1e-9) const;

  bool operator==(const TimeGrid& other) const { return times_ == other.times_; }

 private:
  std::vector<double> times_;
};

// Values at t_1..t_n with the implicit value 0 at the origin.
struct SamplePath {
  TimeGrid grid;
  std::vector<double> values;

  SamplePath() = default;
  SamplePath(TimeGrid g, std::vector<double> v);

  double at_node(std::size_t k) const { return k == 0 ? 0.0 : values[k - 1]; }
  // Increments over each cell: at_node(j+1) - at_node(j).
  std::vector<double> increments() const;
  static SamplePath from_increments(const TimeGrid& grid, const std::vector<double>& dx);
};

}  // namespace gvpj
