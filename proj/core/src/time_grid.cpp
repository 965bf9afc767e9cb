#include "gvpj/time_grid.hpp"

#include <cmath>
#include <string>

#include "gvpj/errors.hpp"

namespace gvpj {

TimeGrid::TimeGrid(std::vector<double> times) : times_(std::move(times)) {
  require(!times_.empty(), "time grid: at least one time required");
  double prev = 0.0;
  for (std::size_t i = 0; i < times_.size(); ++i) {
    require(std::isfinite(times_[i]) && times_[i] > prev,
            "time grid: times must be finite, positive and strictly increasing (index " +
                std::to_string(i) + ")");
    prev = times_[i];
  }
}

TimeGrid TimeGrid::uniform(double horizon, std::size_t n) {
  require(horizon > 0.0 && std::isfinite(horizon), "time grid: horizon must be positive");
  require(n >= 1, "time grid: n must be at least 1");
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = horizon * static_cast<double>(i + 1) / static_cast<double>(n);
  t.back() = horizon;
  return TimeGrid(std::move(t));
}

std::size_t TimeGrid::node_index(double t, double rel_tol) const {
  const double scale = empty() ? 1.0 : horizon();
  if (std::abs(t) <= rel_tol * scale) return 0;
  // Binary search for the closest node.
  std::size_t lo = 0, hi = times_.size();
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (times_[mid] < t) lo = mid + 1;
    else hi = mid;
  }
  for (std::size_t c : {lo, lo == 0 ? lo : lo - 1}) {
    if (c < times_.size() && std::abs(times_[c] - t) <= rel_tol * scale) return c + 1;
  }
  throw DomainError("time " + std::to_string(t) + " is not a grid node");
}

SamplePath::SamplePath(TimeGrid g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
  require(values.size() == grid.size(), "sample path: one value per grid time required");
}

std::vector<double> SamplePath::increments() const {
  std::vector<double> dx(values.size());
  double prev = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    dx[i] = values[i] - prev;
    prev = values[i];
  }
  return dx;
}

SamplePath SamplePath::from_increments(const TimeGrid& grid, const std::vector<double>& dx) {
  require(dx.size() == grid.size(), "sample path: one increment per cell required");
  std::vector<double> v(dx.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < dx.size(); ++i) {
    acc += dx[i];
    v[i] = acc;
  }
  return SamplePath(grid, std::move(v));
}

}  // namespace gvpj
