#include <gtest/gtest.h>

#include <limits>

#include "gvpj/errors.hpp"
#include "gvpj/time_grid.hpp"

namespace gvpj {
namespace {

TEST(TimeGrid, UniformLayout) {
  const TimeGrid g = TimeGrid::uniform(2.0, 4);
  ASSERT_EQ(g.size(), 4u);
  EXPECT_DOUBLE_EQ(g.horizon(), 2.0);
  EXPECT_EQ(g.node(0), 0.0);
  EXPECT_DOUBLE_EQ(g.node(2), 1.0);
  EXPECT_DOUBLE_EQ(g.cell_lo(1), 0.5);
  EXPECT_DOUBLE_EQ(g.cell_hi(1), 1.0);
  EXPECT_DOUBLE_EQ(g.cell_width(3), 0.5);
}

TEST(TimeGrid, RejectsBadTimes) {
  EXPECT_THROW(TimeGrid(std::vector<double>{}), DomainError);
  EXPECT_THROW(TimeGrid({0.0, 1.0}), DomainError);
  EXPECT_THROW(TimeGrid({0.5, 0.5}), DomainError);
  EXPECT_THROW(TimeGrid({0.5, 0.2}), DomainError);
  EXPECT_THROW(TimeGrid({0.5, std::numeric_limits<double>::infinity()}), DomainError);
  EXPECT_THROW(TimeGrid::uniform(0.0, 3), DomainError);
  EXPECT_THROW(TimeGrid::uniform(1.0, 0), DomainError);
}

TEST(TimeGrid, NodeIndexToleratesRounding) {
  const TimeGrid g = TimeGrid::uniform(1.0, 10);
  EXPECT_EQ(g.node_index(0.0), 0u);
  EXPECT_EQ(g.node_index(0.3), 3u);
  EXPECT_EQ(g.node_index(0.1 + 0.2), 3u);
  EXPECT_EQ(g.node_index(1.0), 10u);
  EXPECT_THROW(g.node_index(0.35), DomainError);
  EXPECT_THROW(g.node_index(1.5), DomainError);
}

TEST(SamplePath, IncrementsRoundTrip) {
  const TimeGrid g({0.5, 1.0, 2.0});
  const SamplePath p(g, {1.0, -0.5, 3.0});
  EXPECT_EQ(p.at_node(0), 0.0);
  EXPECT_EQ(p.at_node(3), 3.0);
  const std::vector<double> dx = p.increments();
  EXPECT_EQ(dx, (std::vector<double>{1.0, -1.5, 3.5}));
  EXPECT_EQ(SamplePath::from_increments(g, dx).values, p.values);
  EXPECT_THROW(SamplePath(g, {1.0}), DomainError);
}

}  // namespace
}  // namespace gvpj
