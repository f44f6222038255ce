#include <gtest/gtest.h>

#include "coplan/airspace.hpp"

namespace coplan {
namespace {

GridConfig small_grid() {
  GridConfig g;
  g.rows = 3;
  g.cols = 4;
  g.horizon_steps = 6;
  g.sector_capacity = 1;
  g.vertiport_adjacent_capacity = 2;
  g.vertiports = {{{0, 0}, VertiportKind::Hub, 3}, {{2, 3}, VertiportKind::Vertistop, 1}};
  return g;
}

TEST(Grid, ResourcesAreRowMajorCells) {
  const AirspaceGrid grid(small_grid());
  EXPECT_EQ(grid.size(), 12);
  EXPECT_EQ(grid.at({1, 2}), 6);
  EXPECT_EQ(grid.resource(6).cell, (CellIndex{1, 2}));
  EXPECT_TRUE(grid.is_vertiport(0));
  EXPECT_TRUE(grid.is_vertiport(11));
  EXPECT_FALSE(grid.is_vertiport(5));
}

TEST(Grid, OrthogonalNeighbours) {
  const AirspaceGrid grid(small_grid());
  EXPECT_EQ(grid.neighbors(grid.at({0, 0})).size(), 2u);
  EXPECT_EQ(grid.neighbors(grid.at({1, 1})).size(), 4u);
  EXPECT_TRUE(grid.adjacent(grid.at({1, 1}), grid.at({0, 1})));
  EXPECT_FALSE(grid.adjacent(grid.at({1, 1}), grid.at({0, 0})));
}

TEST(Grid, DiagonalNeighbours) {
  auto cfg = small_grid();
  cfg.connectivity = Connectivity::Diagonal8;
  const AirspaceGrid grid(cfg);
  EXPECT_EQ(grid.neighbors(grid.at({1, 1})).size(), 8u);
  EXPECT_TRUE(grid.adjacent(grid.at({1, 1}), grid.at({0, 0})));
}

TEST(Grid, VertiportAdjacentSectorsAreManaged) {
  const AirspaceGrid grid(small_grid());
  EXPECT_TRUE(grid.is_vertiport_adjacent(grid.at({0, 1})));
  EXPECT_TRUE(grid.is_vertiport_adjacent(grid.at({1, 0})));
  EXPECT_TRUE(grid.is_vertiport_adjacent(grid.at({1, 3})));
  EXPECT_FALSE(grid.is_vertiport_adjacent(grid.at({1, 1})));
  EXPECT_FALSE(grid.is_vertiport_adjacent(grid.at({0, 0})));  // vertiports themselves are not
  EXPECT_TRUE(grid.is_en_route(grid.at({1, 1})));
  EXPECT_EQ(grid.vertiport_adjacent().size(), 4u);
}

TEST(Grid, CapacitiesByKindWithOverrides) {
  auto cfg = small_grid();
  cfg.capacity_overrides = {{{1, 1}, 2, 3, 0}};
  const AirspaceGrid grid(cfg);
  EXPECT_EQ(grid.capacity(grid.at({0, 0}), 0), 3);
  EXPECT_EQ(grid.capacity(grid.at({2, 3}), 0), 1);
  EXPECT_EQ(grid.capacity(grid.at({0, 1}), 0), 2);
  EXPECT_EQ(grid.capacity(grid.at({1, 1}), 1), 1);
  EXPECT_EQ(grid.capacity(grid.at({1, 1}), 2), 0);
  EXPECT_EQ(grid.capacity(grid.at({1, 1}), 3), 0);
  EXPECT_EQ(grid.capacity(grid.at({1, 1}), 4), 1);
}

TEST(Grid, RejectsBadConfigs) {
  auto cfg = small_grid();
  cfg.rows = 0;
  EXPECT_THROW(AirspaceGrid{cfg}, ConfigError);
  cfg = small_grid();
  cfg.vertiports.push_back({{0, 0}, VertiportKind::Hub, 1});
  EXPECT_THROW(AirspaceGrid{cfg}, ConfigError);
  cfg = small_grid();
  cfg.vertiports.push_back({{5, 0}, VertiportKind::Hub, 1});
  EXPECT_THROW(AirspaceGrid{cfg}, ConfigError);
  cfg = small_grid();
  cfg.capacity_overrides = {{{0, 1}, 3, 2, 0}};
  EXPECT_THROW(AirspaceGrid{cfg}, ConfigError);
}

TEST(Ledger, FilingUpdatesOccupancy) {
  const AirspaceGrid grid(small_grid());
  OccupancyLedger ledger;
  ledger.file_plan(grid, {1, 0, {1, 0, {0, 1, 2}}, 0});
  EXPECT_EQ(ledger.occupancy().at(1, 1), 1);
  EXPECT_EQ(ledger.occupancy().at(1, 0), 0);
  EXPECT_EQ(remaining_capacity(grid, ledger.occupancy(), 1, 1), 1);
  EXPECT_TRUE(ledger.index_consistent());
  EXPECT_TRUE(overloaded_cells(grid, ledger.occupancy()).empty());
}

TEST(Ledger, RejectsOverCapacityAndStaysUnchanged) {
  const AirspaceGrid grid(small_grid());
  OccupancyLedger ledger;
  ledger.file_plan(grid, {1, 0, {1, 0, {0, 1, 2, 2}}, 0});
  const Occupancy before = ledger.occupancy();
  // Sector 2 has capacity 1 (not vertiport-adjacent); both flights are in it at t=2.
  try {
    ledger.file_plan(grid, {2, 0, {2, 0, {0, 1, 2}}, 0});
    FAIL() << "expected CapacityViolation";
  } catch (const CapacityViolation& e) {
    EXPECT_EQ(e.flight(), 2);
    ASSERT_EQ(e.cells().size(), 1u);
    EXPECT_EQ(e.cells()[0], (ResourceTime{2, 2}));
  }
  EXPECT_EQ(ledger.occupancy(), before);
  EXPECT_EQ(ledger.records().size(), 1u);
}

TEST(Ledger, OverloadDetectionFindsEveryCell) {
  const AirspaceGrid grid(small_grid());
  Occupancy occ;
  occ.add({1, 0, {5, 5}});
  occ.add({2, 0, {5, 6}});
  const auto bad = overloaded_cells(grid, occ);
  ASSERT_EQ(bad.size(), 1u);
  EXPECT_EQ(bad[0], (ResourceTime{5, 0}));
  occ.add({2, 0, {5, 6}}, -1);
  EXPECT_TRUE(overloaded_cells(grid, occ).empty());
}

}  // namespace
}  // namespace coplan
