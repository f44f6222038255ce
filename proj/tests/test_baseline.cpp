#include <gtest/gtest.h>

#include "coplan/baseline.hpp"
#include "coplan/fixtures.hpp"
#include "coplan/oracle.hpp"

namespace coplan {
namespace {

GridConfig square() {
  GridConfig g;
  g.rows = 3;
  g.cols = 3;
  g.horizon_steps = 10;
  g.vertiports = {{{0, 0}, VertiportKind::Hub, 2}, {{2, 2}, VertiportKind::Hub, 2}};
  return g;
}

FlightRequest corner_request() {
  FlightRequest r;
  r.id = 1;
  r.origin = 0;
  r.destination = 8;
  r.arrival = 4;
  r.original_arrival = 4;
  r.flexibility = 3;
  return r;
}

TEST(FixedRoute, ShortestWithLowestIdsOnTies) {
  const AirspaceGrid grid(square());
  const auto route = fixed_route(grid, corner_request());
  EXPECT_EQ(route.resources, (std::vector<ResourceId>{0, 1, 2, 5, 8}));
  EXPECT_EQ(route.hops(), 4);
  EXPECT_EQ(route.nominal_travel(), 4);
}

TEST(FixedRoute, PrefersLessDwellAmongShortest) {
  const AirspaceGrid grid(square());
  auto req = corner_request();
  req.dwell[2] = 2;
  const auto route = fixed_route(grid, req);
  EXPECT_EQ(route.resources, (std::vector<ResourceId>{0, 1, 4, 5, 8}));
}

TEST(FixedRoute, NeverPassesThroughAnotherVertiport) {
  auto cfg = square();
  cfg.vertiports.push_back({{0, 1}, VertiportKind::Vertistop, 1});
  const AirspaceGrid grid(cfg);
  const auto route = fixed_route(grid, corner_request());
  EXPECT_EQ(route.resources, (std::vector<ResourceId>{0, 3, 4, 5, 8}));
}

TEST(FixedRoute, UnreachableThrows) {
  auto cfg = square();
  cfg.vertiports.push_back({{0, 1}, VertiportKind::Vertistop, 1});
  cfg.vertiports.push_back({{1, 0}, VertiportKind::Vertistop, 1});
  const AirspaceGrid grid(cfg);
  EXPECT_THROW(fixed_route(grid, corner_request()), std::runtime_error);
}

TEST(MinTravel, SumsDwellOnFastestRoute) {
  const AirspaceGrid grid(square());
  auto req = corner_request();
  EXPECT_EQ(min_travel_time(grid, req), 4);
  req.dwell = {{1, 2}, {3, 2}};
  EXPECT_EQ(min_travel_time(grid, req), 5);
}

TEST(Tfmp, CorridorOnTime) {
  const auto inst = oracle::corridor_instance();
  const AirspaceGrid grid(inst.grid);
  const std::vector<FixedRoute> routes{fixed_route(grid, inst.requests[0])};
  const auto r = solve_tfmp(grid, {}, inst.horizon, inst.requests, routes, {0.3}, *milp::default_backend());
  ASSERT_EQ(r.plans.size(), 1u);
  EXPECT_EQ(r.plans[0], (FlightPlan{1, 0, {0, 1, 2}}));
  EXPECT_DOUBLE_EQ(r.total_tdc, 0.0);
}

TEST(Tfmp, SharedCorridorMatchesOracleAndHoldsInsteadOfRerouting) {
  auto inst = oracle::shared_corridor_instance();
  inst.grid.vertiport_adjacent_capacity = 1;
  const AirspaceGrid grid(inst.grid);
  const Occupancy occ;
  std::vector<FixedRoute> routes;
  for (const auto& req : inst.requests) routes.push_back(fixed_route(grid, req));
  const auto r = solve_tfmp(grid, occ, inst.horizon, inst.requests, routes, {0.3}, *milp::default_backend());
  const auto o = oracle::tfmp_optimum(grid, occ, inst.horizon, inst.requests, routes, oracle::Rational(3, 10));
  EXPECT_TRUE(oracle::matches(r.objective, o.objective)) << r.objective << " vs " << o.objective.str();
  ASSERT_EQ(r.plans.size(), 2u);
  Occupancy overlay;
  for (std::size_t f = 0; f < r.plans.size(); ++f) {
    overlay.add(r.plans[f]);
    EXPECT_TRUE(check_route_plan(inst.horizon, inst.requests[f], routes[f], r.plans[f]).empty());
  }
  EXPECT_TRUE(overloaded_cells(grid, overlay).empty());
  EXPECT_GT(r.total_tdc, 0.0);
}

TEST(Tfmp, RoutePlanCheckerCatchesBadPlans) {
  const auto inst = oracle::corridor_instance();
  const AirspaceGrid grid(inst.grid);
  const auto& req = inst.requests[0];
  const auto route = fixed_route(grid, req);
  EXPECT_TRUE(check_route_plan(inst.horizon, req, route, {1, 0, {0, 1, 2}}).empty());
  EXPECT_FALSE(check_route_plan(inst.horizon, req, route, {1, 0, {0, 0, 1, 2}}).empty());  // endpoint held
  EXPECT_FALSE(check_route_plan(inst.horizon, req, route, {1, 0, {0, 2}}).empty());        // skips the route
  EXPECT_FALSE(check_route_plan(inst.horizon, req, route, {1, 3, {0, 1, 2}}).empty());     // leaves the horizon
}

TEST(Tfmp, EmptyBatch) {
  const auto inst = oracle::corridor_instance();
  const AirspaceGrid grid(inst.grid);
  const auto r = solve_tfmp(grid, {}, inst.horizon, {}, {}, {0.3}, *milp::default_backend());
  EXPECT_EQ(r.status, milp::SolveStatus::Optimal);
  EXPECT_TRUE(r.plans.empty());
}

}  // namespace
}  // namespace coplan
