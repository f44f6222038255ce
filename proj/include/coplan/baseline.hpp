#pragma once

#include <span>
#include <string>
#include <vector>

#include "coplan/airspace.hpp"
#include "coplan/flight.hpp"
#include "coplan/milp.hpp"

namespace coplan {

// Route fixed in advance for the classical TFMP comparator.
struct FixedRoute {
  FlightId flight = 0;
  std::vector<ResourceId> resources;  // origin ... destination
  std::vector<int> dwell;             // minimum steps in each resource

  int hops() const { return static_cast<int>(resources.size()) - 1; }
  // Steps from departure to arrival when nothing is held.
  int nominal_travel() const;
};

// Hop-shortest route through sectors only (no intermediate vertiports).
// Among hop-shortest routes the one with least total minimum dwell wins, then
// the lexicographically smallest resource sequence. Throws
// std::runtime_error when the destination is unreachable.
FixedRoute fixed_route(const AirspaceGrid& grid, const FlightRequest& request);

// Least possible travel time (departure to arrival) over all routes that
// avoid intermediate vertiports, honouring minimum dwell; ignores capacity.
int min_travel_time(const AirspaceGrid& grid, const FlightRequest& request);

struct TfmpResult {
  milp::SolveStatus status = milp::SolveStatus::Error;
  std::vector<FlightPlan> plans;     // served flights, input order
  std::vector<FlightId> carryovers;  // flights not scheduled inside the horizon
  double total_tdc = 0.0;            // over served flights
  double objective = 0.0;
  double solve_seconds = 0.0;
  std::string diagnostic;
};

// Flights follow their fixed route, may hold in any sector beyond the
// minimum dwell, depart inside [d, d + eps], land no earlier than a and
// inside the horizon. Capacity binds on every resource. Objective: sum of
// alpha * arrival delay + (1 - alpha) * departure delay, where a flight left
// unscheduled is charged as if it departed and arrived one step after the
// horizon.
milp::Model build_tfmp_model(const AirspaceGrid& grid, const Occupancy& occupancy, const Horizon& horizon,
                             std::span<const FlightRequest> requests, std::span<const FixedRoute> routes,
                             const DelayCostParams& params);

TfmpResult solve_tfmp(const AirspaceGrid& grid, const Occupancy& occupancy, const Horizon& horizon,
                      std::span<const FlightRequest> requests, std::span<const FixedRoute> routes,
                      const DelayCostParams& params, const milp::Backend& backend,
                      const milp::SolveLimits& limits = {});

// Delay charged to an unscheduled flight.
double tfmp_unserved_cost(const FlightRequest& request, const Horizon& horizon, const DelayCostParams& params);

// Route order, minimum dwell, departure window and earliest arrival for one
// baseline plan.
std::vector<std::string> check_route_plan(const Horizon& horizon, const FlightRequest& request,
                                          const FixedRoute& route, const FlightPlan& plan);

}  // namespace coplan
