#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "coplan/airspace.hpp"
#include "coplan/flight.hpp"
#include "coplan/milp.hpp"
#include "coplan/step1.hpp"

namespace coplan {

struct Step2Outcome {
  std::optional<FlightPlan> plan;  // empty: no feasible plan this period
  milp::SolveStatus status = milp::SolveStatus::Error;
  double tdc = 0.0;
  double solve_seconds = 0.0;
  std::string diagnostic;
};

milp::Model build_step2_model(const AirspaceGrid& grid, const Occupancy& occupancy, const Horizon& horizon,
                              const FlightRequest& request, const ChoiceSet& choices,
                              const DelayCostParams& params);

// Operator planning: minimum-delay-cost presence schedule inside the PSU
// choices and the remaining en-route capacity. Throws std::invalid_argument
// on an empty choice set.
Step2Outcome solve_step2(const AirspaceGrid& grid, const Occupancy& occupancy, const Horizon& horizon,
                         const FlightRequest& request, const ChoiceSet& choices,
                         const DelayCostParams& params, const milp::Backend& backend,
                         const milp::SolveLimits& limits = {});

// Solves every flight independently on up to `workers` threads. Outcomes are
// aligned with the inputs.
std::vector<Step2Outcome> solve_step2_batch(const AirspaceGrid& grid, const Occupancy& occupancy,
                                            const Horizon& horizon, std::span<const FlightRequest> requests,
                                            std::span<const ChoiceSet> choices, const DelayCostParams& params,
                                            const milp::Backend& backend, const milp::SolveLimits& limits,
                                            int workers);

struct PlanCheckOptions {
  // Step 3 checks en-route capacity jointly instead.
  bool en_route_capacity = true;
};

// Substitution checker for one plan: contiguity, single origin and
// destination slots inside the choice set, adjacency, minimum dwell in
// sectors, one resource per step, en-route capacity.
std::vector<std::string> check_plan(const AirspaceGrid& grid, const Occupancy& occupancy, const Horizon& horizon,
                                    const FlightRequest& request, const ChoiceSet& choices,
                                    const FlightPlan& plan, PlanCheckOptions options = {});

}  // namespace coplan
