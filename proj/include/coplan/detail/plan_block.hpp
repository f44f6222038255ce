#pragma once

#include <string>

#include "coplan/airspace.hpp"
#include "coplan/detail/var_index.hpp"
#include "coplan/flight.hpp"
#include "coplan/milp.hpp"
#include "coplan/step1.hpp"

namespace coplan::detail {

// Presence variables and constraints for one flight, shared by the operator
// model and the PSU deconfliction model.
struct PlanBlock {
  TimeWindow window;
  VarIndex presence;
  VarIndex entry;  // populated only when requested
  milp::LinearExpr departure_time;
  milp::LinearExpr arrival_time;
  milp::LinearExpr path_length;
};

// Variables are created only where a flight may legally be: managed
// resources where the choice set offers (r, t), en-route sectors with
// remaining capacity, all inside [d, a + eps - 1]. That domain restriction
// carries the per-flight capacity and PSU-restriction rows.
PlanBlock add_plan_block(milp::Model& model, const AirspaceGrid& grid, const Occupancy& occupancy,
                         const Horizon& horizon, const FlightRequest& request, const ChoiceSet& choices,
                         const std::string& tag, bool with_entries);

milp::LinearExpr tdc_expr(const PlanBlock& block, const FlightRequest& request, double alpha);

// Reads the presence sequence out of a solved model.
FlightPlan extract_plan(const PlanBlock& block, const milp::SolveResult& result, FlightId flight);

}  // namespace coplan::detail
