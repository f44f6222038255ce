#pragma once

#include <span>
#include <string>
#include <vector>

#include "coplan/airspace.hpp"
#include "coplan/flight.hpp"
#include "coplan/milp.hpp"
#include "coplan/step1.hpp"

namespace coplan {

struct ConflictCell {
  ResourceId resource = 0;
  Timestep t = 0;
  int demand = 0;
  int capacity = 0;
  bool operator==(const ConflictCell&) const = default;
};

struct ConflictReport {
  std::vector<ConflictCell> cells;
  std::vector<FlightId> conflicting;
  std::vector<FlightId> clean;
  bool has_conflicts() const { return !cells.empty(); }
};

// Overlays the proposals on the snapshot and lists every over-capacity
// cell. Every flight present in a listed cell is conflicting. Throws
// InvariantViolation if a vertiport or vertiport-adjacent sector is
// overloaded, since Step 1 already allocated those.
ConflictReport detect_conflicts(const AirspaceGrid& grid, const Occupancy& occupancy,
                                std::span<const FlightPlan> proposals);

struct FairnessParams {
  double gamma = 1.0;
  double alpha = 0.3;
};

struct DeconflictionInput {
  FlightRequest request;
  ChoiceSet choices;
  FlightPlan proposal;
};

struct DeconflictionResult {
  milp::SolveStatus status = milp::SolveStatus::Error;
  std::vector<FlightPlan> plans;         // final plans of served flights, input order
  std::vector<double> ratios;            // L(final) / L(proposal), aligned with plans
  std::vector<FlightId> carryovers;      // flights dropped to make the batch feasible
  double fairness = 0.0;                 // max ratio - min ratio over served flights
  double total_tdc = 0.0;
  double objective = 0.0;                // total_tdc + gamma * fairness, recomputed from plans
  double solver_objective = 0.0;         // as reported by the backend
  double solve_seconds = 0.0;
  int solves = 0;
  bool exact = false;                    // every solve finished at optimality
  std::string diagnostic;
};

milp::Model build_step3_model(const AirspaceGrid& grid, const Occupancy& occupancy, const Horizon& horizon,
                              std::span<const DeconflictionInput> flights, const FairnessParams& params);

// Joint deconfliction of the conflicting flights against a snapshot that
// already contains the clean flights. If the batch is infeasible, the most
// recently requested flight (fewest resubmissions, latest in input order) is
// dropped and the rest re-solved, until a feasible batch remains.
DeconflictionResult solve_step3(const AirspaceGrid& grid, const Occupancy& occupancy, const Horizon& horizon,
                                std::span<const DeconflictionInput> flights, const FairnessParams& params,
                                const milp::Backend& backend, const milp::SolveLimits& limits = {});

// max_f L(after_f)/L(before_f) - min_f L(after_f)/L(before_f). Lists are
// matched by flight id; throws std::invalid_argument on mismatched ids or
// an empty "before" plan.
double fairness_value(std::span<const FlightPlan> before, std::span<const FlightPlan> after);

}  // namespace coplan
