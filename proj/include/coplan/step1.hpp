#pragma once

#include <algorithm>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "coplan/airspace.hpp"
#include "coplan/flight.hpp"
#include "coplan/milp.hpp"

namespace coplan {

// (resource, time) options the PSU offers one flight at vertiports and
// vertiport-adjacent sectors.
struct ChoiceSet {
  FlightId flight = 0;
  ResourceId origin = 0;
  ResourceId destination = 0;
  std::set<ResourceTime> choices;

  bool offers(ResourceId r, Timestep t) const { return choices.contains({r, t}); }
  std::vector<Timestep> departure_slots() const;
  std::vector<Timestep> arrival_slots() const;
  bool empty() const { return choices.empty(); }
  bool operator==(const ChoiceSet&) const = default;
};

// Checks request invariants against the grid and the planning horizon.
// Returns an empty string when the request is valid.
std::string validate_request(const AirspaceGrid& grid, const Horizon& horizon, const FlightRequest& request);

// Resources a flight may receive choices for: vertiport-adjacent sectors plus
// its own origin and destination vertiports.
bool in_choice_domain(const AirspaceGrid& grid, const FlightRequest& request, ResourceId r);

struct Step1Result {
  milp::SolveStatus status = milp::SolveStatus::Error;
  std::vector<ChoiceSet> choice_sets;  // aligned with the request batch
  std::vector<FlightId> unassigned;
  double objective = 0.0;              // MILP optimum: total offered choices
  double solve_seconds = 0.0;
  std::string diagnostic;
};

milp::Model build_step1_model(const AirspaceGrid& grid, const Occupancy& occupancy, const Horizon& horizon,
                              std::span<const FlightRequest> requests);

// Jointly sets the choice sets for a batch of requests. Flights with no
// offered departure slot are reported unassigned and get an empty set.
Step1Result solve_step1(const AirspaceGrid& grid, const Occupancy& occupancy, const Horizon& horizon,
                        std::span<const FlightRequest> requests, const milp::Backend& backend,
                        const milp::SolveLimits& limits = {});

// Solution-level restatement of every Step 1 constraint family, evaluated
// directly on the choice sets.
std::vector<std::string> check_choice_sets(const AirspaceGrid& grid, const Occupancy& occupancy,
                                           const Horizon& horizon, std::span<const FlightRequest> requests,
                                           std::span<const ChoiceSet> choice_sets);

// Per-flight part of the above (everything except joint capacity).
std::vector<std::string> check_choice_set(const AirspaceGrid& grid, const Horizon& horizon,
                                          const FlightRequest& request, const ChoiceSet& choices);

// Dwell restatement shared by the Step 1 and Step 2 checkers: whenever r is
// held at t-1 and fewer than `dwell` of the steps [t-dwell, t-1] (clipped to
// window_start) hold r, r must also be held at t. `held` answers for any t.
template <typename Held>
bool dwell_satisfied(Held&& held, int dwell, Timestep window_start, Timestep window_last) {
  if (dwell <= 1) return true;
  for (Timestep t = window_start + 1; t <= window_last + 1; ++t) {
    if (!held(t - 1)) continue;
    int recent = 0;
    for (Timestep k = std::max(t - dwell, window_start); k <= t - 1; ++k) recent += held(k) ? 1 : 0;
    if (recent < dwell && !held(t)) return false;
  }
  return true;
}

}  // namespace coplan
