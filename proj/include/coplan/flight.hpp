#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "coplan/types.hpp"

namespace coplan {

// One flight's demand as submitted to the PSU.
struct FlightRequest {
  FlightId id = 0;
  OperatorId op = 0;
  ResourceId origin = 0;
  ResourceId destination = 0;
  Timestep departure = 0;  // requested departure d
  Timestep arrival = 0;    // requested arrival a
  int flexibility = 0;     // epsilon, in timesteps
  // Minimum dwell per resource; resources not listed default to 1.
  std::map<ResourceId, int> dwell;
  int resubmissions = 0;
  // First submitted times, kept across carryovers for reporting.
  Timestep original_departure = 0;
  Timestep original_arrival = 0;

  int min_dwell(ResourceId r) const {
    auto it = dwell.find(r);
    return it == dwell.end() ? 1 : it->second;
  }
  // Exclusive end of the window in which the flight may hold choices.
  Timestep window_end() const { return arrival + flexibility; }
};

// Presence schedule: path[i] is the single resource occupied at departure + i.
struct FlightPlan {
  FlightId flight = 0;
  Timestep departure = 0;
  std::vector<ResourceId> path;

  Timestep arrival() const { return departure + static_cast<Timestep>(path.size()) - 1; }
  std::vector<ResourceTime> occupancies() const;
  bool operator==(const FlightPlan&) const = default;
};

struct DelayCostParams {
  double alpha = 0.3;
};

// Number of resource entries (maximal runs) in the plan.
int path_length(const FlightPlan& plan);

// alpha * arrival delay + (1 - alpha) * departure delay, measured against
// the request's current times.
double tdc(const FlightPlan& plan, const FlightRequest& request, const DelayCostParams& params);

// Same formula measured against the originally submitted times, so that
// carryover delay counts.
double tdc_from_original(const FlightPlan& plan, const FlightRequest& request,
                         const DelayCostParams& params);

// Carryover update: both requested times move forward by `steps`.
FlightRequest resubmitted(const FlightRequest& request, int steps);

}  // namespace coplan
