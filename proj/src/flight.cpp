#include "coplan/flight.hpp"

namespace coplan {

std::vector<ResourceTime> FlightPlan::occupancies() const {
  std::vector<ResourceTime> out;
  out.reserve(path.size());
  for (std::size_t i = 0; i < path.size(); ++i) {
    out.push_back({path[i], departure + static_cast<Timestep>(i)});
  }
  return out;
}

int path_length(const FlightPlan& plan) {
  int entries = 0;
  for (std::size_t i = 0; i < plan.path.size(); ++i) {
    if (i == 0 || plan.path[i] != plan.path[i - 1]) ++entries;
  }
  return entries;
}

double tdc(const FlightPlan& plan, const FlightRequest& request, const DelayCostParams& params) {
  return params.alpha * (plan.arrival() - request.arrival) +
         (1.0 - params.alpha) * (plan.departure - request.departure);
}

double tdc_from_original(const FlightPlan& plan, const FlightRequest& request,
                         const DelayCostParams& params) {
  return params.alpha * (plan.arrival() - request.original_arrival) +
         (1.0 - params.alpha) * (plan.departure - request.original_departure);
}

FlightRequest resubmitted(const FlightRequest& request, int steps) {
  FlightRequest next = request;
  next.departure += steps;
  next.arrival += steps;
  ++next.resubmissions;
  return next;
}

}  // namespace coplan
