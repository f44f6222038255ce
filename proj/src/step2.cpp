#include "coplan/step2.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>

#include "coplan/detail/plan_block.hpp"

namespace coplan {

milp::Model build_step2_model(const AirspaceGrid& grid, const Occupancy& occupancy, const Horizon& horizon,
                              const FlightRequest& request, const ChoiceSet& choices,
                              const DelayCostParams& params) {
  milp::Model model;
  auto block = detail::add_plan_block(model, grid, occupancy, horizon, request, choices,
                                      std::to_string(request.id), false);
  model.set_objective(milp::Sense::Minimize, detail::tdc_expr(block, request, params.alpha));
  return model;
}

Step2Outcome solve_step2(const AirspaceGrid& grid, const Occupancy& occupancy, const Horizon& horizon,
                         const FlightRequest& request, const ChoiceSet& choices, const DelayCostParams& params,
                         const milp::Backend& backend, const milp::SolveLimits& limits) {
  if (choices.empty()) {
    throw std::invalid_argument("flight " + std::to_string(request.id) + " has an empty choice set");
  }
  milp::Model model;
  auto block = detail::add_plan_block(model, grid, occupancy, horizon, request, choices,
                                      std::to_string(request.id), false);
  model.set_objective(milp::Sense::Minimize, detail::tdc_expr(block, request, params.alpha));

  const auto result = milp::solve(model, limits, backend);
  Step2Outcome out;
  out.status = result.status;
  out.solve_seconds = result.wall_seconds;
  out.diagnostic = result.diagnostic;
  if (!result.has_solution()) return out;
  out.plan = detail::extract_plan(block, result, request.id);
  out.tdc = tdc(*out.plan, request, params);
  return out;
}

std::vector<Step2Outcome> solve_step2_batch(const AirspaceGrid& grid, const Occupancy& occupancy,
                                            const Horizon& horizon, std::span<const FlightRequest> requests,
                                            std::span<const ChoiceSet> choices, const DelayCostParams& params,
                                            const milp::Backend& backend, const milp::SolveLimits& limits,
                                            int workers) {
  if (requests.size() != choices.size()) throw std::invalid_argument("requests and choice sets differ in size");
  std::vector<Step2Outcome> outcomes(requests.size());
  std::vector<std::exception_ptr> errors(requests.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < requests.size(); i = next++) {
      try {
        outcomes[i] = solve_step2(grid, occupancy, horizon, requests[i], choices[i], params, backend, limits);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int n = std::clamp<int>(workers, 1, static_cast<int>(std::max<std::size_t>(requests.size(), 1)));
  if (n == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int i = 0; i < n; ++i) pool.emplace_back(work);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return outcomes;
}

std::vector<std::string> check_plan(const AirspaceGrid& grid, const Occupancy& occupancy, const Horizon& horizon,
                                    const FlightRequest& req, const ChoiceSet& choices, const FlightPlan& plan,
                                    PlanCheckOptions options) {
  std::vector<std::string> problems;
  auto fail = [&](const std::string& what) {
    problems.push_back("flight " + std::to_string(req.id) + ": " + what);
  };
  if (plan.flight != req.id) fail("plan belongs to flight " + std::to_string(plan.flight));
  if (plan.path.size() < 2) {
    fail("plan must occupy at least origin and destination");
    return problems;
  }
  if (plan.path.front() != req.origin) fail("plan does not start at the origin");
  if (plan.path.back() != req.destination) fail("plan does not end at the destination");
  if (std::count(plan.path.begin(), plan.path.end(), req.origin) != 1) fail("origin occupied more than once");
  if (std::count(plan.path.begin(), plan.path.end(), req.destination) != 1) {
    fail("destination occupied more than once");
  }

  const Timestep first = std::max(req.departure, horizon.start);
  const Timestep last = std::min(req.window_end() - 1, horizon.last());
  for (const auto& [r, t] : plan.occupancies()) {
    const std::string at = " at (r=" + std::to_string(r) + ",t=" + std::to_string(t) + ")";
    if (r < 0 || r >= grid.size()) {
      fail("unknown resource" + at);
      continue;
    }
    if (t < first || t > last) fail("presence outside the flight window" + at);
    if (grid.is_managed(r)) {
      if (!choices.offers(r, t)) fail("presence not offered by the PSU" + at);
    } else if (options.en_route_capacity && remaining_capacity(grid, occupancy, r, t) < 1) {
      fail("en-route sector full" + at);
    }
  }
  for (std::size_t i = 1; i < plan.path.size(); ++i) {
    if (plan.path[i] != plan.path[i - 1] && !grid.adjacent(plan.path[i], plan.path[i - 1])) {
      fail("non-adjacent move at t=" + std::to_string(plan.departure + static_cast<Timestep>(i)));
    }
  }
  for (ResourceId r : plan.path) {
    if (grid.is_vertiport(r)) continue;
    auto held = [&](Timestep t) {
      const auto i = t - plan.departure;
      return i >= 0 && i < static_cast<Timestep>(plan.path.size()) && plan.path[i] == r;
    };
    if (!dwell_satisfied(held, req.min_dwell(r), first, last)) {
      fail("stay in sector " + std::to_string(r) + " shorter than minimum dwell");
    }
  }
  return problems;
}

}  // namespace coplan
