#include <algorithm>
#include <map>

#include "coplan/oracle.hpp"
#include "coplan/step2.hpp"

namespace coplan::oracle {

Occupancy TinyInstance::occupancy(const AirspaceGrid& g) const {
  OccupancyLedger ledger;
  for (const auto& rec : filed) ledger.file_plan(g, rec);
  return ledger.occupancy();
}

ChoiceSet TinyInstance::choices_for(const AirspaceGrid& g, std::size_t f) const {
  if (!choices.empty()) return choices.at(f);
  return full_choice_set(g, occupancy(g), horizon, requests.at(f));
}

ChoiceSet full_choice_set(const AirspaceGrid& grid, const Occupancy& occupancy, const Horizon& horizon,
                          const FlightRequest& req) {
  ChoiceSet cs{req.id, req.origin, req.destination, {}};
  for (ResourceId r = 0; r < grid.size(); ++r) {
    if (!in_choice_domain(grid, req, r)) continue;
    for (Timestep t = std::max(req.departure, horizon.start); t < req.window_end() && t <= horizon.last(); ++t) {
      if (r == req.origin && t > req.departure + req.flexibility) continue;
      if (r == req.destination && t < req.arrival) continue;
      if (remaining_capacity(grid, occupancy, r, t) >= 1) cs.choices.insert({r, t});
    }
  }
  return cs;
}

std::vector<FlightPlan> enumerate_feasible_plans(const AirspaceGrid& grid, const Occupancy& occupancy,
                                                 const Horizon& horizon, const FlightRequest& req,
                                                 const ChoiceSet& choices, PlanCheckOptions options,
                                                 std::int64_t guard) {
  const Timestep first = std::max(req.departure, horizon.start);
  const Timestep last = std::min(req.window_end() - 1, horizon.last());
  auto allowed = [&](ResourceId r, Timestep t) {
    if (grid.is_managed(r)) return choices.offers(r, t);
    return !options.en_route_capacity || remaining_capacity(grid, occupancy, r, t) >= 1;
  };

  // Hop distance to the destination; a walk that cannot arrive in time is
  // abandoned early.
  std::vector<int> hops(grid.size(), -1);
  std::vector<ResourceId> frontier{req.destination};
  hops[req.destination] = 0;
  for (std::size_t i = 0; i < frontier.size(); ++i) {
    for (ResourceId n : grid.neighbors(frontier[i])) {
      if (hops[n] < 0) {
        hops[n] = hops[frontier[i]] + 1;
        frontier.push_back(n);
      }
    }
  }

  std::vector<FlightPlan> out;
  std::int64_t explored = 0;
  FlightPlan walk;
  walk.flight = req.id;
  // Depth-first over every walk that starts at the origin; a walk stops at its
  // first visit to the destination. check_plan decides feasibility.
  auto extend = [&](auto&& self, Timestep t) -> void {
    if (++explored > guard) throw GuardExceeded("plan enumeration for flight " + std::to_string(req.id));
    const ResourceId cur = walk.path.back();
    if (cur == req.destination) {
      if (check_plan(grid, occupancy, horizon, req, choices, walk, options).empty()) out.push_back(walk);
      return;
    }
    if (t >= last) return;
    std::vector<ResourceId> next{cur};
    for (ResourceId n : grid.neighbors(cur)) next.push_back(n);
    std::sort(next.begin(), next.end());
    for (ResourceId n : next) {
      if (hops[n] < 0 || t + 1 + hops[n] > last || !allowed(n, t + 1)) continue;
      walk.path.push_back(n);
      self(self, t + 1);
      walk.path.pop_back();
    }
  };
  for (Timestep t0 = first; t0 <= last; ++t0) {
    if (!allowed(req.origin, t0)) continue;
    walk.departure = t0;
    walk.path = {req.origin};
    extend(extend, t0);
  }
  return out;
}

Step2Optimum step2_optimum(const AirspaceGrid& grid, const Occupancy& occupancy, const Horizon& horizon,
                           const FlightRequest& request, const ChoiceSet& choices, const Rational& alpha) {
  Step2Optimum best;
  const auto plans = enumerate_feasible_plans(grid, occupancy, horizon, request, choices);
  best.feasible_plans = plans.size();
  for (const auto& p : plans) {
    const auto cost = exact_tdc(p, request, alpha);
    if (!best.plan || cost < best.tdc) {
      best.plan = p;
      best.tdc = cost;
    }
  }
  return best;
}

JointOptimum oracle_joint_optimum(const AirspaceGrid& grid, const Occupancy& occupancy, const Horizon& horizon,
                                  std::span<const DeconflictionInput> flights, const Rational& alpha,
                                  const Rational& gamma, std::int64_t guard) {
  std::vector<std::vector<FlightPlan>> options;
  for (const auto& in : flights) {
    options.push_back(enumerate_feasible_plans(grid, occupancy, horizon, in.request, in.choices, {}, guard));
  }
  std::vector<FlightPlan> proposals;
  for (const auto& in : flights) proposals.push_back(in.proposal);

  JointOptimum best;
  std::vector<FlightPlan> pick;
  std::map<ResourceTime, int> load;
  auto place = [&](const FlightPlan& p, int delta) {
    bool ok = true;
    for (const auto& rt : p.occupancies()) {
      if (!grid.is_en_route(rt.resource)) continue;
      load[rt] += delta;
      if (delta > 0 && load[rt] > remaining_capacity(grid, occupancy, rt.resource, rt.t)) ok = false;
    }
    return ok;
  };
  auto recurse = [&](auto&& self, std::size_t f) -> void {
    if (f == flights.size()) {
      if (++best.combinations > guard) throw GuardExceeded("joint enumeration");
      Rational total;
      for (std::size_t i = 0; i < pick.size(); ++i) total = total + exact_tdc(pick[i], flights[i].request, alpha);
      const Rational fair = exact_fairness(proposals, pick);
      const Rational objective = total + gamma * fair;
      if (!best.feasible || objective < best.objective) {
        best = {true, pick, objective, total, fair, best.combinations};
      }
      return;
    }
    for (const auto& p : options[f]) {
      pick.push_back(p);
      if (place(p, 1)) self(self, f + 1);
      place(p, -1);
      pick.pop_back();
    }
  };
  recurse(recurse, 0);
  return best;
}

namespace {

// Every schedule along the route: departure time plus sector hold lengths.
std::vector<FlightPlan> route_schedules(const Horizon& horizon, const FlightRequest& req, const FixedRoute& route,
                                        std::int64_t guard) {
  std::vector<FlightPlan> out;
  const std::size_t sectors = route.resources.size() - 2;
  std::vector<int> hold(sectors);
  std::int64_t explored = 0;
  for (Timestep dep = std::max(req.departure, horizon.start);
       dep <= req.departure + req.flexibility && dep <= horizon.last(); ++dep) {
    const int budget = horizon.last() - dep - 1;  // steps available for sectors
    auto fill = [&](auto&& self, std::size_t k, int used) -> void {
      if (++explored > guard) throw GuardExceeded("route schedules for flight " + std::to_string(req.id));
      if (k == sectors) {
        FlightPlan p{req.id, dep, {route.resources.front()}};
        for (std::size_t i = 0; i < sectors; ++i) p.path.insert(p.path.end(), hold[i], route.resources[i + 1]);
        p.path.push_back(route.resources.back());
        if (check_route_plan(horizon, req, route, p).empty()) out.push_back(std::move(p));
        return;
      }
      for (int h = 1; used + h <= budget; ++h) {
        hold[k] = h;
        self(self, k + 1, used + h);
      }
    };
    fill(fill, 0, 0);
  }
  return out;
}

}  // namespace

TfmpOptimum tfmp_optimum(const AirspaceGrid& grid, const Occupancy& occupancy, const Horizon& horizon,
                         std::span<const FlightRequest> requests, std::span<const FixedRoute> routes,
                         const Rational& alpha, std::int64_t guard) {
  if (requests.size() != routes.size()) throw std::invalid_argument("requests and routes differ in size");
  std::vector<std::vector<FlightPlan>> options;
  std::vector<Rational> unserved;
  const Rational never(horizon.last() + 1);
  for (std::size_t f = 0; f < requests.size(); ++f) {
    options.push_back(route_schedules(horizon, requests[f], routes[f], guard));
    unserved.push_back(alpha * (never - Rational(requests[f].arrival)) +
                       (Rational(1) - alpha) * (never - Rational(requests[f].departure)));
  }

  TfmpOptimum best;
  bool found = false;
  std::vector<std::optional<FlightPlan>> pick;
  std::map<ResourceTime, int> load;
  auto place = [&](const FlightPlan& p, int delta) {
    bool ok = true;
    for (const auto& rt : p.occupancies()) {
      load[rt] += delta;
      if (delta > 0 && load[rt] > remaining_capacity(grid, occupancy, rt.resource, rt.t)) ok = false;
    }
    return ok;
  };
  auto recurse = [&](auto&& self, std::size_t f, Rational cost) -> void {
    if (f == requests.size()) {
      if (++best.combinations > guard) throw GuardExceeded("tfmp enumeration");
      if (!found || cost < best.objective) {
        found = true;
        best.plans = pick;
        best.objective = cost;
      }
      return;
    }
    for (const auto& p : options[f]) {
      pick.emplace_back(p);
      if (place(p, 1)) self(self, f + 1, cost + exact_tdc(p, requests[f], alpha));
      place(p, -1);
      pick.pop_back();
    }
    pick.emplace_back(std::nullopt);
    self(self, f + 1, cost + unserved[f]);
    pick.pop_back();
  };
  recurse(recurse, 0, Rational(0));
  return best;
}

}  // namespace coplan::oracle
