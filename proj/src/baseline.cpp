#include "coplan/baseline.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <stdexcept>

#include "coplan/step1.hpp"

namespace coplan {

int FixedRoute::nominal_travel() const {
  if (resources.size() < 2) return 0;
  return 1 + std::accumulate(dwell.begin() + 1, dwell.end() - 1, 0);
}

namespace {

// Hop distance to the destination through sectors only.
std::vector<int> hops_to(const AirspaceGrid& grid, ResourceId destination) {
  std::vector<int> dist(grid.size(), -1);
  std::queue<ResourceId> queue;
  dist[destination] = 0;
  queue.push(destination);
  while (!queue.empty()) {
    const auto r = queue.front();
    queue.pop();
    for (ResourceId n : grid.neighbors(r)) {
      if (dist[n] >= 0 || grid.is_vertiport(n)) continue;
      dist[n] = dist[r] + 1;
      queue.push(n);
    }
  }
  return dist;
}

}  // namespace

FixedRoute fixed_route(const AirspaceGrid& grid, const FlightRequest& request) {
  const auto dist = hops_to(grid, request.destination);
  // Least total dwell from each resource onwards along hop-shortest routes.
  constexpr int kInf = std::numeric_limits<int>::max() / 2;
  std::vector<int> best(grid.size(), kInf);
  std::vector<ResourceId> order;
  for (ResourceId r = 0; r < grid.size(); ++r) {
    if (dist[r] >= 0) order.push_back(r);
  }
  std::stable_sort(order.begin(), order.end(), [&](ResourceId a, ResourceId b) { return dist[a] < dist[b]; });
  for (ResourceId r : order) {
    if (r == request.destination) {
      best[r] = 0;
      continue;
    }
    for (ResourceId n : grid.neighbors(r)) {
      if (dist[n] == dist[r] - 1 && best[n] < kInf) best[r] = std::min(best[r], request.min_dwell(r) + best[n]);
    }
  }

  auto next_step = [&](ResourceId from, int want_dist) {
    ResourceId pick = -1;
    for (ResourceId n : grid.neighbors(from)) {  // sorted ascending
      if (dist[n] != want_dist || best[n] >= kInf) continue;
      if (pick < 0 || best[n] < best[pick]) pick = n;
    }
    return pick;
  };

  int first_hop = kInf;
  for (ResourceId n : grid.neighbors(request.origin)) {
    if (dist[n] >= 0) first_hop = std::min(first_hop, dist[n]);
  }
  if (first_hop >= kInf) {
    throw std::runtime_error("no route from " + std::to_string(request.origin) + " to " +
                             std::to_string(request.destination));
  }
  FixedRoute route;
  route.flight = request.id;
  route.resources.push_back(request.origin);
  route.dwell.push_back(1);
  ResourceId cur = next_step(request.origin, first_hop);
  while (true) {
    route.resources.push_back(cur);
    route.dwell.push_back(cur == request.destination ? 1 : request.min_dwell(cur));
    if (cur == request.destination) break;
    cur = next_step(cur, dist[cur] - 1);
  }
  return route;
}

int min_travel_time(const AirspaceGrid& grid, const FlightRequest& request) {
  if (grid.adjacent(request.origin, request.destination)) return 1;
  constexpr int kInf = std::numeric_limits<int>::max() / 2;
  std::vector<int> dist(grid.size(), kInf);
  using Item = std::pair<int, ResourceId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  for (ResourceId n : grid.neighbors(request.origin)) {
    if (grid.is_vertiport(n)) continue;
    dist[n] = request.min_dwell(n);
    queue.push({dist[n], n});
  }
  int best = kInf;
  while (!queue.empty()) {
    const auto [d, r] = queue.top();
    queue.pop();
    if (d > dist[r]) continue;
    if (grid.adjacent(r, request.destination)) best = std::min(best, d);
    for (ResourceId n : grid.neighbors(r)) {
      if (grid.is_vertiport(n)) continue;
      const int nd = d + request.min_dwell(n);
      if (nd < dist[n]) {
        dist[n] = nd;
        queue.push({nd, n});
      }
    }
  }
  if (best >= kInf) {
    throw std::runtime_error("no route from " + std::to_string(request.origin) + " to " +
                             std::to_string(request.destination));
  }
  return best + 1;
}

double tfmp_unserved_cost(const FlightRequest& request, const Horizon& horizon, const DelayCostParams& params) {
  const Timestep never = horizon.last() + 1;
  return params.alpha * (never - request.arrival) + (1.0 - params.alpha) * (never - request.departure);
}

namespace {

// w[k][t - horizon.start] is 1 once the flight has entered route position k
// by step t; -1 marks a variable fixed to zero.
struct TfmpBlock {
  std::vector<std::vector<milp::VarId>> w;
  Timestep start = 0;

  milp::VarId at(std::size_t k, Timestep t) const {
    if (t < start || t - start >= static_cast<Timestep>(w[k].size())) return -1;
    return w[k][t - start];
  }
};

struct TfmpVars {
  std::vector<TfmpBlock> blocks;
};

// Adds +coef * (w[k][t] - w[k+1][t]) style presence terms.
void add_presence(milp::LinearExpr& expr, const TfmpBlock& b, std::size_t k, Timestep t) {
  const std::size_t last = b.w.size() - 1;
  if (auto v = b.at(k, t); v >= 0) expr.add(v);
  const auto leave = k == last ? b.at(k, t - 1) : b.at(k + 1, t);
  if (leave >= 0) expr.add(leave, -1.0);
}

TfmpVars add_tfmp(milp::Model& model, const AirspaceGrid& grid, const Occupancy& occupancy, const Horizon& horizon,
                  std::span<const FlightRequest> requests, std::span<const FixedRoute> routes,
                  const DelayCostParams& params) {
  if (requests.size() != routes.size()) throw std::invalid_argument("requests and routes differ in size");
  model.set_big_m(horizon.length + 1);
  TfmpVars vars;
  milp::LinearExpr objective;
  const Timestep h0 = horizon.start, hl = horizon.last();

  for (std::size_t f = 0; f < requests.size(); ++f) {
    const auto& req = requests[f];
    const auto& route = routes[f];
    if (route.flight != req.id || route.resources.size() < 2 || route.resources.front() != req.origin ||
        route.resources.back() != req.destination) {
      throw std::invalid_argument("route does not match flight " + std::to_string(req.id));
    }
    if (auto why = validate_request(grid, horizon, req); !why.empty()) throw std::invalid_argument(why);
    const std::string tag = std::to_string(req.id);
    const std::size_t positions = route.resources.size();
    TfmpBlock block;
    block.start = h0;
    block.w.assign(positions, std::vector<milp::VarId>(horizon.length, -1));
    // Position k cannot be reached before d + (steps needed to get there).
    Timestep earliest = req.departure;
    for (std::size_t k = 0; k < positions; ++k) {
      if (k > 0) earliest += route.dwell[k - 1];
      if (k + 1 == positions) earliest = std::max(earliest, req.arrival);  // no early arrival
      for (Timestep t = std::max(earliest, h0); t <= hl; ++t) {
        block.w[k][t - h0] =
            model.add_binary("w[" + tag + "," + std::to_string(k) + "," + std::to_string(t) + "]");
      }
    }

    for (std::size_t k = 0; k < positions; ++k) {
      for (Timestep t = h0; t <= hl; ++t) {
        const auto v = block.at(k, t);
        if (v < 0) continue;
        if (auto prev = block.at(k, t - 1); prev >= 0) {  // once entered, stays entered
          milp::LinearExpr mono;
          mono.add(v).add(prev, -1.0);
          model.add_constraint(mono, milp::Relation::GreaterEqual, 0, "tfmp_mono_" + tag);
        }
        if (k > 0) {  // cannot enter k before k-1
          milp::LinearExpr order;
          order.add(v);
          if (auto before = block.at(k - 1, t); before >= 0) order.add(before, -1.0);
          model.add_constraint(order, milp::Relation::LessEqual, 0, "tfmp_order_" + tag);
        }
      }
    }
    // Leave the origin after exactly one step.
    for (Timestep t = h0; t <= hl; ++t) {
      milp::LinearExpr lift;
      if (auto v = block.at(1, t); v >= 0) lift.add(v);
      if (auto v = block.at(0, t - 1); v >= 0) lift.add(v, -1.0);
      if (!lift.empty()) model.add_constraint(lift, milp::Relation::Equal, 0, "tfmp_takeoff_" + tag);
    }
    // No departure after d + eps.
    for (Timestep t = std::max(req.departure + req.flexibility + 1, h0 + 1); t <= hl; ++t) {
      milp::LinearExpr freeze;
      freeze.add(block.at(0, t));
      if (auto prev = block.at(0, t - 1); prev >= 0) freeze.add(prev, -1.0);
      model.add_constraint(freeze, milp::Relation::Equal, 0, "tfmp_late_departure_" + tag);
    }
    const auto served = block.at(0, hl);
    const auto landed = block.at(positions - 1, hl);
    milp::LinearExpr finish;  // departed flights land inside the horizon
    if (landed >= 0) finish.add(landed);
    if (served >= 0) finish.add(served, -1.0);
    if (!finish.empty()) model.add_constraint(finish, milp::Relation::Equal, 0, "tfmp_land_" + tag);
    // Minimum dwell in each sector on the route, when served.
    for (std::size_t k = 1; k + 1 < positions; ++k) {
      milp::LinearExpr stay;
      for (Timestep t = h0; t <= hl; ++t) add_presence(stay, block, k, t);
      if (served >= 0) stay.add(served, -static_cast<double>(route.dwell[k]));
      model.add_constraint(stay, milp::Relation::GreaterEqual, 0, "tfmp_dwell_" + tag);
    }

    // Departure and arrival are h0 + number of steps not yet entered.
    auto event_time = [&](std::size_t k) {
      milp::LinearExpr time(static_cast<double>(h0 + horizon.length));
      for (Timestep t = h0; t <= hl; ++t) {
        if (auto v = block.at(k, t); v >= 0) time.add(v, -1.0);
      }
      return time;
    };
    milp::LinearExpr arr = event_time(positions - 1);
    arr += -static_cast<double>(req.arrival);
    arr.scale(params.alpha);
    milp::LinearExpr dep = event_time(0);
    dep += -static_cast<double>(req.departure);
    dep.scale(1.0 - params.alpha);
    objective += arr;
    objective += dep;
    vars.blocks.push_back(std::move(block));
  }

  // Capacity on every resource the routes touch.
  std::map<ResourceTime, milp::LinearExpr> load;
  for (std::size_t f = 0; f < routes.size(); ++f) {
    for (std::size_t k = 0; k < routes[f].resources.size(); ++k) {
      for (Timestep t = h0; t <= hl; ++t) {
        milp::LinearExpr presence;
        add_presence(presence, vars.blocks[f], k, t);
        if (!presence.empty()) load[{routes[f].resources[k], t}] += presence;
      }
    }
  }
  for (const auto& [rt, expr] : load) {
    model.add_constraint(expr, milp::Relation::LessEqual, remaining_capacity(grid, occupancy, rt.resource, rt.t),
                         "tfmp_capacity_" + std::to_string(rt.resource) + "_" + std::to_string(rt.t));
  }
  model.set_objective(milp::Sense::Minimize, objective);
  return vars;
}

}  // namespace

milp::Model build_tfmp_model(const AirspaceGrid& grid, const Occupancy& occupancy, const Horizon& horizon,
                             std::span<const FlightRequest> requests, std::span<const FixedRoute> routes,
                             const DelayCostParams& params) {
  milp::Model model;
  add_tfmp(model, grid, occupancy, horizon, requests, routes, params);
  return model;
}

TfmpResult solve_tfmp(const AirspaceGrid& grid, const Occupancy& occupancy, const Horizon& horizon,
                      std::span<const FlightRequest> requests, std::span<const FixedRoute> routes,
                      const DelayCostParams& params, const milp::Backend& backend,
                      const milp::SolveLimits& limits) {
  TfmpResult out;
  if (requests.empty()) {
    out.status = milp::SolveStatus::Optimal;
    return out;
  }
  milp::Model model;
  const auto vars = add_tfmp(model, grid, occupancy, horizon, requests, routes, params);
  const auto result = milp::solve(model, limits, backend);
  out.status = result.status;
  out.solve_seconds = result.wall_seconds;
  out.diagnostic = result.diagnostic;
  if (!result.has_solution()) {
    for (const auto& req : requests) out.carryovers.push_back(req.id);
    return out;
  }
  for (std::size_t f = 0; f < requests.size(); ++f) {
    const auto& block = vars.blocks[f];
    const auto& route = routes[f];
    const auto served = block.at(0, horizon.last());
    if (served < 0 || !result.is_one(served)) {
      out.carryovers.push_back(requests[f].id);
      out.objective += tfmp_unserved_cost(requests[f], horizon, params);
      continue;
    }
    FlightPlan plan;
    plan.flight = requests[f].id;
    plan.departure = -1;
    for (Timestep t = horizon.start; t <= horizon.last(); ++t) {
      int pos = -1;
      for (std::size_t k = 0; k < route.resources.size(); ++k) {
        if (auto v = block.at(k, t); v >= 0 && result.is_one(v)) pos = static_cast<int>(k);
      }
      if (pos < 0) continue;
      const bool arrived_before = pos == static_cast<int>(route.resources.size()) - 1 &&
                                  block.at(pos, t - 1) >= 0 && result.is_one(block.at(pos, t - 1));
      if (arrived_before) break;
      if (plan.departure < 0) plan.departure = t;
      plan.path.push_back(route.resources[pos]);
    }
    out.total_tdc += tdc(plan, requests[f], params);
    out.plans.push_back(std::move(plan));
  }
  out.objective += out.total_tdc;
  return out;
}

std::vector<std::string> check_route_plan(const Horizon& horizon, const FlightRequest& request,
                                          const FixedRoute& route, const FlightPlan& plan) {
  std::vector<std::string> problems;
  auto fail = [&](const std::string& what) {
    problems.push_back("flight " + std::to_string(request.id) + ": " + what);
  };
  if (plan.path.empty()) {
    fail("empty plan");
    return problems;
  }
  if (plan.departure < request.departure || plan.departure > request.departure + request.flexibility) {
    fail("departure outside [d, d + eps]");
  }
  if (plan.arrival() < request.arrival) fail("arrival before the requested time");
  if (plan.departure < horizon.start || plan.arrival() > horizon.last()) fail("plan leaves the horizon");
  std::vector<std::pair<ResourceId, int>> runs;
  for (ResourceId r : plan.path) {
    if (runs.empty() || runs.back().first != r) {
      runs.emplace_back(r, 1);
    } else {
      ++runs.back().second;
    }
  }
  if (runs.size() != route.resources.size()) {
    fail("plan does not follow the fixed route");
    return problems;
  }
  for (std::size_t k = 0; k < runs.size(); ++k) {
    if (runs[k].first != route.resources[k]) {
      fail("plan does not follow the fixed route");
      return problems;
    }
    const bool endpoint = k == 0 || k + 1 == runs.size();
    if (endpoint && runs[k].second != 1) fail("vertiport held for more than one step");
    if (!endpoint && runs[k].second < route.dwell[k]) fail("sector held shorter than minimum dwell");
  }
  return problems;
}

}  // namespace coplan
