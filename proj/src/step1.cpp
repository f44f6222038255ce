#include "coplan/step1.hpp"

#include <chrono>
#include <sstream>
#include <unordered_map>

#include "coplan/detail/var_index.hpp"

namespace coplan {

std::vector<Timestep> ChoiceSet::departure_slots() const {
  std::vector<Timestep> out;
  for (const auto& rt : choices) {
    if (rt.resource == origin) out.push_back(rt.t);
  }
  return out;
}

std::vector<Timestep> ChoiceSet::arrival_slots() const {
  std::vector<Timestep> out;
  for (const auto& rt : choices) {
    if (rt.resource == destination) out.push_back(rt.t);
  }
  return out;
}

std::string validate_request(const AirspaceGrid& grid, const Horizon& horizon, const FlightRequest& request) {
  std::ostringstream os;
  os << "flight " << request.id << ": ";
  if (request.origin < 0 || request.origin >= grid.size() || request.destination < 0 ||
      request.destination >= grid.size()) {
    os << "unknown origin or destination";
  } else if (!grid.is_vertiport(request.origin) || !grid.is_vertiport(request.destination)) {
    os << "origin and destination must be vertiports";
  } else if (request.origin == request.destination) {
    os << "origin equals destination";
  } else if (request.departure >= request.arrival) {
    os << "requested departure is not before requested arrival";
  } else if (request.flexibility < 0) {
    os << "negative flexibility window";
  } else if (request.departure < horizon.start) {
    os << "requested departure precedes the planning horizon";
  } else if (request.window_end() > horizon.last()) {
    os << "arrival window ends outside the planning horizon";
  } else {
    for (const auto& [r, l] : request.dwell) {
      if (l < 1) {
        os << "minimum dwell below 1 at resource " << r;
        return os.str();
      }
    }
    return {};
  }
  return os.str();
}

bool in_choice_domain(const AirspaceGrid& grid, const FlightRequest& request, ResourceId r) {
  return grid.is_vertiport_adjacent(r) || r == request.origin || r == request.destination;
}

namespace {

// Steps in which a flight may hold any choice: [d, a + eps - 1] within the
// horizon. Variables outside it are not created, which is how the "no
// operation outside scheduled intervals" rows are enforced.
detail::TimeWindow choice_window(const Horizon& horizon, const FlightRequest& f) {
  return {std::max(f.departure, horizon.start), std::min(f.window_end() - 1, horizon.last())};
}

struct Step1Vars {
  std::vector<detail::VarIndex> c;  // per flight
};

Step1Vars add_step1(milp::Model& model, const AirspaceGrid& grid, const Occupancy& occupancy,
                    const Horizon& horizon, std::span<const FlightRequest> requests) {
  Step1Vars vars;
  const double big_m = horizon.length + 1;
  model.set_big_m(big_m);
  milp::LinearExpr objective;

  std::vector<ResourceId> domain;
  for (ResourceId r : grid.vertiport_adjacent()) domain.push_back(r);

  for (std::size_t f = 0; f < requests.size(); ++f) {
    const auto& req = requests[f];
    auto& c = vars.c.emplace_back();
    const auto window = choice_window(horizon, req);
    std::vector<ResourceId> resources = domain;
    resources.push_back(req.origin);
    resources.push_back(req.destination);
    std::sort(resources.begin(), resources.end());
    resources.erase(std::unique(resources.begin(), resources.end()), resources.end());
    for (ResourceId r : resources) {
      for (Timestep t = window.first; t <= window.last; ++t) {
        const auto v = model.add_binary("c[" + std::to_string(f) + "," + std::to_string(r) + "," + std::to_string(t) + "]");
        c.set(r, t, v);
        objective.add(v);
      }
    }

    const std::string tag = std::to_string(req.id);
    // Departure slots only in [d, d + eps], arrival slots only in [a, a + eps].
    milp::LinearExpr early_dep, late_dep, early_arr, late_arr;
    for (Timestep t = window.first; t <= window.last; ++t) {
      if (t < req.departure) early_dep.add(c.at(req.origin, t));
      if (t > req.departure + req.flexibility) late_dep.add(c.at(req.origin, t));
      if (t < req.arrival) early_arr.add(c.at(req.destination, t));
      if (t > req.arrival + req.flexibility) late_arr.add(c.at(req.destination, t));
    }
    model.add_constraint(early_dep, milp::Relation::Equal, 0, "early_departure_" + tag);
    model.add_constraint(late_dep, milp::Relation::Equal, 0, "late_departure_" + tag);
    model.add_constraint(early_arr, milp::Relation::Equal, 0, "early_arrival_" + tag);
    model.add_constraint(late_arr, milp::Relation::Equal, 0, "late_arrival_" + tag);

    // A departure slot needs an adjacent choice on the next step:
    // M (1 - c[s,t]) >= 1 - sum c[r,t+1].
    for (Timestep t = req.departure; t <= req.departure + req.flexibility; ++t) {
      const auto slot = c.find(req.origin, t);
      if (slot < 0) continue;
      milp::LinearExpr lhs;
      lhs.add(slot, big_m);
      for (ResourceId r : grid.neighbors(req.origin)) {
        if (auto v = c.find(r, t + 1); v >= 0) lhs.add(v, -1.0);
      }
      model.add_constraint(lhs, milp::Relation::LessEqual, big_m - 1, "departure_exit_" + tag);
    }
    // An arrival slot needs an adjacent choice on the previous step.
    for (Timestep t = req.arrival; t <= req.arrival + req.flexibility; ++t) {
      const auto slot = c.find(req.destination, t);
      if (slot < 0) continue;
      milp::LinearExpr lhs;
      lhs.add(slot, big_m);
      for (ResourceId r : grid.neighbors(req.destination)) {
        if (auto v = c.find(r, t - 1); v >= 0) lhs.add(v, -1.0);
      }
      model.add_constraint(lhs, milp::Relation::LessEqual, big_m - 1, "arrival_approach_" + tag);
    }

    // Minimum dwell on vertiport-adjacent sectors. A[r,t] = 1 iff fewer than
    // l of the previous l steps offer r; then an offer at t-1 must continue.
    // History before the window is empty, and l = 1 never binds.
    for (ResourceId r : domain) {
      const int l = req.min_dwell(r);
      if (l <= 1) continue;
      for (Timestep t = window.first + 1; t <= window.last + 1 && t <= horizon.last(); ++t) {
        const auto a = model.add_binary("A1[" + std::to_string(f) + "," + std::to_string(r) + "," + std::to_string(t) + "]");
        milp::LinearExpr recent;
        for (Timestep k = std::max(t - l, window.first); k <= t - 1; ++k) recent.add(c.at(r, k));
        milp::LinearExpr force_one = recent;  // M A + sum >= l
        force_one.add(a, big_m);
        model.add_constraint(force_one, milp::Relation::GreaterEqual, l, "dwell_flag_on_" + tag);
        milp::LinearExpr force_zero = recent;  // M A + sum <= M + l - 1
        force_zero.add(a, big_m);
        model.add_constraint(force_zero, milp::Relation::LessEqual, big_m + l - 1, "dwell_flag_off_" + tag);
        milp::LinearExpr stay;  // c[t] - c[t-1] - A >= -1
        if (auto now = c.find(r, t); now >= 0) stay.add(now);
        stay.add(c.at(r, t - 1), -1.0);
        stay.add(a, -1.0);
        model.add_constraint(stay, milp::Relation::GreaterEqual, -1, "dwell_hold_" + tag);
      }
    }
  }

  // Joint capacity on managed resources.
  std::vector<ResourceId> managed(domain);
  for (ResourceId v : grid.vertiports()) managed.push_back(v);
  std::sort(managed.begin(), managed.end());
  for (ResourceId r : managed) {
    for (Timestep t = horizon.start; t <= horizon.last(); ++t) {
      milp::LinearExpr load;
      for (const auto& c : vars.c) {
        if (auto v = c.find(r, t); v >= 0) load.add(v);
      }
      if (load.empty()) continue;
      model.add_constraint(load, milp::Relation::LessEqual, remaining_capacity(grid, occupancy, r, t),
                           "capacity_" + std::to_string(r) + "_" + std::to_string(t));
    }
  }

  model.set_objective(milp::Sense::Maximize, objective);
  return vars;
}

}  // namespace

milp::Model build_step1_model(const AirspaceGrid& grid, const Occupancy& occupancy, const Horizon& horizon,
                              std::span<const FlightRequest> requests) {
  milp::Model model;
  add_step1(model, grid, occupancy, horizon, requests);
  return model;
}

Step1Result solve_step1(const AirspaceGrid& grid, const Occupancy& occupancy, const Horizon& horizon,
                        std::span<const FlightRequest> requests, const milp::Backend& backend,
                        const milp::SolveLimits& limits) {
  Step1Result out;
  for (const auto& req : requests) {
    if (auto err = validate_request(grid, horizon, req); !err.empty()) throw std::invalid_argument(err);
  }
  milp::Model model;
  const auto vars = add_step1(model, grid, occupancy, horizon, requests);
  const auto result = milp::solve(model, limits, backend);
  out.status = result.status;
  out.solve_seconds = result.wall_seconds;
  out.diagnostic = result.diagnostic;
  if (!result.has_solution()) {
    if (result.status == milp::SolveStatus::Infeasible) {
      out.diagnostic = "step 1 reported infeasible; the all-zero assignment should always be feasible";
    }
    return out;
  }
  out.objective = result.objective;
  for (std::size_t f = 0; f < requests.size(); ++f) {
    const auto& req = requests[f];
    ChoiceSet cs{req.id, req.origin, req.destination, {}};
    vars.c[f].for_each([&](ResourceId r, Timestep t, milp::VarId v) {
      if (result.is_one(v)) cs.choices.insert({r, t});
    });
    if (cs.departure_slots().empty()) {
      out.unassigned.push_back(req.id);
      cs.choices.clear();
    }
    out.choice_sets.push_back(std::move(cs));
  }
  return out;
}

std::vector<std::string> check_choice_set(const AirspaceGrid& grid, const Horizon& horizon,
                                          const FlightRequest& req, const ChoiceSet& cs) {
  std::vector<std::string> problems;
  auto fail = [&](const std::string& what, ResourceId r, Timestep t) {
    problems.push_back("flight " + std::to_string(req.id) + " " + what + " at (r=" + std::to_string(r) +
                       ",t=" + std::to_string(t) + ")");
  };
  if (cs.flight != req.id) problems.push_back("choice set belongs to another flight");
  const Timestep first = std::max(req.departure, horizon.start);
  const Timestep last = std::min(req.window_end() - 1, horizon.last());
  for (const auto& [r, t] : cs.choices) {
    if (!in_choice_domain(grid, req, r)) fail("choice outside managed resources", r, t);
    if (t < req.departure || t >= req.window_end()) fail("choice outside scheduled interval", r, t);
    if (!horizon.contains(t)) fail("choice outside horizon", r, t);
    if (r == req.origin && (t < req.departure || t > req.departure + req.flexibility)) {
      fail("departure slot outside window", r, t);
    }
    if (r == req.destination && (t < req.arrival || t > req.arrival + req.flexibility)) {
      fail("arrival slot outside window", r, t);
    }
    if (r == req.origin) {
      bool exit = false;
      for (ResourceId n : grid.neighbors(r)) exit = exit || cs.offers(n, t + 1);
      if (!exit) fail("departure slot without adjacent choice afterwards", r, t);
    }
    if (r == req.destination) {
      bool approach = false;
      for (ResourceId n : grid.neighbors(r)) approach = approach || cs.offers(n, t - 1);
      if (!approach) fail("arrival slot without adjacent approach choice", r, t);
    }
  }
  for (ResourceId r : grid.vertiport_adjacent()) {
    auto held = [&](Timestep t) { return cs.offers(r, t); };
    if (!dwell_satisfied(held, req.min_dwell(r), first, last)) fail("choice run shorter than minimum dwell", r, first);
  }
  return problems;
}

std::vector<std::string> check_choice_sets(const AirspaceGrid& grid, const Occupancy& occupancy,
                                           const Horizon& horizon, std::span<const FlightRequest> requests,
                                           std::span<const ChoiceSet> choice_sets) {
  std::vector<std::string> problems;
  if (requests.size() != choice_sets.size()) {
    problems.push_back("choice sets not aligned with requests");
    return problems;
  }
  std::unordered_map<ResourceTime, int> load;
  for (std::size_t f = 0; f < requests.size(); ++f) {
    auto p = check_choice_set(grid, horizon, requests[f], choice_sets[f]);
    problems.insert(problems.end(), p.begin(), p.end());
    for (const auto& rt : choice_sets[f].choices) ++load[rt];
  }
  for (const auto& [rt, n] : load) {
    if (n > remaining_capacity(grid, occupancy, rt.resource, rt.t)) {
      problems.push_back("choices exceed remaining capacity at (r=" + std::to_string(rt.resource) +
                         ",t=" + std::to_string(rt.t) + ")");
    }
  }
  return problems;
}

}  // namespace coplan
