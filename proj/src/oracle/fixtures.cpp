#include "coplan/fixtures.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include "coplan/baseline.hpp"
#include "coplan/step2.hpp"

namespace coplan::oracle {

namespace {

FlightRequest make_request(FlightId id, ResourceId s, ResourceId e, Timestep d, Timestep a, int eps) {
  FlightRequest r;
  r.id = id;
  r.op = static_cast<OperatorId>(id % 3);
  r.origin = s;
  r.destination = e;
  r.departure = d;
  r.arrival = a;
  r.flexibility = eps;
  r.original_departure = d;
  r.original_arrival = a;
  return r;
}

GridConfig corridor_grid(int cols, int horizon) {
  GridConfig g;
  g.rows = 1;
  g.cols = cols;
  g.horizon_steps = horizon;
  g.sector_capacity = 1;
  g.vertiport_adjacent_capacity = 3;
  g.vertiports = {{{0, 0}, VertiportKind::Hub, 2}, {{0, cols - 1}, VertiportKind::Vertistop, 2}};
  return g;
}

}  // namespace

TinyInstance corridor_instance() {
  TinyInstance inst;
  inst.name = "corridor";
  inst.grid = corridor_grid(3, 4);
  inst.horizon = {0, 4};
  inst.requests = {make_request(1, 0, 2, 0, 2, 1)};
  return inst;
}

TinyInstance blocked_corridor_instance() {
  TinyInstance inst = corridor_instance();
  inst.name = "blocked_corridor";
  inst.grid.capacity_overrides = {{{0, 1}, 0, 3, 0}};
  return inst;
}

TinyInstance shared_corridor_instance() {
  TinyInstance inst;
  inst.name = "shared_corridor";
  inst.grid = corridor_grid(5, 10);
  inst.horizon = {0, 10};
  inst.requests = {make_request(1, 0, 4, 0, 4, 2), make_request(2, 0, 4, 0, 4, 2)};
  return inst;
}

std::vector<TinyInstance> fairness_fixtures(int count, std::uint64_t seed) {
  // Seeded search for two-flight instances whose proposals conflict and whose
  // joint optimum reacts to gamma. Tight windows (eps <= 2) and dwell-2
  // sectors make equal-time routes with different entry counts common.
  std::vector<TinyInstance> out;
  std::mt19937_64 rng(seed);
  auto uniform = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  const Horizon h{0, 10};
  const Rational alpha(3, 10);
  while (static_cast<int>(out.size()) < count) {
    GridConfig g;
    g.rows = uniform(3, 4);
    g.cols = 4;
    g.horizon_steps = h.length;
    g.sector_capacity = 1;
    g.vertiport_adjacent_capacity = 2;
    g.connectivity = uniform(0, 1) ? Connectivity::Diagonal8 : Connectivity::Orthogonal4;
    std::vector<CellIndex> cells;
    for (int r = 0; r < g.rows; ++r) {
      for (int c = 0; c < g.cols; ++c) cells.push_back({r, c});
    }
    std::shuffle(cells.begin(), cells.end(), rng);
    const int ports = uniform(2, 3);
    for (int i = 0; i < ports; ++i) g.vertiports.push_back({cells[i], VertiportKind::Hub, 2});
    const AirspaceGrid grid(g);

    std::vector<FlightRequest> requests;
    for (int f = 0; f < 2; ++f) {
      const auto vp = grid.vertiports();
      const int si = uniform(0, ports - 1);
      int ei = uniform(0, ports - 2);
      if (ei >= si) ++ei;
      auto req = make_request(f + 1, vp[si], vp[ei], uniform(0, 1), 0, uniform(1, 2));
      for (ResourceId r = 0; r < grid.size(); ++r) {
        if (!grid.is_vertiport(r) && uniform(0, 2) == 0) req.dwell[r] = 2;
      }
      if (f == 1 && uniform(0, 1) == 1) req.origin = requests[0].origin;
      if (req.origin == req.destination) break;
      try {
        req.arrival = req.departure + min_travel_time(grid, req);
      } catch (const std::runtime_error&) {
        break;
      }
      if (!validate_request(grid, h, req).empty()) break;
      requests.push_back(req);
    }
    if (requests.size() != 2) continue;

    const Occupancy empty;
    std::vector<DeconflictionInput> joint;
    Occupancy proposed;
    for (const auto& req : requests) {
      const auto cs = full_choice_set(grid, empty, h, req);
      const auto best = step2_optimum(grid, empty, h, req, cs, alpha);
      if (!best.plan) break;
      joint.push_back({req, cs, *best.plan});
      proposed.add(*best.plan);
    }
    if (joint.size() != 2 || overloaded_cells(grid, proposed).empty()) continue;
    const auto plain = oracle_joint_optimum(grid, empty, h, joint, alpha, Rational(0));
    const auto fair = oracle_joint_optimum(grid, empty, h, joint, alpha, Rational(5));
    if (!plain.feasible || (plain.fairness == fair.fairness && fair.fairness == Rational(0) &&
                            plain.total_tdc == fair.total_tdc)) {
      continue;
    }
    TinyInstance inst;
    inst.name = "fairness_" + std::to_string(out.size());
    inst.grid = g;
    inst.horizon = h;
    inst.requests = requests;
    out.push_back(std::move(inst));
  }
  return out;
}

std::vector<TinyInstance> tiny_fixtures(int random_count, std::uint64_t seed) {
  std::vector<TinyInstance> out{corridor_instance(), blocked_corridor_instance(), shared_corridor_instance()};
  for (auto& inst : fairness_fixtures(8, seed + 1)) out.push_back(std::move(inst));
  std::mt19937_64 rng(seed);
  auto uniform = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };

  int made = 0;
  while (made < random_count) {
    TinyInstance inst;
    GridConfig g;
    g.rows = uniform(2, 4);
    g.cols = uniform(3, 4);
    g.connectivity = uniform(0, 3) == 0 ? Connectivity::Diagonal8 : Connectivity::Orthogonal4;
    g.horizon_steps = uniform(7, 10);
    g.sector_capacity = 1;
    g.vertiport_adjacent_capacity = uniform(1, 2);
    const int n_ports = g.rows * g.cols >= 12 ? uniform(2, 3) : 2;
    std::vector<CellIndex> cells;
    for (int r = 0; r < g.rows; ++r) {
      for (int c = 0; c < g.cols; ++c) cells.push_back({r, c});
    }
    std::shuffle(cells.begin(), cells.end(), rng);
    if (uniform(0, 1) == 1) {
      // Opposite corners first, which leaves en-route sectors in between.
      const CellIndex a{0, 0}, b{g.rows - 1, g.cols - 1};
      std::erase(cells, a);
      std::erase(cells, b);
      cells.insert(cells.begin(), {a, b});
    }
    for (int i = 0; i < n_ports; ++i) {
      g.vertiports.push_back({cells[i], i == 0 ? VertiportKind::Hub : VertiportKind::Vertistop, uniform(1, 2)});
    }
    if (uniform(0, 1) == 1) {
      const auto closed = cells[n_ports + uniform(0, static_cast<int>(cells.size()) - n_ports - 1)];
      const int from = uniform(0, g.horizon_steps - 1);
      g.capacity_overrides.push_back({closed, from, std::min(g.horizon_steps - 1, from + uniform(0, 3)), 0});
    }
    inst.grid = g;
    inst.horizon = {0, g.horizon_steps};

    std::unique_ptr<AirspaceGrid> grid;
    try {
      grid = std::make_unique<AirspaceGrid>(g);
    } catch (const ConfigError&) {
      continue;
    }
    const int flights = uniform(1, 2);
    bool ok = true;
    for (int f = 0; f < flights && ok; ++f) {
      const auto ports = grid->vertiports();
      const int si = uniform(0, static_cast<int>(ports.size()) - 1);
      int ei = uniform(0, static_cast<int>(ports.size()) - 2);
      if (ei >= si) ++ei;
      auto req = make_request(f + 1, ports[si], ports[ei], uniform(0, 1), 0, uniform(1, 2));
      if (f == 1 && uniform(0, 1) == 1) {  // same trip as the first flight: forces contention
        req.origin = inst.requests[0].origin;
        req.destination = inst.requests[0].destination;
        req.departure = inst.requests[0].departure;
      }
      for (ResourceId r = 0; r < grid->size(); ++r) {
        if (!grid->is_vertiport(r) && uniform(0, 3) == 0) req.dwell[r] = 2;
      }
      try {
        req.arrival = req.departure + min_travel_time(*grid, req) + uniform(0, 1);
      } catch (const std::runtime_error&) {
        ok = false;
        break;
      }
      if (!validate_request(*grid, inst.horizon, req).empty()) ok = false;
      inst.requests.push_back(req);
    }
    if (!ok) continue;
    std::ostringstream name;
    name << "random_" << made << "_" << g.rows << "x" << g.cols << "_T" << g.horizon_steps;
    inst.name = name.str();
    out.push_back(std::move(inst));
    ++made;
  }
  return out;
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

}  // namespace

std::vector<EquivalenceCheck> check_equivalence(const TinyInstance& inst, const milp::Backend& backend, double alpha,
                                                const std::vector<double>& gammas) {
  std::vector<EquivalenceCheck> checks;
  const AirspaceGrid grid(inst.grid);
  const auto occupancy = inst.occupancy(grid);
  const auto& h = inst.horizon;
  const auto exact_alpha = Rational::from_decimal(alpha);
  const milp::SolveLimits limits{120.0, 0.0};
  auto record = [&](std::string what, bool pass, std::string detail) {
    checks.push_back({inst.name, std::move(what), pass, std::move(detail)});
  };

  {
    const auto solved = solve_step1(grid, occupancy, h, inst.requests, backend, limits);
    const auto best = step1_optimum(grid, occupancy, h, inst.requests);
    const auto problems = solved.choice_sets.empty()
                              ? std::vector<std::string>{"no choice sets"}
                              : check_choice_sets(grid, occupancy, h, inst.requests, solved.choice_sets);
    const bool pass = solved.status == milp::SolveStatus::Optimal && problems.empty() &&
                      matches(solved.objective, Rational(best.total_choices));
    record("step1", pass,
           "solver=" + fmt(solved.objective) + " oracle=" + std::to_string(best.total_choices) +
               (problems.empty() ? "" : " check: " + problems.front()));
  }

  std::vector<DeconflictionInput> joint;
  for (std::size_t f = 0; f < inst.requests.size(); ++f) {
    const auto& req = inst.requests[f];
    const auto cs = inst.choices_for(grid, f);
    const std::string what = "step2 f=" + std::to_string(req.id);
    const auto best = step2_optimum(grid, occupancy, h, req, cs, exact_alpha);
    if (cs.empty()) {
      record(what, !best.plan, "empty choice set");
      continue;
    }
    const auto solved = solve_step2(grid, occupancy, h, req, cs, {alpha}, backend, limits);
    if (!best.plan || !solved.plan) {
      record(what, !best.plan && solved.status == milp::SolveStatus::Infeasible,
             std::string("oracle ") + (best.plan ? "feasible" : "infeasible") + ", solver " +
                 milp::to_string(solved.status));
      continue;
    }
    const auto got = exact_tdc(*solved.plan, req, exact_alpha);
    const auto problems = check_plan(grid, occupancy, h, req, cs, *solved.plan);
    record(what, got == best.tdc && problems.empty() && matches(solved.tdc, best.tdc),
           "solver=" + got.str() + " oracle=" + best.tdc.str() + " plans=" + std::to_string(best.feasible_plans) +
               (problems.empty() ? "" : " check: " + problems.front()));
    joint.push_back({req, cs, *best.plan});
  }

  if (!joint.empty()) {
    for (double gamma : gammas) {
      const std::string what = "step3 gamma=" + fmt(gamma);
      const auto exact_gamma = Rational::from_decimal(gamma);
      const auto solved = solve_step3(grid, occupancy, h, joint, {gamma, alpha}, backend, limits);
      const auto best = oracle_joint_optimum(grid, occupancy, h, joint, exact_alpha, exact_gamma);
      if (!best.feasible) {
        record(what, !solved.carryovers.empty(), "oracle infeasible, solver dropped " +
                                                      std::to_string(solved.carryovers.size()));
        continue;
      }
      if (!solved.carryovers.empty() || solved.plans.size() != joint.size()) {
        record(what, false, "solver dropped flights the oracle serves: " + solved.diagnostic);
        continue;
      }
      Rational total;
      std::vector<FlightPlan> proposals;
      bool plans_ok = true;
      Occupancy overlay = occupancy;
      for (std::size_t f = 0; f < joint.size(); ++f) {
        total = total + exact_tdc(solved.plans[f], joint[f].request, exact_alpha);
        proposals.push_back(joint[f].proposal);
        plans_ok = plans_ok && check_plan(grid, occupancy, h, joint[f].request, joint[f].choices, solved.plans[f],
                                          {.en_route_capacity = false})
                                   .empty();
        overlay.add(solved.plans[f]);
      }
      for (const auto& rt : overloaded_cells(grid, overlay)) plans_ok = plans_ok && !grid.is_en_route(rt.resource);
      const auto got = total + exact_gamma * exact_fairness(proposals, solved.plans);
      record(what, plans_ok && got == best.objective && matches(solved.objective, best.objective),
             "solver=" + got.str() + " oracle=" + best.objective.str() + " combos=" +
                 std::to_string(best.combinations) + (plans_ok ? "" : " plan check failed"));
    }
  }

  {
    std::vector<FixedRoute> routes;
    for (const auto& req : inst.requests) routes.push_back(fixed_route(grid, req));
    const auto solved = solve_tfmp(grid, occupancy, h, inst.requests, routes, {alpha}, backend, limits);
    const auto best = tfmp_optimum(grid, occupancy, h, inst.requests, routes, exact_alpha);
    Rational got;
    bool plans_ok = solved.status == milp::SolveStatus::Optimal;
    Occupancy overlay = occupancy;
    const Rational never(h.last() + 1);
    for (std::size_t f = 0; f < inst.requests.size(); ++f) {
      const auto& req = inst.requests[f];
      auto it = std::find_if(solved.plans.begin(), solved.plans.end(),
                             [&](const FlightPlan& p) { return p.flight == req.id; });
      if (it == solved.plans.end()) {
        got = got + exact_alpha * (never - Rational(req.arrival)) +
              (Rational(1) - exact_alpha) * (never - Rational(req.departure));
        continue;
      }
      got = got + exact_tdc(*it, req, exact_alpha);
      plans_ok = plans_ok && check_route_plan(h, req, routes[f], *it).empty();
      overlay.add(*it);
    }
    plans_ok = plans_ok && overloaded_cells(grid, overlay).empty();
    record("tfmp", plans_ok && got == best.objective && matches(solved.objective, best.objective),
           "solver=" + got.str() + " oracle=" + best.objective.str() + (plans_ok ? "" : " plan check failed"));
  }
  return checks;
}

}  // namespace coplan::oracle
