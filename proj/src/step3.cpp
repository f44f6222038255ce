#include "coplan/step3.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>

#include "coplan/detail/plan_block.hpp"

namespace coplan {

ConflictReport detect_conflicts(const AirspaceGrid& grid, const Occupancy& occupancy,
                                std::span<const FlightPlan> proposals) {
  std::map<ResourceTime, std::vector<FlightId>> users;
  for (const auto& plan : proposals) {
    for (const auto& rt : plan.occupancies()) users[rt].push_back(plan.flight);
  }
  ConflictReport report;
  std::set<FlightId> conflicting;
  for (const auto& [rt, flights] : users) {
    const int demand = occupancy.at(rt.resource, rt.t) + static_cast<int>(flights.size());
    const int cap = grid.capacity(rt.resource, rt.t);
    if (demand <= cap) continue;
    if (grid.is_managed(rt.resource)) {
      throw InvariantViolation("proposals overload managed resource " + std::to_string(rt.resource) + " at t=" +
                               std::to_string(rt.t));
    }
    report.cells.push_back({rt.resource, rt.t, demand, cap});
    conflicting.insert(flights.begin(), flights.end());
  }
  for (const auto& plan : proposals) {
    (conflicting.contains(plan.flight) ? report.conflicting : report.clean).push_back(plan.flight);
  }
  return report;
}

double fairness_value(std::span<const FlightPlan> before, std::span<const FlightPlan> after) {
  if (before.size() != after.size()) throw std::invalid_argument("fairness: plan lists differ in size");
  std::unordered_map<FlightId, int> proposed;
  for (const auto& p : before) {
    const int l = path_length(p);
    if (l < 1) throw std::invalid_argument("fairness: empty proposed plan for flight " + std::to_string(p.flight));
    if (!proposed.emplace(p.flight, l).second) throw std::invalid_argument("fairness: duplicate flight id");
  }
  if (after.empty()) return 0.0;
  double hi = 0.0, lo = 0.0;
  bool first = true;
  for (const auto& p : after) {
    auto it = proposed.find(p.flight);
    if (it == proposed.end()) throw std::invalid_argument("fairness: flight " + std::to_string(p.flight) + " has no proposal");
    const double rho = static_cast<double>(path_length(p)) / it->second;
    hi = first ? rho : std::max(hi, rho);
    lo = first ? rho : std::min(lo, rho);
    first = false;
  }
  return hi - lo;
}

namespace {

struct Step3Vars {
  std::vector<detail::PlanBlock> blocks;
  milp::VarId f_max = -1;
  milp::VarId f_min = -1;
};

Step3Vars add_step3(milp::Model& model, const AirspaceGrid& grid, const Occupancy& occupancy,
                    const Horizon& horizon, std::span<const DeconflictionInput> flights,
                    const FairnessParams& params) {
  Step3Vars vars;
  milp::LinearExpr objective;
  for (const auto& in : flights) {
    vars.blocks.push_back(detail::add_plan_block(model, grid, occupancy, horizon, in.request, in.choices,
                                                 std::to_string(in.request.id), true));
    objective += detail::tdc_expr(vars.blocks.back(), in.request, params.alpha);
  }

  // Fairness spread: F_max >= rho_f >= F_min with rho_f linear because the
  // proposed path length is a constant here.
  constexpr double kRatioBound = 1e4;
  vars.f_max = model.add_continuous("F_max", 0.0, kRatioBound);
  vars.f_min = model.add_continuous("F_min", 0.0, kRatioBound);
  for (std::size_t f = 0; f < flights.size(); ++f) {
    const double inv_len = 1.0 / path_length(flights[f].proposal);
    const std::string tag = std::to_string(flights[f].request.id);
    milp::LinearExpr rho = vars.blocks[f].path_length;
    rho.scale(inv_len);
    milp::LinearExpr upper;  // F_max - rho >= 0
    upper.add(vars.f_max);
    upper += milp::LinearExpr(rho).scale(-1.0);
    model.add_constraint(upper, milp::Relation::GreaterEqual, 0, "fair_max_" + tag);
    milp::LinearExpr lower;  // F_min - rho <= 0
    lower.add(vars.f_min);
    lower += milp::LinearExpr(rho).scale(-1.0);
    model.add_constraint(lower, milp::Relation::LessEqual, 0, "fair_min_" + tag);
  }
  objective.add(vars.f_max, params.gamma);
  objective.add(vars.f_min, -params.gamma);

  // Joint en-route capacity.
  std::map<ResourceTime, milp::LinearExpr> load;
  for (const auto& block : vars.blocks) {
    block.presence.for_each([&](ResourceId r, Timestep t, milp::VarId v) {
      if (grid.is_en_route(r)) load[{r, t}].add(v);
    });
  }
  for (const auto& [rt, expr] : load) {
    const int rem = remaining_capacity(grid, occupancy, rt.resource, rt.t);
    if (static_cast<int>(expr.terms().size()) <= rem) continue;  // cannot bind
    model.add_constraint(expr, milp::Relation::LessEqual, rem,
                         "joint_capacity_" + std::to_string(rt.resource) + "_" + std::to_string(rt.t));
  }
  model.set_objective(milp::Sense::Minimize, objective);
  return vars;
}

}  // namespace

milp::Model build_step3_model(const AirspaceGrid& grid, const Occupancy& occupancy, const Horizon& horizon,
                              std::span<const DeconflictionInput> flights, const FairnessParams& params) {
  milp::Model model;
  add_step3(model, grid, occupancy, horizon, flights, params);
  return model;
}

DeconflictionResult solve_step3(const AirspaceGrid& grid, const Occupancy& occupancy, const Horizon& horizon,
                                std::span<const DeconflictionInput> flights, const FairnessParams& params,
                                const milp::Backend& backend, const milp::SolveLimits& limits) {
  if (flights.empty()) throw std::invalid_argument("step 3 needs at least one conflicting flight");
  if (params.gamma < 0) throw std::invalid_argument("gamma must be >= 0");
  DeconflictionResult out;
  out.exact = true;
  std::vector<DeconflictionInput> active(flights.begin(), flights.end());
  std::vector<std::size_t> positions(flights.size());
  for (std::size_t i = 0; i < positions.size(); ++i) positions[i] = i;

  while (!active.empty()) {
    milp::Model model;
    const auto vars = add_step3(model, grid, occupancy, horizon, active, params);
    const auto result = milp::solve(model, limits, backend);
    ++out.solves;
    out.solve_seconds += result.wall_seconds;
    out.status = result.status;
    if (result.status != milp::SolveStatus::Optimal && result.status != milp::SolveStatus::Infeasible) {
      out.exact = false;
    }

    if (result.has_solution()) {
      std::vector<FlightPlan> proposals;
      for (std::size_t f = 0; f < active.size(); ++f) {
        out.plans.push_back(detail::extract_plan(vars.blocks[f], result, active[f].request.id));
        proposals.push_back(active[f].proposal);
        out.ratios.push_back(static_cast<double>(path_length(out.plans.back())) /
                             path_length(active[f].proposal));
        out.total_tdc += tdc(out.plans.back(), active[f].request, {params.alpha});
      }
      out.fairness = fairness_value(proposals, out.plans);
      out.objective = out.total_tdc + params.gamma * out.fairness;
      out.solver_objective = result.objective;
      return out;
    }
    if (result.status != milp::SolveStatus::Infeasible) {
      out.diagnostic = result.diagnostic;
      for (const auto& in : active) out.carryovers.push_back(in.request.id);
      return out;
    }
    // Drop the most recently requested flight and retry.
    std::size_t victim = 0;
    for (std::size_t i = 1; i < active.size(); ++i) {
      const auto& a = active[i].request;
      const auto& b = active[victim].request;
      if (a.resubmissions < b.resubmissions || (a.resubmissions == b.resubmissions && positions[i] > positions[victim])) {
        victim = i;
      }
    }
    out.carryovers.push_back(active[victim].request.id);
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(victim));
    positions.erase(positions.begin() + static_cast<std::ptrdiff_t>(victim));
  }
  out.status = milp::SolveStatus::Infeasible;
  return out;
}

}  // namespace coplan
