#include "coplan/detail/plan_block.hpp"

#include <algorithm>

namespace coplan::detail {

namespace {

std::string var_name(const char* kind, const std::string& tag, ResourceId r, Timestep t) {
  return std::string(kind) + "[" + tag + "," + std::to_string(r) + "," + std::to_string(t) + "]";
}

}  // namespace

PlanBlock add_plan_block(milp::Model& model, const AirspaceGrid& grid, const Occupancy& occupancy,
                         const Horizon& horizon, const FlightRequest& req, const ChoiceSet& choices,
                         const std::string& tag, bool with_entries) {
  PlanBlock block;
  block.window = {std::max(req.departure, horizon.start), std::min(req.window_end() - 1, horizon.last())};
  const double big_m = horizon.length + 1;
  model.set_big_m(big_m);
  auto& u = block.presence;

  for (ResourceId r = 0; r < grid.size(); ++r) {
    for (Timestep t = block.window.first; t <= block.window.last; ++t) {
      const bool allowed = grid.is_managed(r) ? choices.offers(r, t)
                                              : remaining_capacity(grid, occupancy, r, t) >= 1;
      if (allowed) u.set(r, t, model.add_binary(var_name("u", tag, r, t)));
    }
  }

  // Exactly one origin slot and one destination slot.
  milp::LinearExpr origin_once, destination_once;
  for (Timestep t = block.window.first; t <= block.window.last; ++t) {
    if (auto v = u.find(req.origin, t); v >= 0) {
      origin_once.add(v);
      block.departure_time.add(v, t);
    }
    if (auto v = u.find(req.destination, t); v >= 0) {
      destination_once.add(v);
      block.arrival_time.add(v, t);
    }
  }
  model.add_constraint(origin_once, milp::Relation::Equal, 1, "one_origin_slot_" + tag);
  model.add_constraint(destination_once, milp::Relation::Equal, 1, "one_destination_slot_" + tag);

  // Consecutive resources are identical or adjacent; everything except the
  // origin needs a predecessor on the previous step.
  u.for_each([&](ResourceId r, Timestep t, milp::VarId v) {
    if (r == req.origin) return;
    milp::LinearExpr lhs;
    lhs.add(v);
    if (auto prev = u.find(r, t - 1); prev >= 0) lhs.add(prev, -1.0);
    for (ResourceId n : grid.neighbors(r)) {
      if (auto prev = u.find(n, t - 1); prev >= 0) lhs.add(prev, -1.0);
    }
    model.add_constraint(lhs, milp::Relation::LessEqual, 0, "adjacent_" + tag);
  });

  // Minimum dwell in every sector, same indicator construction as Step 1.
  for (ResourceId r = 0; r < grid.size(); ++r) {
    if (grid.is_vertiport(r)) continue;
    const int l = req.min_dwell(r);
    if (l <= 1) continue;
    for (Timestep t = block.window.first + 1; t <= block.window.last + 1 && t <= horizon.last(); ++t) {
      const auto before = u.find(r, t - 1);
      if (before < 0) continue;  // the hold row is vacuous when r cannot be held at t-1
      const auto a = model.add_binary(var_name("A", tag, r, t));
      milp::LinearExpr recent;
      for (Timestep k = std::max(t - l, block.window.first); k <= t - 1; ++k) {
        if (auto v = u.find(r, k); v >= 0) recent.add(v);
      }
      milp::LinearExpr force_one = recent;
      force_one.add(a, big_m);
      model.add_constraint(force_one, milp::Relation::GreaterEqual, l, "dwell_flag_on_" + tag);
      milp::LinearExpr force_zero = recent;
      force_zero.add(a, big_m);
      model.add_constraint(force_zero, milp::Relation::LessEqual, big_m + l - 1, "dwell_flag_off_" + tag);
      milp::LinearExpr stay;
      if (auto now = u.find(r, t); now >= 0) stay.add(now);
      stay.add(before, -1.0);
      stay.add(a, -1.0);
      model.add_constraint(stay, milp::Relation::GreaterEqual, -1, "dwell_hold_" + tag);
    }
  }

  // At most one resource per step, and nothing after landing at the
  // destination.
  milp::LinearExpr landed;
  for (Timestep t = block.window.first; t <= block.window.last; ++t) {
    milp::LinearExpr here;
    for (ResourceId r = 0; r < grid.size(); ++r) {
      if (auto v = u.find(r, t); v >= 0) here.add(v);
    }
    if (!here.empty()) {
      model.add_constraint(here, milp::Relation::LessEqual, 1, "one_resource_" + tag);
      milp::LinearExpr after = here;
      after += landed;
      if (!landed.empty()) model.add_constraint(after, milp::Relation::LessEqual, 1, "landed_" + tag);
    }
    if (auto v = u.find(req.destination, t); v >= 0) landed.add(v);
  }

  if (with_entries) {
    // entry = max(u[t] - u[t-1], 0), made exact by the three rows below.
    u.for_each([&](ResourceId r, Timestep t, milp::VarId v) {
      const auto e = model.add_binary(var_name("e", tag, r, t));
      block.entry.set(r, t, e);
      block.path_length.add(e);
      const auto prev = u.find(r, t - 1);
      milp::LinearExpr lower;  // e >= u[t] - u[t-1]
      lower.add(e).add(v, -1.0);
      if (prev >= 0) lower.add(prev, 1.0);
      model.add_constraint(lower, milp::Relation::GreaterEqual, 0, "entry_lower_" + tag);
      milp::LinearExpr upper;  // e <= u[t]
      upper.add(e).add(v, -1.0);
      model.add_constraint(upper, milp::Relation::LessEqual, 0, "entry_upper_" + tag);
      if (prev >= 0) {
        milp::LinearExpr fresh;  // e <= 1 - u[t-1]
        fresh.add(e).add(prev, 1.0);
        model.add_constraint(fresh, milp::Relation::LessEqual, 1, "entry_fresh_" + tag);
      }
    });
  }
  return block;
}

milp::LinearExpr tdc_expr(const PlanBlock& block, const FlightRequest& req, double alpha) {
  milp::LinearExpr arrival = block.arrival_time;
  arrival += -static_cast<double>(req.arrival);
  arrival.scale(alpha);
  milp::LinearExpr departure = block.departure_time;
  departure += -static_cast<double>(req.departure);
  departure.scale(1.0 - alpha);
  arrival += departure;
  return arrival;
}

FlightPlan extract_plan(const PlanBlock& block, const milp::SolveResult& result, FlightId flight) {
  std::map<Timestep, ResourceId> occupied;
  block.presence.for_each([&](ResourceId r, Timestep t, milp::VarId v) {
    if (result.is_one(v)) {
      if (!occupied.emplace(t, r).second) throw InvariantViolation("two resources occupied at one step");
    }
  });
  FlightPlan plan;
  plan.flight = flight;
  if (occupied.empty()) return plan;
  plan.departure = occupied.begin()->first;
  Timestep expect = plan.departure;
  for (const auto& [t, r] : occupied) {
    if (t != expect) throw InvariantViolation("presence sequence is not contiguous");
    plan.path.push_back(r);
    ++expect;
  }
  return plan;
}

}  // namespace coplan::detail
