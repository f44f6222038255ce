#include "coplan/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <set>

#include "coplan/baseline.hpp"
#include "coplan/step2.hpp"

namespace coplan::sim {

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::FairCoplan: return "fair-coplan";
    case Mode::Coplan: return "coplan";
    case Mode::Tfmp: return "tfmp";
  }
  return "unknown";
}

Mode parse_mode(std::string_view text) {
  if (text == "fair-coplan") return Mode::FairCoplan;
  if (text == "coplan") return Mode::Coplan;
  if (text == "tfmp") return Mode::Tfmp;
  throw ConfigError("unknown mode '" + std::string(text) + "' (expected fair-coplan, coplan or tfmp)");
}

void ScenarioConfig::validate() const {
  const AirspaceGrid g(grid);  // grid checks
  bool hub = false;
  for (const auto& v : grid.vertiports) hub = hub || v.kind == VertiportKind::Hub;
  if (!hub) throw ConfigError("scenario needs at least one hub vertiport");
  if (grid.vertiports.size() < 2) throw ConfigError("scenario needs at least two vertiports");
  if (!(demand_per_hour >= 0.0) || !std::isfinite(demand_per_hour)) throw ConfigError("demand must be >= 0");
  if (periods_per_day < 0) throw ConfigError("periods_per_day must be >= 0");
  if (cadence_steps < 1) throw ConfigError("cadence_steps must be >= 1");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in [0, 1]");
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw ConfigError("gamma must be >= 0");
  if (flexibility < 1) throw ConfigError("flexibility must be >= 1");
  if (max_dwell < 1) throw ConfigError("max_dwell must be >= 1");
  if (!(time_limit_s > 0.0)) throw ConfigError("time limit must be positive");
  if (step2_workers < 1) throw ConfigError("step2_workers must be >= 1");
}

FlightId make_flight_id(int day, int period, int index) {
  return (static_cast<FlightId>(day) * 100'000 + period) * 10'000 + index;
}

std::vector<FlightRequest> generate_demand(const ScenarioConfig& config, const AirspaceGrid& grid, int day,
                                           int period) {
  std::seed_seq seq{static_cast<std::uint32_t>(config.seed), static_cast<std::uint32_t>(config.seed >> 32),
                    static_cast<std::uint32_t>(day), static_cast<std::uint32_t>(period), 0x6d616e64u};
  std::mt19937_64 rng(seq);
  const double mean = config.demand_per_hour * config.period_hours();
  const Horizon h = config.horizon(period);

  std::vector<FlightRequest> out;
  if (mean <= 0.0) return out;
  const auto ports = grid.vertiports();
  int index = 0;
  for (std::size_t hi = 0; hi < ports.size(); ++hi) {
    const ResourceId hub = ports[hi];
    if (grid.vertiport_spec(hub).kind != VertiportKind::Hub) continue;
    const int count = std::poisson_distribution<int>(mean)(rng);
    for (int k = 0; k < count; ++k) {
      FlightRequest req;
      req.id = make_flight_id(day, period, index++);
      req.op = static_cast<OperatorId>(hi);
      req.origin = hub;
      auto pick = std::uniform_int_distribution<std::size_t>(0, ports.size() - 2)(rng);
      if (pick >= hi) ++pick;
      req.destination = ports[pick];
      for (ResourceId r : grid.vertiport_adjacent()) {
        const int l = std::uniform_int_distribution<int>(1, config.max_dwell)(rng);
        if (l > 1) req.dwell[r] = l;
      }
      req.departure = h.start;
      req.arrival = h.start + min_travel_time(grid, req);
      req.flexibility = config.flexibility;
      req.original_departure = req.departure;
      req.original_arrival = req.arrival;
      out.push_back(std::move(req));
    }
  }
  return out;
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

ServedFlight make_served(const FlightRequest& req, FlightPlan plan, std::string stage, double alpha) {
  ServedFlight s;
  s.request = req;
  s.tdc = tdc(plan, req, {alpha});
  s.tdc_total = tdc_from_original(plan, req, {alpha});
  s.plan = std::move(plan);
  s.stage = std::move(stage);
  return s;
}

void file(const AirspaceGrid& grid, DayState& state, const ServedFlight& s, Timestep at) {
  state.ledger.file_plan(grid, {s.request.id, s.request.op, s.plan, at});
}

void run_negotiated(const ScenarioConfig& config, const AirspaceGrid& grid, DayState& state,
                    const std::vector<FlightRequest>& valid, PeriodResult& result, const RunOptions& options,
                    std::map<FlightId, std::size_t>& position) {
  const auto& backend = *options.backend;
  const milp::SolveLimits limits{config.time_limit_s, 0.0};
  const Horizon h = result.horizon;
  const double gamma = config.mode == Mode::Coplan ? 0.0 : config.gamma;
  const Occupancy snapshot = state.ledger.occupancy();

  const auto step1 = solve_step1(grid, snapshot, h, valid, backend, limits);
  result.timing.step1 = step1.solve_seconds;
  if (step1.status != milp::SolveStatus::Optimal && step1.status != milp::SolveStatus::TimeLimitFeasible) {
    throw std::runtime_error("step 1 failed in period " + std::to_string(result.period) + ": " + step1.diagnostic);
  }
  std::vector<FlightRequest> assigned;
  std::vector<ChoiceSet> assigned_choices;
  for (std::size_t i = 0; i < valid.size(); ++i) {
    result.choice_sets[position.at(valid[i].id)] = step1.choice_sets[i];
    if (step1.choice_sets[i].empty()) {
      result.carryovers.push_back(valid[i].id);
    } else {
      assigned.push_back(valid[i]);
      assigned_choices.push_back(step1.choice_sets[i]);
    }
  }

  const auto outcomes = solve_step2_batch(grid, snapshot, h, assigned, assigned_choices, {config.alpha}, backend,
                                          limits, config.step2_workers);
  std::vector<std::size_t> proposed;  // index into assigned
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    result.timing.step2_total += outcomes[i].solve_seconds;
    result.timing.step2_max = std::max(result.timing.step2_max, outcomes[i].solve_seconds);
    if (outcomes[i].plan) {
      result.proposals.push_back(*outcomes[i].plan);
      proposed.push_back(i);
    } else {
      result.carryovers.push_back(assigned[i].id);
    }
  }

  result.conflicts = detect_conflicts(grid, snapshot, result.proposals);
  const std::set<FlightId> conflicting(result.conflicts.conflicting.begin(), result.conflicts.conflicting.end());
  std::vector<DeconflictionInput> inputs;
  for (std::size_t k = 0; k < proposed.size(); ++k) {
    const auto i = proposed[k];
    if (conflicting.contains(assigned[i].id)) {
      inputs.push_back({assigned[i], assigned_choices[i], result.proposals[k]});
      continue;
    }
    result.served.push_back(make_served(assigned[i], result.proposals[k], "clean", config.alpha));
    file(grid, state, result.served.back(), h.start);
  }
  if (inputs.empty()) return;

  const Occupancy with_clean = state.ledger.occupancy();
  const auto step3 = solve_step3(grid, with_clean, h, inputs, {gamma, config.alpha}, backend, limits);
  if (options.on_step3) options.on_step3(h, with_clean, inputs, step3);
  result.deconflicted = true;
  result.step3_exact = step3.exact;
  result.timing.step3 = step3.solve_seconds;
  result.fairness = step3.fairness;
  for (std::size_t k = 0; k < step3.plans.size(); ++k) {
    const auto it = std::find_if(inputs.begin(), inputs.end(),
                                 [&](const DeconflictionInput& in) { return in.request.id == step3.plans[k].flight; });
    auto served = make_served(it->request, step3.plans[k], "deconflicted", config.alpha);
    served.ratio = step3.ratios[k];
    result.served.push_back(std::move(served));
    file(grid, state, result.served.back(), h.start);
  }
  for (FlightId id : step3.carryovers) result.carryovers.push_back(id);
}

void run_tfmp(const ScenarioConfig& config, const AirspaceGrid& grid, DayState& state,
              const std::vector<FlightRequest>& valid, PeriodResult& result, const RunOptions& options) {
  std::vector<FixedRoute> routes;
  for (const auto& req : valid) routes.push_back(fixed_route(grid, req));
  const auto solved = solve_tfmp(grid, state.ledger.occupancy(), result.horizon, valid, routes, {config.alpha},
                                 *options.backend, {config.time_limit_s, 0.0});
  result.timing.tfmp = solved.solve_seconds;
  if (solved.status == milp::SolveStatus::Error) {
    throw std::runtime_error("baseline failed in period " + std::to_string(result.period) + ": " +
                             solved.diagnostic);
  }
  for (const auto& plan : solved.plans) {
    const auto it = std::find_if(valid.begin(), valid.end(), [&](const FlightRequest& r) { return r.id == plan.flight; });
    result.served.push_back(make_served(*it, plan, "tfmp", config.alpha));
    file(grid, state, result.served.back(), result.horizon.start);
  }
  for (FlightId id : solved.carryovers) result.carryovers.push_back(id);
}

}  // namespace

PeriodResult run_period(const ScenarioConfig& config, const AirspaceGrid& grid, DayState& state, int day,
                        int period, std::vector<FlightRequest> new_requests, const RunOptions& options_in) {
  const auto start = std::chrono::steady_clock::now();
  RunOptions options = options_in;
  if (!options.backend) options.backend = milp::default_backend();

  PeriodResult result;
  result.day = day;
  result.period = period;
  result.horizon = config.horizon(period);
  result.requests = std::move(state.pending);
  state.pending.clear();
  for (auto& r : new_requests) result.requests.push_back(std::move(r));
  result.choice_sets.resize(result.requests.size());

  std::vector<FlightRequest> valid;
  std::map<FlightId, std::size_t> position;
  for (std::size_t i = 0; i < result.requests.size(); ++i) {
    const auto& req = result.requests[i];
    position[req.id] = i;
    result.choice_sets[i] = {req.id, req.origin, req.destination, {}};
    if (validate_request(grid, result.horizon, req).empty()) {
      valid.push_back(req);
    } else {
      result.rejected.push_back(req.id);
    }
  }

  if (!valid.empty()) {
    if (config.mode == Mode::Tfmp) {
      run_tfmp(config, grid, state, valid, result, options);
    } else {
      run_negotiated(config, grid, state, valid, result, options, position);
    }
  }
  // Carryovers keep their processing order.
  std::sort(result.carryovers.begin(), result.carryovers.end(),
            [&](FlightId a, FlightId b) { return position.at(a) < position.at(b); });
  for (FlightId id : result.carryovers) {
    state.pending.push_back(resubmitted(result.requests[position.at(id)], config.cadence_steps));
  }
  result.timing.wall = seconds_since(start);
  if (options.audit) result.audit = audit_period(config, grid, state, result);
  return result;
}

std::vector<std::string> audit_period(const ScenarioConfig& config, const AirspaceGrid& grid, const DayState& state,
                                      const PeriodResult& result) {
  std::vector<std::string> problems;
  const std::string where = "day " + std::to_string(result.day) + " period " + std::to_string(result.period) + ": ";
  auto fail = [&](const std::string& what) { problems.push_back(where + what); };

  for (const auto& rt : overloaded_cells(grid, state.ledger.occupancy())) {
    fail("overlay exceeds capacity at (r=" + std::to_string(rt.resource) + ",t=" + std::to_string(rt.t) + ")");
  }
  if (!state.ledger.index_consistent()) fail("occupancy index disagrees with filed plans");

  // Conservation: every processed request is served, carried over or rejected, once.
  std::map<FlightId, int> seen;
  for (const auto& s : result.served) ++seen[s.request.id];
  for (FlightId id : result.carryovers) ++seen[id];
  for (FlightId id : result.rejected) ++seen[id];
  std::size_t accounted = 0;
  for (const auto& req : result.requests) {
    auto it = seen.find(req.id);
    if (it == seen.end() || it->second != 1) fail("flight " + std::to_string(req.id) + " not accounted exactly once");
    accounted += it == seen.end() ? 0 : 1;
  }
  if (accounted != seen.size()) fail("outcomes mention flights that were not requested");

  // Snapshot before this period: remove what was filed now.
  Occupancy before = state.ledger.occupancy();
  for (const auto& s : result.served) before.add(s.plan, -1);
  const Horizon& h = result.horizon;
  std::map<FlightId, std::size_t> index;
  for (std::size_t i = 0; i < result.requests.size(); ++i) index[result.requests[i].id] = i;

  if (config.mode == Mode::Tfmp) {
    for (const auto& s : result.served) {
      for (const auto& p : check_route_plan(h, s.request, fixed_route(grid, s.request), s.plan)) fail(p);
    }
    return problems;
  }

  std::vector<FlightRequest> processed;
  std::vector<ChoiceSet> sets;
  for (std::size_t i = 0; i < result.requests.size(); ++i) {
    if (std::find(result.rejected.begin(), result.rejected.end(), result.requests[i].id) != result.rejected.end()) {
      continue;
    }
    processed.push_back(result.requests[i]);
    sets.push_back(result.choice_sets[i]);
  }
  for (const auto& p : check_choice_sets(grid, before, h, processed, sets)) fail(p);
  for (const auto& plan : result.proposals) {
    const auto i = index.at(plan.flight);
    for (const auto& p : check_plan(grid, before, h, result.requests[i], result.choice_sets[i], plan)) fail(p);
  }
  for (const auto& s : result.served) {
    const auto i = index.at(s.request.id);
    const PlanCheckOptions opts{.en_route_capacity = s.stage == "clean"};
    for (const auto& p : check_plan(grid, before, h, s.request, result.choice_sets[i], s.plan, opts)) fail(p);
  }
  return problems;
}

DayResult run_day(const ScenarioConfig& config, const AirspaceGrid& grid, int day, const RunOptions& options) {
  DayResult out;
  out.day = day;
  DayState state;
  for (int p = 0; p < config.periods_per_day; ++p) {
    out.periods.push_back(run_period(config, grid, state, day, p, generate_demand(config, grid, day, p), options));
  }
  out.pending_at_end = state.pending;
  return out;
}

DayMetrics day_metrics(int day, std::span<const PeriodResult> periods, int pending_at_end) {
  DayMetrics m;
  m.day = day;
  m.pending_at_end = pending_at_end;
  double tdc_sum = 0.0, fairness_sum = 0.0;
  for (const auto& p : periods) {
    for (const auto& r : p.requests) m.requests += r.resubmissions == 0 ? 1 : 0;
    m.rejected += static_cast<int>(p.rejected.size());
    for (const auto& s : p.served) {
      ++m.served;
      tdc_sum += s.tdc_total;
    }
    if (p.deconflicted) {
      ++m.deconfliction_periods;
      fairness_sum += p.fairness;
    }
  }
  if (m.served > 0) m.mean_tdc = tdc_sum / m.served;
  if (m.deconfliction_periods > 0) m.mean_fairness = fairness_sum / m.deconfliction_periods;
  return m;
}

const RunMetrics* CampaignMetrics::find(std::string_view label) const {
  for (const auto& r : runs) {
    if (r.label == label) return &r;
  }
  return nullptr;
}

std::vector<RunSpec> campaign_runs(const ScenarioConfig& config, bool compare_all) {
  auto with = [&](Mode mode, double gamma) {
    ScenarioConfig c = config;
    c.mode = mode;
    c.gamma = gamma;
    return RunSpec{to_string(mode), c};
  };
  std::vector<RunSpec> runs;
  if (compare_all || config.mode == Mode::FairCoplan) {
    runs.push_back(with(Mode::FairCoplan, config.gamma));
    runs.push_back(with(Mode::Coplan, 0.0));
  } else if (config.mode == Mode::Coplan) {
    runs.push_back(with(Mode::Coplan, 0.0));
  }
  if (compare_all || config.mode == Mode::Tfmp) runs.push_back(with(Mode::Tfmp, config.gamma));
  return runs;
}

CampaignMetrics run_campaign(const std::vector<RunSpec>& runs, int days, const RunOptions& options,
                             const std::function<void(const RunSpec&, const DayResult&)>& on_day) {
  CampaignMetrics metrics;
  if (!runs.empty()) metrics.demand_per_hour = runs.front().config.demand_per_hour;
  for (const auto& run : runs) {
    run.config.validate();
    const AirspaceGrid grid(run.config.grid);
    RunMetrics rm{run.label, run.config.mode, run.config.gamma, {}, {}};
    for (int d = 0; d < days; ++d) {
      const auto day = run_day(run.config, grid, d, options);
      rm.days.push_back(day_metrics(d, day.periods, static_cast<int>(day.pending_at_end.size())));
      for (const auto& p : day.periods) rm.timings.push_back(p.timing);
      if (on_day) on_day(run, day);
    }
    metrics.runs.push_back(std::move(rm));
  }
  return metrics;
}

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string percent(int part, int whole) { return whole > 0 ? num(100.0 * part / whole) : "n/a"; }

}  // namespace

std::vector<SummaryTable> summarize(const CampaignMetrics& metrics) {
  std::vector<SummaryTable> tables;
  SummaryTable dist{"tdc_distribution", {"run", "day", "mean_tdc", "served", "requests", "rejected", "pending_at_end",
                                         "deconfliction_periods", "mean_fairness"}, {}};
  SummaryTable by_run{"tdc_by_run", {"run", "gamma", "days", "mean_daily_tdc"}, {}};
  for (const auto& run : metrics.runs) {
    double sum = 0.0;
    for (const auto& d : run.days) {
      dist.rows.push_back({run.label, std::to_string(d.day), num(d.mean_tdc), std::to_string(d.served),
                           std::to_string(d.requests), std::to_string(d.rejected), std::to_string(d.pending_at_end),
                           std::to_string(d.deconfliction_periods), num(d.mean_fairness)});
      sum += d.mean_tdc;
    }
    if (!run.days.empty()) {
      by_run.rows.push_back({run.label, num(run.gamma), std::to_string(run.days.size()), num(sum / run.days.size())});
    }
  }
  tables.push_back(std::move(dist));
  tables.push_back(std::move(by_run));

  const auto* fair = metrics.find("fair-coplan");
  const auto* ref = metrics.find("coplan");
  SummaryTable improvement{"fairness_improvement",
                           {"gamma", "demand_per_hour", "days", "days_with_deconfliction", "days_improved",
                            "percent_improved"},
                           {}};
  SummaryTable increase{"tdc_increase", {"gamma", "demand_per_hour", "days", "days_increased", "percent_increased"},
                        {}};
  if (fair && ref) {
    const std::size_t n = std::min(fair->days.size(), ref->days.size());
    int with = 0, improved = 0, increased = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& a = fair->days[i];
      const auto& b = ref->days[i];
      if (a.deconfliction_periods > 0 || b.deconfliction_periods > 0) {
        ++with;
        improved += a.mean_fairness < b.mean_fairness ? 1 : 0;
      }
      increased += a.mean_tdc > b.mean_tdc ? 1 : 0;
    }
    if (n > 0) {
      improvement.rows.push_back({num(fair->gamma), num(metrics.demand_per_hour), std::to_string(n),
                                  std::to_string(with), std::to_string(improved), percent(improved, with)});
      increase.rows.push_back({num(fair->gamma), num(metrics.demand_per_hour), std::to_string(n),
                               std::to_string(increased), percent(increased, static_cast<int>(n))});
    }
  }
  tables.push_back(std::move(improvement));
  tables.push_back(std::move(increase));

  bool timed = false;
  for (const auto& run : metrics.runs) timed = timed || !run.timings.empty();
  if (timed) {
    SummaryTable times{"solve_times", {"run", "step", "count", "mean_s", "std_s", "min_s", "max_s"}, {}};
    using Field = double PeriodTiming::*;
    const std::vector<std::pair<std::string, Field>> steps{{"step1", &PeriodTiming::step1},
                                                           {"step2_max", &PeriodTiming::step2_max},
                                                           {"step3", &PeriodTiming::step3},
                                                           {"tfmp", &PeriodTiming::tfmp},
                                                           {"period", &PeriodTiming::wall}};
    for (const auto& run : metrics.runs) {
      for (const auto& [name, field] : steps) {
        std::vector<double> xs;
        for (const auto& t : run.timings) {
          if (t.*field > 0.0) xs.push_back(t.*field);
        }
        if (xs.empty()) continue;
        double mean = 0.0;
        for (double x : xs) mean += x;
        mean /= xs.size();
        double var = 0.0;
        for (double x : xs) var += (x - mean) * (x - mean);
        const double sd = xs.size() > 1 ? std::sqrt(var / (xs.size() - 1)) : 0.0;
        times.rows.push_back({run.label, name, std::to_string(xs.size()), num(mean), num(sd),
                              num(*std::min_element(xs.begin(), xs.end())),
                              num(*std::max_element(xs.begin(), xs.end()))});
      }
    }
    tables.push_back(std::move(times));
  }
  return tables;
}

}  // namespace coplan::sim
