#include <gtest/gtest.h>

#include <set>

#include "coplan/baseline.hpp"
#include "coplan/fixtures.hpp"
#include "coplan/io.hpp"
#include "coplan/sim.hpp"

namespace coplan::sim {
namespace {

ScenarioConfig small_scenario() {
  ScenarioConfig c;
  c.name = "small";
  c.grid.rows = 5;
  c.grid.cols = 5;
  c.grid.horizon_steps = 12;
  c.grid.sector_capacity = 1;
  c.grid.vertiport_adjacent_capacity = 3;
  c.grid.vertiports = {{{1, 1}, VertiportKind::Hub, 6},
                       {{3, 3}, VertiportKind::Hub, 6},
                       {{1, 3}, VertiportKind::Vertistop, 3},
                       {{3, 1}, VertiportKind::Vertistop, 3}};
  c.demand_per_hour = 18.0;
  c.periods_per_day = 6;
  c.seed = 3;
  c.time_limit_s = 30.0;
  return c;
}

ScenarioConfig four_hubs() {
  ScenarioConfig c;
  c.grid.rows = 6;
  c.grid.cols = 6;
  c.grid.horizon_steps = 14;
  c.grid.vertiports = {{{1, 1}, VertiportKind::Hub, 6}, {{1, 4}, VertiportKind::Hub, 6},
                       {{4, 1}, VertiportKind::Hub, 6}, {{4, 4}, VertiportKind::Hub, 6},
                       {{0, 3}, VertiportKind::Vertistop, 2}};
  c.demand_per_hour = 25.0;
  return c;
}

TEST(Demand, ZeroRateIsEmpty) {
  auto c = small_scenario();
  c.demand_per_hour = 0.0;
  const AirspaceGrid grid(c.grid);
  EXPECT_TRUE(generate_demand(c, grid, 0, 0).empty());
}

TEST(Demand, DeterministicPerSeedDayAndPeriod) {
  const auto c = small_scenario();
  const AirspaceGrid grid(c.grid);
  auto dump = [&](int day, int period) {
    io::json j = io::json::array();
    for (const auto& r : generate_demand(c, grid, day, period)) j.push_back(io::request_to_json(r));
    return j.dump();
  };
  EXPECT_EQ(dump(0, 3), dump(0, 3));
  EXPECT_EQ(dump(2, 1), dump(2, 1));
  std::set<std::string> distinct;
  for (int p = 0; p < 6; ++p) distinct.insert(dump(0, p));
  EXPECT_GT(distinct.size(), 1u);
}

TEST(Demand, MeanMatchesRatePerHub) {
  const auto c = four_hubs();
  const AirspaceGrid grid(c.grid);
  // 4 hubs * 25 per hour * 5/60 hour = 8.33 per period.
  const double expected = 4 * 25.0 / 12.0;
  double total = 0;
  const int periods = 600;
  for (int p = 0; p < periods; ++p) total += generate_demand(c, grid, p / 6, p % 6).size();
  EXPECT_NEAR(total / periods, expected, 0.5);
}

TEST(Demand, RequestShape) {
  const auto c = four_hubs();
  const AirspaceGrid grid(c.grid);
  std::set<FlightId> ids;
  for (int p = 0; p < 20; ++p) {
    for (const auto& r : generate_demand(c, grid, 1, p)) {
      EXPECT_TRUE(ids.insert(r.id).second);
      EXPECT_EQ(grid.vertiport_spec(r.origin).kind, VertiportKind::Hub);
      EXPECT_NE(r.origin, r.destination);
      EXPECT_TRUE(grid.is_vertiport(r.destination));
      EXPECT_EQ(r.departure, c.horizon(p).start);
      EXPECT_EQ(r.arrival, r.departure + min_travel_time(grid, r));
      EXPECT_EQ(r.flexibility, 3);
      EXPECT_EQ(r.resubmissions, 0);
      for (const auto& [res, l] : r.dwell) {
        EXPECT_TRUE(grid.is_vertiport_adjacent(res));
        EXPECT_TRUE(l == 1 || l == 2);
      }
    }
  }
  EXPECT_GT(ids.size(), 0u);
}

TEST(Scenario, ValidationRejectsBadValues) {
  auto c = small_scenario();
  EXPECT_NO_THROW(c.validate());
  c.alpha = 1.5;
  EXPECT_THROW(c.validate(), ConfigError);
  c = small_scenario();
  c.demand_per_hour = -1;
  EXPECT_THROW(c.validate(), ConfigError);
  c = small_scenario();
  c.grid.vertiports[0].kind = VertiportKind::Vertistop;
  c.grid.vertiports[1].kind = VertiportKind::Vertistop;
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_THROW(parse_mode("fair"), ConfigError);
  EXPECT_EQ(parse_mode(to_string(Mode::Tfmp)), Mode::Tfmp);
}

TEST(Period, NothingToDo) {
  const auto c = small_scenario();
  const AirspaceGrid grid(c.grid);
  DayState state;
  const auto r = run_period(c, grid, state, 0, 0, {}, {});
  EXPECT_TRUE(r.requests.empty());
  EXPECT_TRUE(r.served.empty());
  EXPECT_FALSE(r.deconflicted);
  EXPECT_TRUE(state.ledger.records().empty());
  EXPECT_TRUE(r.audit.empty());
}

TEST(Period, SingleFlightIsServedOnTime) {
  const auto c = small_scenario();
  const AirspaceGrid grid(c.grid);
  auto reqs = generate_demand(c, grid, 0, 0);
  ASSERT_FALSE(reqs.empty());
  reqs.resize(1);
  DayState state;
  const auto r = run_period(c, grid, state, 0, 0, reqs, {});
  ASSERT_EQ(r.served.size(), 1u);
  EXPECT_DOUBLE_EQ(r.served[0].tdc, 0.0);
  EXPECT_EQ(r.served[0].stage, "clean");
  EXPECT_FALSE(r.deconflicted);
  EXPECT_EQ(state.ledger.records().size(), 1u);
  EXPECT_TRUE(r.audit.empty()) << r.audit.front();
}

TEST(Period, SharedCorridorRunsStep3AndMatchesOracle) {
  const auto inst = oracle::shared_corridor_instance();
  ScenarioConfig c;
  c.grid = inst.grid;
  c.gamma = 1.0;
  const AirspaceGrid grid(c.grid);
  DayState state;
  std::vector<DeconflictionInput> seen;
  DeconflictionResult solved;
  Occupancy snapshot;
  RunOptions opts;
  opts.on_step3 = [&](const Horizon&, const Occupancy& occ, std::span<const DeconflictionInput> in, const DeconflictionResult& r) {
    snapshot = occ;
    seen.assign(in.begin(), in.end());
    solved = r;
  };
  const auto r = run_period(c, grid, state, 0, 0, inst.requests, opts);
  ASSERT_TRUE(r.deconflicted);
  EXPECT_TRUE(r.audit.empty()) << r.audit.front();
  EXPECT_EQ(r.served.size(), 2u);
  ASSERT_EQ(seen.size(), 2u);
  const auto o = oracle::oracle_joint_optimum(grid, snapshot, r.horizon, seen, oracle::Rational(3, 10),
                                              oracle::Rational(1));
  ASSERT_TRUE(o.feasible);
  EXPECT_TRUE(oracle::matches(solved.objective, o.objective)) << solved.objective << " vs " << o.objective.str();
  EXPECT_TRUE(overloaded_cells(grid, state.ledger.occupancy()).empty());
}

TEST(Period, CarryoversAreShiftedAndGoFirst) {
  auto c = small_scenario();
  // Every exit from hub (1,1) is closed for t = 1..3, so nothing can leave
  // it in period 0.
  c.grid.capacity_overrides = {{{1, 2}, 1, 3, 0}, {{2, 1}, 1, 3, 0}, {{1, 0}, 1, 3, 0}, {{0, 1}, 1, 3, 0}};
  const AirspaceGrid closed(c.grid);
  FlightRequest req;
  req.id = 42;
  req.origin = closed.at({1, 1});
  req.destination = closed.at({3, 3});
  req.departure = 0;
  req.arrival = min_travel_time(closed, req);
  req.flexibility = 2;
  req.original_arrival = req.arrival;
  DayState state;
  const auto r0 = run_period(c, closed, state, 0, 0, {req}, {});
  EXPECT_TRUE(r0.served.empty());
  EXPECT_EQ(r0.carryovers, (std::vector<FlightId>{42}));
  ASSERT_EQ(state.pending.size(), 1u);
  EXPECT_EQ(state.pending[0].departure, 1);
  EXPECT_EQ(state.pending[0].arrival, req.arrival + 1);
  EXPECT_EQ(state.pending[0].resubmissions, 1);

  auto fresh = req;
  fresh.id = 43;
  fresh.departure = 1;
  fresh.arrival += 1;
  const auto r1 = run_period(c, closed, state, 0, 1, {fresh}, {});
  ASSERT_EQ(r1.requests.size(), 2u);
  EXPECT_EQ(r1.requests[0].id, 42);
  EXPECT_TRUE(r1.audit.empty()) << r1.audit.front();
}

TEST(Period, RequestsThatCannotFitAreRejected) {
  const auto c = small_scenario();
  const AirspaceGrid grid(c.grid);
  auto req = generate_demand(c, grid, 0, 0).at(0);
  req.arrival = 20;
  DayState state;
  const auto r = run_period(c, grid, state, 0, 0, {req}, {});
  EXPECT_EQ(r.rejected, (std::vector<FlightId>{req.id}));
  EXPECT_TRUE(state.pending.empty());
}

TEST(Day, ConservationAndAuditAcrossModes) {
  for (Mode mode : {Mode::FairCoplan, Mode::Coplan, Mode::Tfmp}) {
    auto c = small_scenario();
    c.mode = mode;
    const AirspaceGrid grid(c.grid);
    const auto day = run_day(c, grid, 0, {});
    int generated = 0, served = 0, rejected = 0;
    for (const auto& p : day.periods) {
      EXPECT_TRUE(p.audit.empty()) << to_string(mode) << ": " << p.audit.front();
      EXPECT_EQ(p.served.size() + p.carryovers.size() + p.rejected.size(), p.requests.size());
      for (const auto& r : p.requests) generated += r.resubmissions == 0 ? 1 : 0;
      served += static_cast<int>(p.served.size());
      rejected += static_cast<int>(p.rejected.size());
    }
    EXPECT_EQ(generated, served + rejected + static_cast<int>(day.pending_at_end.size())) << to_string(mode);
    EXPECT_GT(served, 0);
  }
}

TEST(Campaign, ZeroDaysGivesEmptyTables) {
  const auto metrics = run_campaign(campaign_runs(small_scenario(), true), 0, {});
  ASSERT_EQ(metrics.runs.size(), 3u);
  for (const auto& run : metrics.runs) EXPECT_TRUE(run.days.empty());
  for (const auto& table : summarize(metrics)) EXPECT_TRUE(table.rows.empty()) << table.name;
}

TEST(Campaign, RunsAndLabels) {
  auto c = small_scenario();
  c.gamma = 2.0;
  const auto fair = campaign_runs(c, false);
  ASSERT_EQ(fair.size(), 2u);
  EXPECT_EQ(fair[0].label, "fair-coplan");
  EXPECT_EQ(fair[0].config.gamma, 2.0);
  EXPECT_EQ(fair[1].label, "coplan");
  EXPECT_EQ(fair[1].config.gamma, 0.0);
  c.mode = Mode::Tfmp;
  ASSERT_EQ(campaign_runs(c, false).size(), 1u);
  EXPECT_EQ(campaign_runs(c, true).size(), 3u);
}

TEST(Campaign, PairedRunsSeeTheSameFirstPeriod) {
  const auto runs = campaign_runs(small_scenario(), false);
  std::vector<DayResult> days;
  run_campaign(runs, 1, {}, [&](const RunSpec&, const DayResult& d) { days.push_back(d); });
  ASSERT_EQ(days.size(), 2u);
  // Demand never depends on the mode; the first period also shares Steps 1 and 2.
  for (std::size_t p = 0; p < days[0].periods.size(); ++p) {
    std::vector<FlightId> a, b;
    for (const auto& r : days[0].periods[p].requests) if (r.resubmissions == 0) a.push_back(r.id);
    for (const auto& r : days[1].periods[p].requests) if (r.resubmissions == 0) b.push_back(r.id);
    EXPECT_EQ(a, b);
  }
  EXPECT_EQ(days[0].periods[0].choice_sets, days[1].periods[0].choice_sets);
  EXPECT_EQ(days[0].periods[0].proposals, days[1].periods[0].proposals);
}

TEST(Metrics, RecomputedFromStoredRecords) {
  const auto c = small_scenario();
  const AirspaceGrid grid(c.grid);
  const auto day = run_day(c, grid, 0, {});
  std::vector<PeriodResult> reloaded;
  for (const auto& p : day.periods) reloaded.push_back(io::period_from_json(io::json::parse(io::period_to_json(p).dump())));
  const auto a = day_metrics(0, day.periods, static_cast<int>(day.pending_at_end.size()));
  const auto b = day_metrics(0, reloaded, static_cast<int>(day.pending_at_end.size()));
  EXPECT_EQ(a.requests, b.requests);
  EXPECT_EQ(a.served, b.served);
  EXPECT_EQ(a.deconfliction_periods, b.deconfliction_periods);
  EXPECT_EQ(a.mean_tdc, b.mean_tdc);
  EXPECT_EQ(a.mean_fairness, b.mean_fairness);
}

TEST(Summary, SingleImprovedDayIsHundredPercent) {
  CampaignMetrics m;
  m.demand_per_hour = 10;
  DayMetrics fair{0, 5, 5, 0, 0, 1, 0.4, 0.1};
  DayMetrics ref{0, 5, 5, 0, 0, 1, 0.3, 0.2};
  m.runs = {{"fair-coplan", Mode::FairCoplan, 1.0, {fair}, {}}, {"coplan", Mode::Coplan, 0.0, {ref}, {}}};
  for (const auto& t : summarize(m)) {
    if (t.name == "fairness_improvement") {
      ASSERT_EQ(t.rows.size(), 1u);
      EXPECT_EQ(t.rows[0].back(), "100.000000");
    }
    if (t.name == "tdc_increase") {
      ASSERT_EQ(t.rows.size(), 1u);
      EXPECT_EQ(t.rows[0].back(), "100.000000");
    }
    EXPECT_NE(t.name, "solve_times");
  }
}

TEST(Summary, NoDeconflictionMeansNoPercentage) {
  CampaignMetrics m;
  DayMetrics quiet{0, 5, 5, 0, 0, 0, 0.0, 0.0};
  m.runs = {{"fair-coplan", Mode::FairCoplan, 1.0, {quiet}, {}}, {"coplan", Mode::Coplan, 0.0, {quiet}, {}}};
  for (const auto& t : summarize(m)) {
    if (t.name == "fairness_improvement") {
      EXPECT_EQ(t.rows.at(0).back(), "n/a");
    }
  }
}

TEST(Summary, SolveTimesWhenRecorded) {
  CampaignMetrics m;
  PeriodTiming t1{1.0, 0.5, 0.2, 0.0, 0.0, 2.0};
  PeriodTiming t2{3.0, 0.5, 0.4, 1.0, 0.0, 5.0};
  m.runs = {{"coplan", Mode::Coplan, 0.0, {}, {t1, t2}}};
  const auto tables = summarize(m);
  const auto it = std::find_if(tables.begin(), tables.end(), [](const auto& t) { return t.name == "solve_times"; });
  ASSERT_NE(it, tables.end());
  // step1 row: count 2, mean 2, sample std sqrt(2), min 1, max 3.
  EXPECT_EQ(it->rows[0], (std::vector<std::string>{"coplan", "step1", "2", "2.000000", "1.414214", "1.000000",
                                                   "3.000000"}));
}

}  // namespace
}  // namespace coplan::sim
