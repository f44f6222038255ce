#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "coplan/airspace.hpp"
#include "coplan/flight.hpp"
#include "coplan/milp.hpp"
#include "coplan/step1.hpp"
#include "coplan/step3.hpp"

namespace coplan::sim {

enum class Mode { FairCoplan, Coplan, Tfmp };

std::string to_string(Mode mode);
// Accepts "fair-coplan", "coplan", "tfmp"; throws ConfigError otherwise.
Mode parse_mode(std::string_view text);

struct ScenarioConfig {
  std::string name = "scenario";
  GridConfig grid;
  double demand_per_hour = 25.0;  // new requests per hour per hub
  int periods_per_day = 24;
  int cadence_steps = 1;          // timesteps between planning periods
  double alpha = 0.3;
  double gamma = 1.0;
  int flexibility = 3;            // epsilon for generated requests
  int max_dwell = 2;              // dwell drawn from [1, max_dwell] on vertiport-adjacent sectors
  std::uint64_t seed = 1;
  Mode mode = Mode::FairCoplan;
  double time_limit_s = 60.0;     // per MILP solve
  int step2_workers = 1;

  // Throws ConfigError on out-of-range values or an invalid grid.
  void validate() const;
  Horizon horizon(int period) const { return {period * cadence_steps, grid.horizon_steps}; }
  double period_hours() const { return cadence_steps * grid.step_minutes / 60.0; }
};

// Unique within a campaign: day, period and position are packed in.
FlightId make_flight_id(int day, int period, int index);

// Poisson arrivals per hub with mean rate * period length; destination
// uniform over the other vertiports; d = period start; a = d + least travel
// time under the sampled dwells. Deterministic in (seed, day, period).
std::vector<FlightRequest> generate_demand(const ScenarioConfig& config, const AirspaceGrid& grid, int day,
                                           int period);

struct ServedFlight {
  FlightRequest request;
  FlightPlan plan;
  std::string stage;     // "clean", "deconflicted" or "tfmp"
  double tdc = 0.0;      // against the times in this period's request
  double tdc_total = 0.0;  // against the first submitted times, carryover delay included
  std::optional<double> ratio;  // path-length ratio, deconflicted flights only
};

struct PeriodTiming {
  double step1 = 0.0;
  double step2_total = 0.0;
  double step2_max = 0.0;
  double step3 = 0.0;
  double tfmp = 0.0;
  double wall = 0.0;
};

struct PeriodResult {
  int day = 0;
  int period = 0;
  Horizon horizon;
  std::vector<FlightRequest> requests;  // carryovers first, then new requests
  std::vector<ChoiceSet> choice_sets;   // aligned with requests (negotiated modes)
  std::vector<FlightPlan> proposals;    // Step 2 plans
  ConflictReport conflicts;
  bool deconflicted = false;            // Step 3 ran
  bool step3_exact = true;
  double fairness = 0.0;
  std::vector<ServedFlight> served;
  std::vector<FlightId> carryovers;
  std::vector<FlightId> rejected;       // can never fit the horizon
  PeriodTiming timing;
  std::vector<std::string> audit;       // problems found by the post-period audit
};

// Mutable state of one simulated day.
struct DayState {
  OccupancyLedger ledger;
  std::vector<FlightRequest> pending;  // carryovers for the next period
};

struct RunOptions {
  std::shared_ptr<const milp::Backend> backend;  // default_backend() when null
  bool audit = true;
  // Called with the exact Step 3 input whenever Step 3 runs.
  std::function<void(const Horizon&, const Occupancy&, std::span<const DeconflictionInput>, const DeconflictionResult&)>
      on_step3;
};

// One planning period. Carryovers are processed before new requests;
// unservable flights are resubmitted with times shifted by the cadence.
// Throws CapacityViolation if filing a final plan would overload a cell.
PeriodResult run_period(const ScenarioConfig& config, const AirspaceGrid& grid, DayState& state, int day,
                        int period, std::vector<FlightRequest> new_requests, const RunOptions& options);

// Overlay audit and substitution re-checks for one finished period.
std::vector<std::string> audit_period(const ScenarioConfig& config, const AirspaceGrid& grid,
                                      const DayState& state, const PeriodResult& result);

struct DayResult {
  int day = 0;
  std::vector<PeriodResult> periods;
  std::vector<FlightRequest> pending_at_end;
};

DayResult run_day(const ScenarioConfig& config, const AirspaceGrid& grid, int day, const RunOptions& options);

// Per-day statistics, recomputable from stored period records.
struct DayMetrics {
  int day = 0;
  int requests = 0;        // newly generated
  int served = 0;
  int rejected = 0;
  int pending_at_end = 0;
  int deconfliction_periods = 0;
  double mean_tdc = 0.0;   // over served flights, carryover delay included
  double mean_fairness = 0.0;  // over periods where Step 3 ran
};

DayMetrics day_metrics(int day, std::span<const PeriodResult> periods, int pending_at_end);

struct RunMetrics {
  std::string label;
  Mode mode = Mode::FairCoplan;
  double gamma = 0.0;
  std::vector<DayMetrics> days;
  std::vector<PeriodTiming> timings;  // one per period; empty when not recorded
};

struct CampaignMetrics {
  double demand_per_hour = 0.0;
  std::vector<RunMetrics> runs;

  const RunMetrics* find(std::string_view label) const;
};

// Runs `days` independent days for each requested run. In fair-coplan mode
// a gamma = 0 run on the same demand is added as the paired reference.
// `on_day` receives every finished day (used to stream records to disk).
struct RunSpec {
  std::string label;
  ScenarioConfig config;
};
std::vector<RunSpec> campaign_runs(const ScenarioConfig& config, bool compare_all);
CampaignMetrics run_campaign(const std::vector<RunSpec>& runs, int days, const RunOptions& options,
                             const std::function<void(const RunSpec&, const DayResult&)>& on_day = {});

struct SummaryTable {
  std::string name;  // file stem
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// TDC distribution per run, fairness-improvement and TDC-increase
// percentages against the paired gamma = 0 run, aggregate TDC per run, and
// solve-time statistics when timings are present.
std::vector<SummaryTable> summarize(const CampaignMetrics& metrics);

}  // namespace coplan::sim
