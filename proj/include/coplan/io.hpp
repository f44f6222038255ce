#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "coplan/sim.hpp"

namespace coplan::io {

using nlohmann::json;

// Bumped whenever a record layout changes.
inline constexpr int kFormatVersion = 1;

// Scenario files. Unknown keys are rejected so typos do not pass silently.
json scenario_to_json(const sim::ScenarioConfig& config);
sim::ScenarioConfig scenario_from_json(const json& j);  // throws ConfigError
sim::ScenarioConfig load_scenario(const std::filesystem::path& path);
void save_scenario(const std::filesystem::path& path, const sim::ScenarioConfig& config);

json request_to_json(const FlightRequest& req);
FlightRequest request_from_json(const json& j);
json plan_to_json(const FlightPlan& plan);
FlightPlan plan_from_json(const json& j);

// One line of periods.jsonl. Timing is left out so records are reproducible.
json period_to_json(const sim::PeriodResult& period);
sim::PeriodResult period_from_json(const json& j);

// CSV with a header row; fields are written verbatim (none contain commas).
std::string to_csv(const sim::SummaryTable& table);
void write_text(const std::filesystem::path& path, const std::string& text);

// Streams a campaign into an output directory:
//   config.json                      effective scenario
//   runs/<label>/demand.jsonl        newly generated requests
//   runs/<label>/periods.jsonl       period records plus one day_end line per day
//   runs/<label>/flights.jsonl       filed plans, one per line
//   runs/<label>/days.csv            per-day metrics
//   summary/*.csv                    summary tables
// Solve times go to timings.jsonl and summary/solve_times.csv only when
// record_timings is set, since they differ between runs.
class CampaignWriter {
 public:
  CampaignWriter(std::filesystem::path out, const sim::ScenarioConfig& config, bool record_timings);

  void add_day(const sim::RunSpec& run, const sim::DayResult& day);
  // Writes days.csv per run and the summary tables.
  void finish(const sim::CampaignMetrics& metrics);

 private:
  void append(const std::filesystem::path& path, const std::string& line);

  std::filesystem::path out_;
  bool record_timings_;
};

// Rebuilds campaign metrics from the records under `out` (no timings).
sim::CampaignMetrics load_metrics(const std::filesystem::path& out);
// Re-derives days.csv and summary/*.csv from periods.jsonl.
void write_report(const std::filesystem::path& out, const sim::CampaignMetrics& metrics);

}  // namespace coplan::io
