#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "coplan/cli.hpp"
#include "coplan/io.hpp"

namespace coplan {
namespace {

namespace fs = std::filesystem;

sim::ScenarioConfig tiny_scenario() {
  sim::ScenarioConfig c;
  c.name = "tiny";
  c.grid.rows = 4;
  c.grid.cols = 4;
  c.grid.horizon_steps = 10;
  c.grid.vertiport_adjacent_capacity = 3;
  c.grid.vertiports = {{{0, 0}, VertiportKind::Hub, 4},
                       {{3, 3}, VertiportKind::Hub, 4},
                       {{0, 3}, VertiportKind::Vertistop, 2}};
  c.grid.capacity_overrides = {{{1, 1}, 2, 4, 0}};
  c.demand_per_hour = 18.0;
  c.periods_per_day = 4;
  c.seed = 11;
  return c;
}

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("coplan_test_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Every regular file under `dir`, keyed by relative path.
std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = slurp(e.path());
  }
  return out;
}

int cli(std::vector<std::string> args, std::string* out_text = nullptr, std::string* err_text = nullptr) {
  args.insert(args.begin(), "coplan");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int rc = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return rc;
}

TEST(ScenarioFile, RoundTrips) {
  TempDir tmp;
  const auto c = tiny_scenario();
  io::save_scenario(tmp.path() / "s.json", c);
  const auto back = io::load_scenario(tmp.path() / "s.json");
  EXPECT_EQ(io::scenario_to_json(back), io::scenario_to_json(c));
  EXPECT_EQ(back.grid.capacity_overrides.size(), 1u);
  EXPECT_EQ(back.grid.vertiports[2].kind, VertiportKind::Vertistop);
}

TEST(ScenarioFile, RejectsUnknownKeysAndVersions) {
  auto j = io::scenario_to_json(tiny_scenario());
  j["demand"] = 3;
  EXPECT_THROW(io::scenario_from_json(j), ConfigError);
  j = io::scenario_to_json(tiny_scenario());
  j["format_version"] = 99;
  EXPECT_THROW(io::scenario_from_json(j), ConfigError);
  j = io::scenario_to_json(tiny_scenario());
  j["grid"]["connectivity"] = "hex";
  EXPECT_THROW(io::scenario_from_json(j), ConfigError);
  j = io::scenario_to_json(tiny_scenario());
  j["alpha"] = "high";
  EXPECT_THROW(io::scenario_from_json(j), ConfigError);
  j = io::scenario_to_json(tiny_scenario());
  j.erase("grid");
  EXPECT_THROW(io::scenario_from_json(j), ConfigError);
}

TEST(ScenarioFile, DefaultsFillMissingKeys) {
  io::json j = {{"grid", {{"rows", 3}, {"cols", 3}, {"vertiports", {{{"row", 0}, {"col", 0}}, {{"row", 2}, {"col", 2}}}}}}};
  const auto c = io::scenario_from_json(j);
  EXPECT_EQ(c.flexibility, 3);
  EXPECT_EQ(c.alpha, 0.3);
  EXPECT_EQ(c.grid.vertiports[0].kind, VertiportKind::Hub);
}

TEST(Records, PeriodRoundTrip) {
  const auto c = tiny_scenario();
  const AirspaceGrid grid(c.grid);
  const auto day = sim::run_day(c, grid, 0, {});
  for (const auto& p : day.periods) {
    const auto j = io::period_to_json(p);
    EXPECT_EQ(io::period_to_json(io::period_from_json(io::json::parse(j.dump()))), j);
  }
}

TEST(Cli, UsageErrors) {
  std::string err;
  EXPECT_EQ(cli({}, nullptr, &err), cli::kUsage);
  EXPECT_EQ(cli({"launch"}), cli::kUsage);
  EXPECT_EQ(cli({"simulate", "--out", "/tmp/x"}), cli::kUsage);
  EXPECT_EQ(cli({"simulate", "--config", "/nonexistent.json", "--out", "/tmp/x"}), cli::kUsage);
  std::string help;
  EXPECT_EQ(cli({"--help"}, &help), cli::kOk);
  EXPECT_NE(help.find("oracle-check"), std::string::npos);
}

TEST(Cli, BadOverrideIsAConfigError) {
  TempDir tmp;
  io::save_scenario(tmp.path() / "s.json", tiny_scenario());
  std::string err;
  EXPECT_EQ(cli({"simulate", "--config", (tmp.path() / "s.json").string(), "--out", (tmp.path() / "o").string(),
                 "--alpha", "2"},
                nullptr, &err),
            cli::kUsage);
  EXPECT_NE(err.find("alpha"), std::string::npos);
  std::ofstream(tmp.path() / "broken.json") << "{ not json";
  EXPECT_EQ(cli({"simulate", "--config", (tmp.path() / "broken.json").string(), "--out", (tmp.path() / "o").string()}),
            cli::kUsage);
}

TEST(Cli, SimulateRecordsOverridesAndReportIsReproducible) {
  TempDir tmp;
  io::save_scenario(tmp.path() / "s.json", tiny_scenario());
  const auto out = tmp.path() / "out";
  ASSERT_EQ(cli({"simulate", "--config", (tmp.path() / "s.json").string(), "--out", out.string(), "--days", "2",
                 "--gamma", "2.5", "--seed", "5", "--demand", "20", "--alpha", "0.4", "--time-limit", "20"}),
            cli::kOk);
  const auto effective = io::load_scenario(out / "config.json");
  EXPECT_EQ(effective.gamma, 2.5);
  EXPECT_EQ(effective.seed, 5u);
  EXPECT_EQ(effective.demand_per_hour, 20.0);
  EXPECT_EQ(effective.alpha, 0.4);
  EXPECT_EQ(effective.time_limit_s, 20.0);
  EXPECT_TRUE(fs::exists(out / "runs" / "fair-coplan" / "periods.jsonl"));
  EXPECT_TRUE(fs::exists(out / "runs" / "coplan" / "days.csv"));
  EXPECT_TRUE(fs::exists(out / "summary" / "fairness_improvement.csv"));
  EXPECT_FALSE(fs::exists(out / "summary" / "solve_times.csv"));

  const auto before = snapshot(out);
  ASSERT_EQ(cli({"report", "--out", out.string()}), cli::kOk);
  EXPECT_EQ(snapshot(out), before);
}

TEST(Cli, CompareSharesDemandAcrossModes) {
  TempDir tmp;
  io::save_scenario(tmp.path() / "s.json", tiny_scenario());
  const auto out = tmp.path() / "out";
  ASSERT_EQ(cli({"compare", "--config", (tmp.path() / "s.json").string(), "--out", out.string(), "--days", "1"}),
            cli::kOk);
  const auto fair = slurp(out / "runs" / "fair-coplan" / "demand.jsonl");
  EXPECT_FALSE(fair.empty());
  EXPECT_EQ(slurp(out / "runs" / "coplan" / "demand.jsonl"), fair);
  EXPECT_EQ(slurp(out / "runs" / "tfmp" / "demand.jsonl"), fair);
}

TEST(Cli, RecordTimingsAddsSolveTimes) {
  TempDir tmp;
  auto c = tiny_scenario();
  c.mode = sim::Mode::Coplan;
  io::save_scenario(tmp.path() / "s.json", c);
  const auto out = tmp.path() / "out";
  ASSERT_EQ(cli({"simulate", "--config", (tmp.path() / "s.json").string(), "--out", out.string(), "--record-timings"}),
            cli::kOk);
  EXPECT_TRUE(fs::exists(out / "summary" / "solve_times.csv"));
  EXPECT_TRUE(fs::exists(out / "runs" / "coplan" / "timings.jsonl"));
  EXPECT_FALSE(fs::exists(out / "runs" / "fair-coplan"));
}

TEST(Cli, OracleCheckOnFixedFixtures) {
  std::string out;
  EXPECT_EQ(cli({"oracle-check", "--random", "2"}, &out), cli::kOk);
  EXPECT_NE(out.find("checks passed"), std::string::npos);
}

}  // namespace
}  // namespace coplan
