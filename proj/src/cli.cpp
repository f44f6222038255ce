#include "coplan/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <string>

#include "coplan/fixtures.hpp"
#include "coplan/io.hpp"
#include "coplan/sim.hpp"

namespace coplan::cli {

namespace fs = std::filesystem;

namespace {

struct AuditFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CampaignArgs {
  std::string config;
  std::string out;
  std::string mode;
  double gamma = 0.0, alpha = 0.0, demand = 0.0, time_limit = 0.0;
  std::uint64_t seed = 0;
  int days = 1;
  int workers = 0;
  bool record_timings = false;
  CLI::Option* mode_opt = nullptr;
  CLI::Option* gamma_opt = nullptr;
  CLI::Option* alpha_opt = nullptr;
  CLI::Option* demand_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* time_opt = nullptr;
  CLI::Option* workers_opt = nullptr;
};

void add_campaign_options(CLI::App* cmd, CampaignArgs& a, bool with_mode) {
  cmd->add_option("--config", a.config, "Scenario JSON file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", a.out, "Output directory")->required();
  if (with_mode) a.mode_opt = cmd->add_option("--mode", a.mode, "fair-coplan, coplan or tfmp");
  a.gamma_opt = cmd->add_option("--gamma", a.gamma, "Fairness weight");
  a.alpha_opt = cmd->add_option("--alpha", a.alpha, "Arrival-delay weight in [0, 1]");
  a.demand_opt = cmd->add_option("--demand", a.demand, "Flights per hour per hub");
  cmd->add_option("--days", a.days, "Simulated days")->check(CLI::NonNegativeNumber);
  a.seed_opt = cmd->add_option("--seed", a.seed, "Demand seed");
  a.time_opt = cmd->add_option("--time-limit", a.time_limit, "Seconds per MILP solve");
  a.workers_opt = cmd->add_option("--workers", a.workers, "Concurrent Step 2 solves");
  cmd->add_flag("--record-timings", a.record_timings, "Also write solve times (not reproducible)");
}

sim::ScenarioConfig effective_config(const CampaignArgs& a) {
  auto c = io::load_scenario(a.config);
  if (a.mode_opt && a.mode_opt->count()) c.mode = sim::parse_mode(a.mode);
  if (a.gamma_opt->count()) c.gamma = a.gamma;
  if (a.alpha_opt->count()) c.alpha = a.alpha;
  if (a.demand_opt->count()) c.demand_per_hour = a.demand;
  if (a.seed_opt->count()) c.seed = a.seed;
  if (a.time_opt->count()) c.time_limit_s = a.time_limit;
  if (a.workers_opt->count()) c.step2_workers = a.workers;
  c.validate();
  return c;
}

void write_audit(const fs::path& path, const std::vector<std::string>& problems) {
  std::string text;
  for (const auto& p : problems) text += p + "\n";
  io::write_text(path, text);
}

void print_tables(std::ostream& out, const sim::CampaignMetrics& metrics) {
  for (const auto& table : sim::summarize(metrics)) {
    if (table.name == "tdc_distribution") continue;
    out << "== " << table.name << "\n" << io::to_csv(table);
  }
}

int run_campaign_command(const CampaignArgs& a, bool compare_all, std::ostream& out, std::ostream& err) {
  const auto config = effective_config(a);
  const fs::path dir = a.out;
  const fs::path audit_path = dir / "audit.txt";
  io::CampaignWriter writer(dir, config, a.record_timings);
  fs::remove(audit_path);

  const auto runs = sim::campaign_runs(config, compare_all);
  sim::RunOptions options;
  options.backend = milp::default_backend();
  std::vector<std::string> problems;
  auto on_day = [&](const sim::RunSpec& run, const sim::DayResult& day) {
    writer.add_day(run, day);
    int served = 0, requests = 0;
    for (const auto& p : day.periods) {
      served += static_cast<int>(p.served.size());
      for (const auto& r : p.requests) requests += r.resubmissions == 0 ? 1 : 0;
      problems.insert(problems.end(), p.audit.begin(), p.audit.end());
    }
    const auto m = sim::day_metrics(day.day, day.periods, static_cast<int>(day.pending_at_end.size()));
    char line[256];
    std::snprintf(line, sizeof line, "%s day %d: %d requests, %d served, mean TDC %.3f, mean F %.3f\n",
                  run.label.c_str(), day.day, requests, served, m.mean_tdc, m.mean_fairness);
    err << line << std::flush;
    if (!problems.empty()) {
      write_audit(audit_path, problems);
      throw AuditFailure(std::to_string(problems.size()) + " audit problem(s) in " + run.label + " day " +
                         std::to_string(day.day));
    }
  };

  try {
    const auto metrics = sim::run_campaign(runs, a.days, options, on_day);
    writer.finish(metrics);
    print_tables(out, metrics);
  } catch (const AuditFailure& e) {
    err << "invariant breach: " << e.what() << "; see " << audit_path.string() << "\n";
    return kInvariant;
  } catch (const CapacityViolation& e) {
    problems.push_back(e.what());
    write_audit(audit_path, problems);
    err << "invariant breach: " << e.what() << "; see " << audit_path.string() << "\n";
    return kInvariant;
  }
  out << "wrote " << dir.string() << "\n";
  return kOk;
}

int report_command(const std::string& dir, std::ostream& out) {
  const auto metrics = io::load_metrics(dir);
  io::write_report(dir, metrics);
  print_tables(out, metrics);
  return kOk;
}

int oracle_command(int random_count, std::uint64_t seed, bool verbose, std::ostream& out, std::ostream& err) {
  const auto backend = milp::default_backend();
  const auto start = std::chrono::steady_clock::now();
  int passed = 0, failed = 0;
  const auto fixtures = oracle::tiny_fixtures(random_count, seed);
  for (const auto& inst : fixtures) {
    for (const auto& check : oracle::check_equivalence(inst, *backend)) {
      if (check.pass) {
        ++passed;
        if (verbose) out << "PASS " << check.fixture << " " << check.what << "\n";
      } else {
        ++failed;
        err << "FAIL " << check.fixture << " " << check.what << ": " << check.detail << "\n";
      }
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  char line[160];
  std::snprintf(line, sizeof line, "oracle-check: %d fixtures, %d/%d checks passed in %.1f s\n",
                static_cast<int>(fixtures.size()), passed, passed + failed, secs);
  out << line;
  return failed == 0 ? kOk : kCheckFailed;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Negotiated, fairness-aware UAM flight planner and campaign simulator"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  CampaignArgs sim_args, cmp_args;
  auto* simulate = app.add_subcommand("simulate", "Run a campaign in one mode (fair-coplan adds its gamma = 0 pair)");
  add_campaign_options(simulate, sim_args, true);
  auto* compare = app.add_subcommand("compare", "Run fair-coplan, coplan and tfmp on the same demand");
  add_campaign_options(compare, cmp_args, false);

  std::string report_dir;
  auto* report = app.add_subcommand("report", "Recompute metrics and summaries of an output directory");
  report->add_option("--out", report_dir, "Existing output directory")->required()->check(CLI::ExistingDirectory);

  int random_count = 32;
  std::uint64_t fixture_seed = 20240611;
  bool verbose = false;
  auto* oracle_check = app.add_subcommand("oracle-check", "Compare every model with brute-force optima on tiny fixtures");
  oracle_check->add_option("--random", random_count, "Seeded random fixtures on top of the fixed ones")
      ->check(CLI::NonNegativeNumber);
  oracle_check->add_option("--seed", fixture_seed, "Fixture seed");
  oracle_check->add_flag("-v,--verbose", verbose, "List passing checks too");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << "run with --help for usage\n";
    return kUsage;
  }

  try {
    if (*simulate) return run_campaign_command(sim_args, false, out, err);
    if (*compare) return run_campaign_command(cmp_args, true, out, err);
    if (*report) return report_command(report_dir, out);
    if (*oracle_check) return oracle_command(random_count, fixture_seed, verbose, out, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kRuntime;
  }
  return kUsage;
}

}  // namespace coplan::cli
