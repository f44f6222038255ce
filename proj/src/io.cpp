#include "coplan/io.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace coplan::io {

namespace fs = std::filesystem;

namespace {

void reject_unknown(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& [key, _] : j.items()) {
    if (!keys.contains(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

std::string connectivity_name(Connectivity c) { return c == Connectivity::Diagonal8 ? "diagonal8" : "orthogonal4"; }

Connectivity parse_connectivity(const std::string& s) {
  if (s == "orthogonal4") return Connectivity::Orthogonal4;
  if (s == "diagonal8") return Connectivity::Diagonal8;
  throw ConfigError("grid.connectivity: expected orthogonal4 or diagonal8, got '" + s + "'");
}

json grid_to_json(const GridConfig& g) {
  json vps = json::array();
  for (const auto& v : g.vertiports) {
    vps.push_back({{"row", v.cell.row},
                   {"col", v.cell.col},
                   {"kind", v.kind == VertiportKind::Hub ? "hub" : "vertistop"},
                   {"ops_capacity", v.ops_capacity}});
  }
  json overrides = json::array();
  for (const auto& o : g.capacity_overrides) {
    overrides.push_back(
        {{"row", o.cell.row}, {"col", o.cell.col}, {"from", o.from}, {"to", o.to}, {"capacity", o.capacity}});
  }
  return {{"rows", g.rows},
          {"cols", g.cols},
          {"cell_size_km", g.cell_size_km},
          {"connectivity", connectivity_name(g.connectivity)},
          {"horizon_steps", g.horizon_steps},
          {"step_minutes", g.step_minutes},
          {"sector_capacity", g.sector_capacity},
          {"vertiport_adjacent_capacity", g.vertiport_adjacent_capacity},
          {"vertiports", vps},
          {"capacity_overrides", overrides}};
}

GridConfig grid_from_json(const json& j) {
  const std::string w = "grid";
  reject_unknown(j,
                 {"rows", "cols", "cell_size_km", "connectivity", "horizon_steps", "step_minutes", "sector_capacity",
                  "vertiport_adjacent_capacity", "vertiports", "capacity_overrides"},
                 w);
  GridConfig g;
  read(j, "rows", g.rows, w);
  read(j, "cols", g.cols, w);
  read(j, "cell_size_km", g.cell_size_km, w);
  std::string conn = connectivity_name(g.connectivity);
  read(j, "connectivity", conn, w);
  g.connectivity = parse_connectivity(conn);
  read(j, "horizon_steps", g.horizon_steps, w);
  read(j, "step_minutes", g.step_minutes, w);
  read(j, "sector_capacity", g.sector_capacity, w);
  read(j, "vertiport_adjacent_capacity", g.vertiport_adjacent_capacity, w);
  if (j.contains("vertiports")) {
    for (const auto& v : j.at("vertiports")) {
      const std::string vw = "grid.vertiports[]";
      reject_unknown(v, {"row", "col", "kind", "ops_capacity"}, vw);
      VertiportSpec spec;
      read(v, "row", spec.cell.row, vw);
      read(v, "col", spec.cell.col, vw);
      std::string kind = "hub";
      read(v, "kind", kind, vw);
      if (kind != "hub" && kind != "vertistop") throw ConfigError(vw + ".kind: expected hub or vertistop");
      spec.kind = kind == "hub" ? VertiportKind::Hub : VertiportKind::Vertistop;
      read(v, "ops_capacity", spec.ops_capacity, vw);
      g.vertiports.push_back(spec);
    }
  }
  if (j.contains("capacity_overrides")) {
    for (const auto& o : j.at("capacity_overrides")) {
      const std::string ow = "grid.capacity_overrides[]";
      reject_unknown(o, {"row", "col", "from", "to", "capacity"}, ow);
      CapacityOverride c;
      read(o, "row", c.cell.row, ow);
      read(o, "col", c.cell.col, ow);
      read(o, "from", c.from, ow);
      read(o, "to", c.to, ow);
      read(o, "capacity", c.capacity, ow);
      g.capacity_overrides.push_back(c);
    }
  }
  return g;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<json> read_jsonl(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::vector<json> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(json::parse(line));
  }
  return out;
}

}  // namespace

json scenario_to_json(const sim::ScenarioConfig& c) {
  return {{"format_version", kFormatVersion},
          {"name", c.name},
          {"grid", grid_to_json(c.grid)},
          {"demand_per_hour", c.demand_per_hour},
          {"periods_per_day", c.periods_per_day},
          {"cadence_steps", c.cadence_steps},
          {"alpha", c.alpha},
          {"gamma", c.gamma},
          {"flexibility", c.flexibility},
          {"max_dwell", c.max_dwell},
          {"seed", c.seed},
          {"mode", sim::to_string(c.mode)},
          {"time_limit_s", c.time_limit_s},
          {"step2_workers", c.step2_workers}};
}

sim::ScenarioConfig scenario_from_json(const json& j) {
  const std::string w = "scenario";
  reject_unknown(j,
                 {"format_version", "name", "grid", "demand_per_hour", "periods_per_day", "cadence_steps", "alpha",
                  "gamma", "flexibility", "max_dwell", "seed", "mode", "time_limit_s", "step2_workers"},
                 w);
  int version = kFormatVersion;
  read(j, "format_version", version, w);
  if (version != kFormatVersion) {
    throw ConfigError("unsupported format_version " + std::to_string(version) + " (expected " +
                      std::to_string(kFormatVersion) + ")");
  }
  if (!j.contains("grid")) throw ConfigError("scenario: missing grid");
  sim::ScenarioConfig c;
  c.grid = grid_from_json(j.at("grid"));
  read(j, "name", c.name, w);
  read(j, "demand_per_hour", c.demand_per_hour, w);
  read(j, "periods_per_day", c.periods_per_day, w);
  read(j, "cadence_steps", c.cadence_steps, w);
  read(j, "alpha", c.alpha, w);
  read(j, "gamma", c.gamma, w);
  read(j, "flexibility", c.flexibility, w);
  read(j, "max_dwell", c.max_dwell, w);
  read(j, "seed", c.seed, w);
  std::string mode = sim::to_string(c.mode);
  read(j, "mode", mode, w);
  c.mode = sim::parse_mode(mode);
  read(j, "time_limit_s", c.time_limit_s, w);
  read(j, "step2_workers", c.step2_workers, w);
  c.validate();
  return c;
}

sim::ScenarioConfig load_scenario(const fs::path& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return scenario_from_json(j);
}

void save_scenario(const fs::path& path, const sim::ScenarioConfig& config) {
  write_text(path, scenario_to_json(config).dump(2) + "\n");
}

json request_to_json(const FlightRequest& r) {
  json dwell = json::array();
  for (const auto& [res, l] : r.dwell) dwell.push_back({res, l});
  return {{"id", r.id},
          {"op", r.op},
          {"origin", r.origin},
          {"destination", r.destination},
          {"departure", r.departure},
          {"arrival", r.arrival},
          {"flexibility", r.flexibility},
          {"dwell", dwell},
          {"resubmissions", r.resubmissions},
          {"original_departure", r.original_departure},
          {"original_arrival", r.original_arrival}};
}

FlightRequest request_from_json(const json& j) {
  FlightRequest r;
  r.id = j.at("id").get<FlightId>();
  r.op = j.at("op").get<OperatorId>();
  r.origin = j.at("origin").get<ResourceId>();
  r.destination = j.at("destination").get<ResourceId>();
  r.departure = j.at("departure").get<Timestep>();
  r.arrival = j.at("arrival").get<Timestep>();
  r.flexibility = j.at("flexibility").get<int>();
  for (const auto& pair : j.at("dwell")) r.dwell[pair.at(0).get<ResourceId>()] = pair.at(1).get<int>();
  r.resubmissions = j.at("resubmissions").get<int>();
  r.original_departure = j.at("original_departure").get<Timestep>();
  r.original_arrival = j.at("original_arrival").get<Timestep>();
  return r;
}

json plan_to_json(const FlightPlan& p) {
  return {{"flight", p.flight}, {"departure", p.departure}, {"arrival", p.arrival()}, {"path", p.path}};
}

FlightPlan plan_from_json(const json& j) {
  FlightPlan p;
  p.flight = j.at("flight").get<FlightId>();
  p.departure = j.at("departure").get<Timestep>();
  p.path = j.at("path").get<std::vector<ResourceId>>();
  return p;
}

json period_to_json(const sim::PeriodResult& p) {
  json requests = json::array();
  for (const auto& r : p.requests) requests.push_back(request_to_json(r));
  json choices = json::array();
  for (const auto& cs : p.choice_sets) {
    json cells = json::array();
    for (const auto& rt : cs.choices) cells.push_back({rt.resource, rt.t});
    choices.push_back({{"flight", cs.flight}, {"choices", cells}});
  }
  json proposals = json::array();
  for (const auto& plan : p.proposals) proposals.push_back(plan_to_json(plan));
  json conflict_cells = json::array();
  for (const auto& c : p.conflicts.cells) {
    conflict_cells.push_back({{"resource", c.resource}, {"t", c.t}, {"demand", c.demand}, {"capacity", c.capacity}});
  }
  json served = json::array();
  for (const auto& s : p.served) {
    json entry = {{"flight", s.request.id},
                  {"stage", s.stage},
                  {"plan", plan_to_json(s.plan)},
                  {"tdc", s.tdc},
                  {"tdc_total", s.tdc_total}};
    if (s.ratio) entry["ratio"] = *s.ratio;
    served.push_back(std::move(entry));
  }
  return {{"type", "period"},
          {"day", p.day},
          {"period", p.period},
          {"horizon_start", p.horizon.start},
          {"horizon_length", p.horizon.length},
          {"requests", requests},
          {"choice_sets", choices},
          {"proposals", proposals},
          {"conflicts", {{"cells", conflict_cells},
                         {"conflicting", p.conflicts.conflicting},
                         {"clean", p.conflicts.clean}}},
          {"deconflicted", p.deconflicted},
          {"step3_exact", p.step3_exact},
          {"fairness", p.fairness},
          {"served", served},
          {"carryovers", p.carryovers},
          {"rejected", p.rejected},
          {"audit", p.audit}};
}

sim::PeriodResult period_from_json(const json& j) {
  sim::PeriodResult p;
  p.day = j.at("day").get<int>();
  p.period = j.at("period").get<int>();
  p.horizon = {j.at("horizon_start").get<Timestep>(), j.at("horizon_length").get<int>()};
  std::map<FlightId, const FlightRequest*> by_id;
  for (const auto& r : j.at("requests")) p.requests.push_back(request_from_json(r));
  for (const auto& r : p.requests) by_id[r.id] = &r;
  for (std::size_t i = 0; i < j.at("choice_sets").size(); ++i) {
    const auto& cs = j.at("choice_sets")[i];
    ChoiceSet set;
    set.flight = cs.at("flight").get<FlightId>();
    if (i < p.requests.size()) {
      set.origin = p.requests[i].origin;
      set.destination = p.requests[i].destination;
    }
    for (const auto& cell : cs.at("choices")) set.choices.insert({cell.at(0).get<ResourceId>(), cell.at(1).get<Timestep>()});
    p.choice_sets.push_back(std::move(set));
  }
  for (const auto& plan : j.at("proposals")) p.proposals.push_back(plan_from_json(plan));
  for (const auto& c : j.at("conflicts").at("cells")) {
    p.conflicts.cells.push_back(
        {c.at("resource").get<ResourceId>(), c.at("t").get<Timestep>(), c.at("demand").get<int>(), c.at("capacity").get<int>()});
  }
  p.conflicts.conflicting = j.at("conflicts").at("conflicting").get<std::vector<FlightId>>();
  p.conflicts.clean = j.at("conflicts").at("clean").get<std::vector<FlightId>>();
  p.deconflicted = j.at("deconflicted").get<bool>();
  p.step3_exact = j.at("step3_exact").get<bool>();
  p.fairness = j.at("fairness").get<double>();
  for (const auto& s : j.at("served")) {
    sim::ServedFlight f;
    const auto id = s.at("flight").get<FlightId>();
    f.request = *by_id.at(id);
    f.stage = s.at("stage").get<std::string>();
    f.plan = plan_from_json(s.at("plan"));
    f.tdc = s.at("tdc").get<double>();
    f.tdc_total = s.at("tdc_total").get<double>();
    if (s.contains("ratio")) f.ratio = s.at("ratio").get<double>();
    p.served.push_back(std::move(f));
  }
  p.carryovers = j.at("carryovers").get<std::vector<FlightId>>();
  p.rejected = j.at("rejected").get<std::vector<FlightId>>();
  p.audit = j.at("audit").get<std::vector<std::string>>();
  return p;
}

std::string to_csv(const sim::SummaryTable& table) {
  std::string out;
  auto line = [&](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i > 0) out += ',';
      out += fields[i];
    }
    out += '\n';
  };
  line(table.header);
  for (const auto& row : table.rows) line(row);
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

namespace {

sim::SummaryTable days_table(const sim::RunMetrics& run) {
  sim::SummaryTable t;
  for (const auto& table : sim::summarize({0.0, {sim::RunMetrics{run.label, run.mode, run.gamma, run.days, {}}}})) {
    if (table.name == "tdc_distribution") t = table;
  }
  // Drop the run column; the file already lives under the run directory.
  t.header.erase(t.header.begin());
  for (auto& row : t.rows) row.erase(row.begin());
  return t;
}

}  // namespace

CampaignWriter::CampaignWriter(fs::path out, const sim::ScenarioConfig& config, bool record_timings)
    : out_(std::move(out)), record_timings_(record_timings) {
  fs::create_directories(out_);
  // Stale files from an earlier campaign would corrupt the streamed records.
  fs::remove_all(out_ / "runs");
  fs::remove_all(out_ / "summary");
  fs::remove(out_ / "manifest.json");
  save_scenario(out_ / "config.json", config);
}

void CampaignWriter::append(const fs::path& path, const std::string& line) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << line << '\n';
}

void CampaignWriter::add_day(const sim::RunSpec& run, const sim::DayResult& day) {
  const fs::path dir = out_ / "runs" / run.label;
  if (!fs::exists(dir / "run.json")) {
    write_text(dir / "run.json", json{{"format_version", kFormatVersion},
                                      {"label", run.label},
                                      {"mode", sim::to_string(run.config.mode)},
                                      {"gamma", run.config.gamma}}
                                         .dump(2) +
                                     "\n");
  }
  for (const auto& p : day.periods) {
    for (const auto& r : p.requests) {
      if (r.resubmissions == 0) {
        json rec = request_to_json(r);
        rec["day"] = p.day;
        rec["period"] = p.period;
        append(dir / "demand.jsonl", rec.dump());
      }
    }
    append(dir / "periods.jsonl", period_to_json(p).dump());
    for (const auto& s : p.served) {
      json occ = json::array();
      for (const auto& rt : s.plan.occupancies()) occ.push_back({rt.resource, rt.t});
      append(dir / "flights.jsonl", json{{"day", p.day},
                                         {"flight", s.request.id},
                                         {"op", s.request.op},
                                         {"filed_at", p.horizon.start},
                                         {"departure", s.plan.departure},
                                         {"arrival", s.plan.arrival()},
                                         {"occupancies", occ}}
                                        .dump());
    }
    if (record_timings_) {
      append(dir / "timings.jsonl", json{{"day", p.day},
                                         {"period", p.period},
                                         {"step1_s", p.timing.step1},
                                         {"step2_total_s", p.timing.step2_total},
                                         {"step2_max_s", p.timing.step2_max},
                                         {"step3_s", p.timing.step3},
                                         {"tfmp_s", p.timing.tfmp},
                                         {"wall_s", p.timing.wall}}
                                        .dump());
    }
  }
  json pending = json::array();
  for (const auto& r : day.pending_at_end) pending.push_back(request_to_json(r));
  append(dir / "periods.jsonl", json{{"type", "day_end"}, {"day", day.day}, {"pending", pending}}.dump());
}

void CampaignWriter::finish(const sim::CampaignMetrics& metrics) {
  json runs = json::array();
  for (const auto& r : metrics.runs) runs.push_back(r.label);
  write_text(out_ / "manifest.json",
             json{{"format_version", kFormatVersion}, {"runs", runs}}.dump(2) + "\n");
  for (const auto& r : metrics.runs) {
    // Runs without days never produced a record.
    if (!fs::exists(out_ / "runs" / r.label / "run.json")) {
      write_text(out_ / "runs" / r.label / "run.json",
                 json{{"format_version", kFormatVersion},
                      {"label", r.label},
                      {"mode", sim::to_string(r.mode)},
                      {"gamma", r.gamma}}
                         .dump(2) +
                     "\n");
    }
  }
  if (record_timings_) {
    write_report(out_, metrics);
    return;
  }
  auto untimed = metrics;
  for (auto& r : untimed.runs) r.timings.clear();
  write_report(out_, untimed);
}

sim::CampaignMetrics load_metrics(const fs::path& out) {
  const auto manifest = json::parse(read_file(out / "manifest.json"));
  if (manifest.at("format_version").get<int>() != kFormatVersion) {
    throw ConfigError("unsupported output format_version in " + (out / "manifest.json").string());
  }
  const auto config = load_scenario(out / "config.json");
  sim::CampaignMetrics metrics;
  metrics.demand_per_hour = config.demand_per_hour;
  for (const auto& label : manifest.at("runs")) {
    const fs::path dir = out / "runs" / label.get<std::string>();
    const auto info = json::parse(read_file(dir / "run.json"));
    sim::RunMetrics run{info.at("label").get<std::string>(), sim::parse_mode(info.at("mode").get<std::string>()),
                        info.at("gamma").get<double>(), {}, {}};
    if (fs::exists(dir / "periods.jsonl")) {
      std::vector<sim::PeriodResult> periods;
      for (const auto& rec : read_jsonl(dir / "periods.jsonl")) {
        if (rec.at("type") == "period") {
          periods.push_back(period_from_json(rec));
          continue;
        }
        const int day = rec.at("day").get<int>();
        run.days.push_back(sim::day_metrics(day, periods, static_cast<int>(rec.at("pending").size())));
        periods.clear();
      }
    }
    metrics.runs.push_back(std::move(run));
  }
  return metrics;
}

void write_report(const fs::path& out, const sim::CampaignMetrics& metrics) {
  for (const auto& run : metrics.runs) write_text(out / "runs" / run.label / "days.csv", to_csv(days_table(run)));
  for (const auto& table : sim::summarize(metrics)) {
    write_text(out / "summary" / (table.name + ".csv"), to_csv(table));
  }
}

}  // namespace coplan::io
