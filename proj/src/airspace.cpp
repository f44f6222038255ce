#include "coplan/airspace.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace coplan {

namespace {

std::string cell_str(CellIndex c) {
  std::ostringstream os;
  os << "(" << c.row << "," << c.col << ")";
  return os.str();
}

void validate(const GridConfig& config) {
  if (config.rows < 1 || config.cols < 1) throw ConfigError("grid must have at least one row and column");
  if (config.horizon_steps < 1) throw ConfigError("horizon_steps must be >= 1");
  if (!(config.step_minutes > 0)) throw ConfigError("step_minutes must be > 0");
  if (config.sector_capacity < 0 || config.vertiport_adjacent_capacity < 0) {
    throw ConfigError("capacities must be >= 0");
  }
  std::set<CellIndex> seen;
  for (const auto& v : config.vertiports) {
    if (v.cell.row < 0 || v.cell.row >= config.rows || v.cell.col < 0 || v.cell.col >= config.cols) {
      throw ConfigError("vertiport cell " + cell_str(v.cell) + " is outside the grid");
    }
    if (!seen.insert(v.cell).second) {
      throw ConfigError("two vertiports share cell " + cell_str(v.cell));
    }
    if (v.ops_capacity < 1) throw ConfigError("vertiport ops_capacity must be >= 1");
  }
  for (const auto& o : config.capacity_overrides) {
    if (o.cell.row < 0 || o.cell.row >= config.rows || o.cell.col < 0 || o.cell.col >= config.cols) {
      throw ConfigError("capacity override cell " + cell_str(o.cell) + " is outside the grid");
    }
    if (o.capacity < 0 || o.to < o.from) throw ConfigError("malformed capacity override");
  }
}

}  // namespace

AirspaceGrid::AirspaceGrid(GridConfig config) : config_(std::move(config)) {
  validate(config_);
  const int n = config_.rows * config_.cols;
  resources_.resize(n);
  adjacency_.resize(n);
  vertiport_adjacent_flag_.assign(n, false);
  base_capacity_.assign(n, config_.sector_capacity);

  for (int row = 0; row < config_.rows; ++row) {
    for (int col = 0; col < config_.cols; ++col) {
      const ResourceId id = row * config_.cols + col;
      resources_[id] = Resource{id, ResourceKind::Sector, {row, col}};
    }
  }
  for (std::size_t i = 0; i < config_.vertiports.size(); ++i) {
    const ResourceId id = at(config_.vertiports[i].cell);
    resources_[id].kind = ResourceKind::Vertiport;
    base_capacity_[id] = config_.vertiports[i].ops_capacity;
    vertiport_index_[id] = static_cast<int>(i);
    vertiports_.push_back(id);
  }
  std::sort(vertiports_.begin(), vertiports_.end());

  for (const auto& res : resources_) {
    for (int dr = -1; dr <= 1; ++dr) {
      for (int dc = -1; dc <= 1; ++dc) {
        if (dr == 0 && dc == 0) continue;
        if (config_.connectivity == Connectivity::Orthogonal4 && dr != 0 && dc != 0) continue;
        const CellIndex other{res.cell.row + dr, res.cell.col + dc};
        if (contains(other)) adjacency_[res.id].push_back(at(other));
      }
    }
    std::sort(adjacency_[res.id].begin(), adjacency_[res.id].end());
  }

  for (ResourceId v : vertiports_) {
    for (ResourceId s : adjacency_[v]) {
      if (resources_[s].kind == ResourceKind::Sector && !vertiport_adjacent_flag_[s]) {
        vertiport_adjacent_flag_[s] = true;
        base_capacity_[s] = config_.vertiport_adjacent_capacity;
      }
    }
  }
  for (ResourceId r = 0; r < n; ++r) {
    if (vertiport_adjacent_flag_[r]) vertiport_adjacent_.push_back(r);
  }
  for (const auto& o : config_.capacity_overrides) overrides_[at(o.cell)].push_back(o);
}

void AirspaceGrid::check_id(ResourceId r) const {
  if (r < 0 || r >= size()) throw std::out_of_range("unknown resource id " + std::to_string(r));
}

const Resource& AirspaceGrid::resource(ResourceId r) const {
  check_id(r);
  return resources_[r];
}

bool AirspaceGrid::contains(CellIndex cell) const {
  return cell.row >= 0 && cell.row < config_.rows && cell.col >= 0 && cell.col < config_.cols;
}

ResourceId AirspaceGrid::at(CellIndex cell) const {
  if (!contains(cell)) throw std::out_of_range("cell " + cell_str(cell) + " outside grid");
  return cell.row * config_.cols + cell.col;
}

std::span<const ResourceId> AirspaceGrid::neighbors(ResourceId r) const {
  check_id(r);
  return adjacency_[r];
}

bool AirspaceGrid::adjacent(ResourceId a, ResourceId b) const {
  const auto nb = neighbors(a);
  return std::binary_search(nb.begin(), nb.end(), b);
}

const VertiportSpec& AirspaceGrid::vertiport_spec(ResourceId r) const {
  auto it = vertiport_index_.find(r);
  if (it == vertiport_index_.end()) throw std::out_of_range("resource " + std::to_string(r) + " is not a vertiport");
  return config_.vertiports[it->second];
}

int AirspaceGrid::capacity(ResourceId r, Timestep t) const {
  check_id(r);
  if (auto it = overrides_.find(r); it != overrides_.end()) {
    // Last matching override wins.
    for (auto o = it->second.rbegin(); o != it->second.rend(); ++o) {
      if (t >= o->from && t <= o->to) return o->capacity;
    }
  }
  return base_capacity_[r];
}

AirspaceGrid build_grid(const GridConfig& config) { return AirspaceGrid(config); }

int Occupancy::at(ResourceId r, Timestep t) const {
  auto it = counts_.find({r, t});
  return it == counts_.end() ? 0 : it->second;
}

void Occupancy::add(ResourceTime rt, int delta) {
  int& v = counts_[rt];
  v += delta;
  if (v == 0) counts_.erase(rt);
}

void Occupancy::add(const FlightPlan& plan, int delta) {
  for (const auto& rt : plan.occupancies()) add(rt, delta);
}

bool Occupancy::operator==(const Occupancy& other) const { return counts_ == other.counts_; }

int remaining_capacity(const AirspaceGrid& grid, const Occupancy& occupancy, ResourceId r, Timestep t) {
  return std::max(grid.capacity(r, t) - occupancy.at(r, t), 0);
}

CapacityViolation::CapacityViolation(FlightId flight, std::vector<ResourceTime> cells)
    : std::runtime_error([&] {
        std::ostringstream os;
        os << "filing flight " << flight << " exceeds capacity at";
        for (const auto& c : cells) os << " (r=" << c.resource << ",t=" << c.t << ")";
        return os.str();
      }()),
      flight_(flight),
      cells_(std::move(cells)) {}

void OccupancyLedger::file_plan(const AirspaceGrid& grid, FlightPlanRecord record) {
  std::vector<ResourceTime> offending;
  for (const auto& rt : record.plan.occupancies()) {
    if (occupancy_.at(rt.resource, rt.t) + 1 > grid.capacity(rt.resource, rt.t)) offending.push_back(rt);
  }
  if (!offending.empty()) throw CapacityViolation(record.flight, std::move(offending));
  occupancy_.add(record.plan);
  records_.push_back(std::move(record));
}

bool OccupancyLedger::index_consistent() const {
  Occupancy recomputed;
  for (const auto& rec : records_) recomputed.add(rec.plan);
  return recomputed == occupancy_;
}

std::vector<ResourceTime> overloaded_cells(const AirspaceGrid& grid, const Occupancy& occupancy) {
  std::vector<ResourceTime> out;
  for (const auto& [rt, count] : occupancy.cells()) {
    if (count > grid.capacity(rt.resource, rt.t)) out.push_back(rt);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace coplan
