#pragma once

#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "coplan/flight.hpp"
#include "coplan/types.hpp"

namespace coplan {

enum class Connectivity { Orthogonal4, Diagonal8 };
enum class VertiportKind { Hub, Vertistop };
enum class ResourceKind { Sector, Vertiport };

struct VertiportSpec {
  CellIndex cell;
  VertiportKind kind = VertiportKind::Hub;
  int ops_capacity = 1;  // departures + arrivals per timestep
};

// Capacity of one cell replaced by `capacity` for absolute steps [from, to].
struct CapacityOverride {
  CellIndex cell;
  Timestep from = 0;
  Timestep to = 0;
  int capacity = 0;
};

struct GridConfig {
  int rows = 1;
  int cols = 1;
  double cell_size_km = 4.0;
  Connectivity connectivity = Connectivity::Orthogonal4;
  int horizon_steps = 18;
  double step_minutes = 5.0;
  int sector_capacity = 1;
  int vertiport_adjacent_capacity = 3;
  std::vector<VertiportSpec> vertiports;
  std::vector<CapacityOverride> capacity_overrides;
};

struct Resource {
  ResourceId id = 0;
  ResourceKind kind = ResourceKind::Sector;
  CellIndex cell;
};

// Immutable discretized airspace. Resource ids are row-major cell indices.
class AirspaceGrid {
 public:
  explicit AirspaceGrid(GridConfig config);

  const GridConfig& config() const { return config_; }
  int size() const { return static_cast<int>(resources_.size()); }
  int horizon_steps() const { return config_.horizon_steps; }

  const Resource& resource(ResourceId r) const;
  std::span<const Resource> resources() const { return resources_; }
  ResourceId at(CellIndex cell) const;
  bool contains(CellIndex cell) const;

  std::span<const ResourceId> neighbors(ResourceId r) const;
  bool adjacent(ResourceId a, ResourceId b) const;

  bool is_vertiport(ResourceId r) const { return resource(r).kind == ResourceKind::Vertiport; }
  bool is_vertiport_adjacent(ResourceId r) const { return vertiport_adjacent_flag_.at(r); }
  // Vertiports and vertiport-adjacent sectors: the PSU-managed resources.
  bool is_managed(ResourceId r) const { return is_vertiport(r) || is_vertiport_adjacent(r); }
  bool is_en_route(ResourceId r) const { return !is_managed(r); }

  std::span<const ResourceId> vertiports() const { return vertiports_; }
  std::span<const ResourceId> vertiport_adjacent() const { return vertiport_adjacent_; }
  const VertiportSpec& vertiport_spec(ResourceId r) const;

  int capacity(ResourceId r, Timestep t) const;

 private:
  void check_id(ResourceId r) const;

  GridConfig config_;
  std::vector<Resource> resources_;
  std::vector<std::vector<ResourceId>> adjacency_;
  std::vector<ResourceId> vertiports_;
  std::vector<ResourceId> vertiport_adjacent_;
  std::vector<bool> vertiport_adjacent_flag_;
  std::vector<int> base_capacity_;
  std::unordered_map<ResourceId, int> vertiport_index_;
  std::unordered_map<ResourceId, std::vector<CapacityOverride>> overrides_;
};

AirspaceGrid build_grid(const GridConfig& config);

// Occupancy counts O(r, t) keyed by absolute timestep. Value type, so a copy
// is a snapshot.
class Occupancy {
 public:
  int at(ResourceId r, Timestep t) const;
  void add(const FlightPlan& plan, int delta = 1);
  void add(ResourceTime rt, int delta = 1);
  const std::unordered_map<ResourceTime, int>& cells() const { return counts_; }
  bool operator==(const Occupancy& other) const;

 private:
  std::unordered_map<ResourceTime, int> counts_;
};

int remaining_capacity(const AirspaceGrid& grid, const Occupancy& occupancy, ResourceId r,
                       Timestep t);

struct FlightPlanRecord {
  FlightId flight = 0;
  OperatorId op = 0;
  FlightPlan plan;
  Timestep filed_at = 0;
};

class CapacityViolation : public std::runtime_error {
 public:
  CapacityViolation(FlightId flight, std::vector<ResourceTime> cells);
  const std::vector<ResourceTime>& cells() const { return cells_; }
  FlightId flight() const { return flight_; }

 private:
  FlightId flight_;
  std::vector<ResourceTime> cells_;
};

// Append-only flight database plus the occupancy index derived from it.
class OccupancyLedger {
 public:
  // Throws CapacityViolation listing every over-capacity cell; the ledger is
  // left unchanged in that case.
  void file_plan(const AirspaceGrid& grid, FlightPlanRecord record);

  const Occupancy& occupancy() const { return occupancy_; }
  std::span<const FlightPlanRecord> records() const { return records_; }
  // Recomputes the index from filed plans and compares.
  bool index_consistent() const;

 private:
  std::vector<FlightPlanRecord> records_;
  Occupancy occupancy_;
};

// Every (r, t) where the occupancy exceeds capacity.
std::vector<ResourceTime> overloaded_cells(const AirspaceGrid& grid, const Occupancy& occupancy);

}  // namespace coplan
