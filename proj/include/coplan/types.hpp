#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace coplan {

using ResourceId = int;
using Timestep = int;
using FlightId = std::int64_t;
using OperatorId = int;

struct CellIndex {
  int row = 0;
  int col = 0;
  auto operator<=>(const CellIndex&) const = default;
};

struct ResourceTime {
  ResourceId resource = 0;
  Timestep t = 0;
  auto operator<=>(const ResourceTime&) const = default;
};

// Window of absolute timesteps covered by one planning period.
struct Horizon {
  Timestep start = 0;
  int length = 0;

  Timestep last() const { return start + length - 1; }
  bool contains(Timestep t) const { return t >= start && t <= last(); }
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a planner output breaks an invariant that the formulation is
// supposed to guarantee.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace coplan

template <>
struct std::hash<coplan::ResourceTime> {
  std::size_t operator()(const coplan::ResourceTime& rt) const noexcept {
    return std::hash<std::int64_t>{}((static_cast<std::int64_t>(rt.resource) << 32) ^
                                     static_cast<std::uint32_t>(rt.t));
  }
};
