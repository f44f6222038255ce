#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "coplan/airspace.hpp"
#include "coplan/baseline.hpp"
#include "coplan/flight.hpp"
#include "coplan/step1.hpp"
#include "coplan/step2.hpp"
#include "coplan/step3.hpp"

// Brute-force ground truth for tiny instances. Feasibility is always decided
// by the production checkers (check_plan, check_choice_sets,
// check_route_plan); the oracle only enumerates candidates.
namespace coplan::oracle {

inline constexpr std::int64_t kEnumerationGuard = 10'000'000;

class GuardExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Exact fraction over int64, always normalized (den > 0, gcd 1).
class Rational {
 public:
  Rational() = default;
  Rational(std::int64_t n) : num_(n) {}  // NOLINT(google-explicit-constructor)
  Rational(std::int64_t n, std::int64_t d);

  // Exact value of a decimal parameter such as 0.3; throws
  // std::invalid_argument if x has more than 9 decimal digits.
  static Rational from_decimal(double x);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  std::string str() const;

  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);
  friend bool operator==(const Rational& a, const Rational& b) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

Rational exact_tdc(const FlightPlan& plan, const FlightRequest& request, const Rational& alpha);
// max - min of L(after)/L(before) over flights matched by id.
Rational exact_fairness(std::span<const FlightPlan> before, std::span<const FlightPlan> after);

// Does the floating-point `value` round to exactly `exact`? Solver objective
// values are sums of products of small decimals, so anything further than
// 1e-9 from the rational is a genuine mismatch.
bool matches(double value, const Rational& exact);

struct TinyInstance {
  std::string name;
  GridConfig grid;
  Horizon horizon;
  std::vector<FlightPlanRecord> filed;  // pre-existing traffic
  std::vector<FlightRequest> requests;
  std::vector<ChoiceSet> choices;       // explicit; empty means full_choice_set

  Occupancy occupancy(const AirspaceGrid& g) const;
  ChoiceSet choices_for(const AirspaceGrid& g, std::size_t f) const;
};

// Every in-domain (r, t) a flight could be offered, before Step 1 pruning:
// window and slot bounds, remaining capacity >= 1.
ChoiceSet full_choice_set(const AirspaceGrid& grid, const Occupancy& occupancy, const Horizon& horizon,
                          const FlightRequest& request);

// All plans accepted by check_plan, in (departure, path) order, without
// duplicates. Throws GuardExceeded when more than `guard` walks are explored.
std::vector<FlightPlan> enumerate_feasible_plans(const AirspaceGrid& grid, const Occupancy& occupancy,
                                                 const Horizon& horizon, const FlightRequest& request,
                                                 const ChoiceSet& choices, PlanCheckOptions options = {},
                                                 std::int64_t guard = kEnumerationGuard);

struct Step2Optimum {
  std::optional<FlightPlan> plan;  // first minimum in enumeration order
  Rational tdc;
  std::size_t feasible_plans = 0;
};

Step2Optimum step2_optimum(const AirspaceGrid& grid, const Occupancy& occupancy, const Horizon& horizon,
                           const FlightRequest& request, const ChoiceSet& choices, const Rational& alpha);

struct Step1Optimum {
  std::int64_t total_choices = 0;
  std::vector<ChoiceSet> choice_sets;  // one maximizer
  std::int64_t nodes = 0;
};

// Maximum number of (flight, resource, time) choices over all assignments
// accepted by check_choice_sets. Branch and bound over per-(flight, resource)
// occupancy strings.
Step1Optimum step1_optimum(const AirspaceGrid& grid, const Occupancy& occupancy, const Horizon& horizon,
                           std::span<const FlightRequest> requests, std::int64_t guard = kEnumerationGuard);

struct JointOptimum {
  bool feasible = false;
  std::vector<FlightPlan> plans;  // aligned with the inputs
  Rational objective;             // sum TDC + gamma * F
  Rational total_tdc;
  Rational fairness;
  std::int64_t combinations = 0;
};

// Cross product of per-flight feasible plans, filtered by joint en-route
// capacity, minimizing sum TDC + gamma * F. Ties go to the lexicographically
// smallest (departure, path) tuple sequence.
JointOptimum oracle_joint_optimum(const AirspaceGrid& grid, const Occupancy& occupancy, const Horizon& horizon,
                                  std::span<const DeconflictionInput> flights, const Rational& alpha,
                                  const Rational& gamma, std::int64_t guard = kEnumerationGuard);

struct TfmpOptimum {
  std::vector<std::optional<FlightPlan>> plans;  // nullopt: not scheduled
  Rational objective;
  std::int64_t combinations = 0;
};

// Every departure time and hold assignment along the fixed routes, plus
// "not scheduled", filtered by capacity on all resources.
TfmpOptimum tfmp_optimum(const AirspaceGrid& grid, const Occupancy& occupancy, const Horizon& horizon,
                         std::span<const FlightRequest> requests, std::span<const FixedRoute> routes,
                         const Rational& alpha, std::int64_t guard = kEnumerationGuard);

}  // namespace coplan::oracle
