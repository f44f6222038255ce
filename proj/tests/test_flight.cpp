#include <gtest/gtest.h>

#include <random>

#include "coplan/flight.hpp"
#include "coplan/oracle.hpp"

namespace coplan {
namespace {

FlightRequest request(Timestep d, Timestep a) {
  FlightRequest r;
  r.id = 7;
  r.departure = d;
  r.arrival = a;
  r.original_departure = d;
  r.original_arrival = a;
  r.flexibility = 3;
  return r;
}

TEST(Tdc, OnTimeIsZero) {
  const FlightPlan plan{7, 2, {0, 1, 2}};
  EXPECT_DOUBLE_EQ(tdc(plan, request(2, 4), {0.3}), 0.0);
}

TEST(Tdc, WeightsArrivalAndDepartureDelay) {
  // Departs 1 late, arrives 3 late.
  const FlightPlan plan{7, 3, {0, 1, 1, 1, 2}};
  EXPECT_DOUBLE_EQ(tdc(plan, request(2, 4), {0.3}), 0.3 * 3 + 0.7 * 1);
  EXPECT_DOUBLE_EQ(tdc(plan, request(2, 4), {1.0}), 3.0);
  EXPECT_DOUBLE_EQ(tdc(plan, request(2, 4), {0.0}), 1.0);
}

TEST(Tdc, MatchesExactRationalOnRandomPlans) {
  std::mt19937 rng(11);
  for (int i = 0; i < 500; ++i) {
    const int d = std::uniform_int_distribution<int>(0, 10)(rng);
    const int a = d + std::uniform_int_distribution<int>(1, 8)(rng);
    const int dep = d + std::uniform_int_distribution<int>(0, 3)(rng);
    const int len = std::uniform_int_distribution<int>(2, 12)(rng);
    FlightPlan plan{7, dep, std::vector<ResourceId>(len, 1)};
    const double alpha = std::uniform_int_distribution<int>(0, 10)(rng) / 10.0;
    EXPECT_TRUE(oracle::matches(tdc(plan, request(d, a), {alpha}),
                                oracle::exact_tdc(plan, request(d, a), oracle::Rational::from_decimal(alpha))));
  }
}

TEST(Tdc, FromOriginalCountsCarryoverDelay) {
  const auto carried = resubmitted(resubmitted(request(2, 4), 1), 1);
  EXPECT_EQ(carried.departure, 4);
  EXPECT_EQ(carried.arrival, 6);
  EXPECT_EQ(carried.resubmissions, 2);
  EXPECT_EQ(carried.original_departure, 2);
  const FlightPlan plan{7, 4, {0, 1, 2}};
  EXPECT_DOUBLE_EQ(tdc(plan, carried, {0.3}), 0.0);
  EXPECT_DOUBLE_EQ(tdc_from_original(plan, carried, {0.3}), 2.0);
}

TEST(PathLength, CountsEntriesNotSteps) {
  EXPECT_EQ(path_length({1, 0, {5, 6, 7}}), 3);
  EXPECT_EQ(path_length({1, 0, {5, 6, 6, 6, 7}}), 3);
  EXPECT_EQ(path_length({1, 0, {5, 6, 6, 8, 8, 7}}), 4);
  EXPECT_EQ(path_length({1, 0, {}}), 0);
}

TEST(FlightPlan, OccupanciesAreConsecutiveSteps) {
  const FlightPlan plan{1, 5, {3, 4, 4, 9}};
  EXPECT_EQ(plan.arrival(), 8);
  const std::vector<ResourceTime> want{{3, 5}, {4, 6}, {4, 7}, {9, 8}};
  EXPECT_EQ(plan.occupancies(), want);
}

TEST(Rational, ArithmeticIsExact) {
  using oracle::Rational;
  EXPECT_EQ(Rational::from_decimal(0.3), Rational(3, 10));
  EXPECT_EQ(Rational(1, 3) + Rational(1, 6), Rational(1, 2));
  EXPECT_EQ(Rational(2, 4), Rational(1, 2));
  EXPECT_EQ(Rational(1, -2), Rational(-1, 2));
  EXPECT_LT(Rational(1, 3), Rational(34, 100));
  EXPECT_EQ((Rational(3, 10) * 7 + Rational(7, 10) * 2).str(), "7/2");
}

TEST(Fairness, ExactValueForMixedRatios) {
  const std::vector<FlightPlan> before{{1, 0, {0, 1, 2, 3}}, {2, 0, {4, 5, 6}}};
  const std::vector<FlightPlan> after{{1, 0, {0, 1, 7, 8, 2, 3}}, {2, 0, {4, 5, 5, 6}}};
  // Ratios 6/4 and 3/3.
  EXPECT_EQ(oracle::exact_fairness(before, after), oracle::Rational(1, 2));
}

}  // namespace
}  // namespace coplan
