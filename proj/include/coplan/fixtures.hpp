#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "coplan/milp.hpp"
#include "coplan/oracle.hpp"

namespace coplan::oracle {

// Hand-built instances with known answers.
TinyInstance corridor_instance();          // 1x3: vertiport, sector, vertiport
TinyInstance blocked_corridor_instance();  // same, middle sector closed all horizon
TinyInstance shared_corridor_instance();   // two flights through one capacity-1 sector
// Two-flight instances with conflicting proposals where the joint optimum
// depends on gamma (found by a seeded search, so they are reproducible).
std::vector<TinyInstance> fairness_fixtures(int count, std::uint64_t seed);

// Deterministic suite: the hand-built and fairness instances plus seeded
// random ones (grid <= 4x4, horizon <= 10 steps, <= 2 flights).
std::vector<TinyInstance> tiny_fixtures(int random_count = 32, std::uint64_t seed = 20240611);

struct EquivalenceCheck {
  std::string fixture;
  std::string what;  // "step1", "step2 f=<id>", "step3 gamma=<g>", "tfmp"
  bool pass = false;
  std::string detail;
};

// Solves every model on the instance with `backend` and compares the
// objective with the oracle optimum in exact arithmetic. Step 3 runs once
// per gamma with the Step 2 oracle plans as proposals.
std::vector<EquivalenceCheck> check_equivalence(const TinyInstance& instance, const milp::Backend& backend,
                                                double alpha = 0.3,
                                                const std::vector<double>& gammas = {0.0, 1.0, 5.0});

}  // namespace coplan::oracle
