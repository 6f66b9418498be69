#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "evmaas/milp_model.hpp"
#include "evmaas/plan.hpp"
#include "evmaas/scenario.hpp"

namespace evmaas::testing {

/// Seeded scenario with 1-4 requests, 1-2 vehicles and 0-1 stations on a
/// short horizon, so vehicles compete for requests and charging matters.
Scenario tiny_scenario(std::uint64_t seed);

/// One request, two vehicles, two stations on the depot-to-pickup line.
Scenario fault_scenario();
/// Valid plan for fault_scenario(): vehicle 0 serves the request and charges
/// on the way, vehicle 1 stays at the depot.
FleetPlan fault_base_plan();

struct InjectedFault {
    std::string expected_tag;
    std::string description;
    FleetPlan plan;
};
/// One corrupted copy of fault_base_plan() per constraint family.
std::vector<InjectedFault> injected_faults();

/// Random model with awkward coefficients for writer round trips.
MILPModel random_model(std::uint64_t seed);

/// Solver command template for tests, or empty when none is configured.
std::string test_solver_command();

}  // namespace evmaas::testing
