#pragma once

#include "evmaas/dag.hpp"
#include "evmaas/degradation.hpp"
#include "evmaas/plan.hpp"
#include "evmaas/scenario.hpp"

namespace evmaas {

struct TinyLimits {
    int max_requests = 4;
    int max_vehicles = 2;
    int max_stations = 1;
    /// Per-kWh tie-break on every exchange, as in the MILP objective.
    double tie_break = 1e-9;
};

struct OracleResult {
    double objective = 0.0;  // J_trav + J_elec + J_batt of `plan`
    FleetPlan plan;
};

/// Brute-force optimum: every subset of requests in every order that respects
/// the transition times, every station choice per transition, exact charge
/// amounts per chain, and every split of request subsets over the vehicles.
/// Ties go to the lexicographically smallest chain encoding.
OracleResult enumerate_optimum(const Scenario& scenario, const TransitionGraph& graph, const DegradationParams& params,
                               const TinyLimits& limits = {});

}  // namespace evmaas
