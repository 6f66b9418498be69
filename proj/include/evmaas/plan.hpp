#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "evmaas/dag.hpp"
#include "evmaas/degradation.hpp"
#include "evmaas/scenario.hpp"

namespace evmaas {

constexpr int kNoStation = -1;

/// Energy exchanged at one station during a transition. Positive charges the
/// battery, negative is V2G. `station == kNoStation` only appears in
/// malformed plans (exchange without a station visit).
struct StationCharge {
    int station = kNoStation;
    double charge_kwh = 0.0;
};

struct PlanLeg {
    int from = 0;
    int to = 0;
    std::vector<StationCharge> stations;
    double arrival_energy_kwh = 0.0;  // state of energy at d_to
};

struct VehicleSchedule {
    int vehicle = 0;
    double initial_energy_kwh = 0.0;
    std::vector<PlanLeg> legs;  // node 0 -> ... -> I+1
};

struct FleetPlan {
    int n_requests = 0;
    std::vector<VehicleSchedule> vehicles;
    std::vector<bool> served;  // index r for node r + 1

    double charged_kwh = 0.0;
    double discharged_kwh = 0.0;
    double j_trav = 0.0;
    double j_elec = 0.0;
    double j_batt = 0.0;

    double objective() const { return j_trav + j_elec + j_batt; }
    int served_count() const;
};

/// Recomputes served flags, energy totals and objective parts from the legs.
void complete_plan(FleetPlan& plan, const TransitionGraph& graph, double marginal_degradation);

/// Rebuilds arrival energies from the initial energy, leg consumption and charges.
void recompute_energies(FleetPlan& plan, const TransitionGraph& graph);

struct Diagnostic {
    std::string tag;  // e.g. "Eq. (10)"
    std::string message;
};

/// Checks every constraint family directly on the plan. Energies are checked
/// to 1e-6 kWh; time feasibility is exact through the graph masks. Violations
/// that follow from an assignment conflict (Eqs. 4-5) are reported once under
/// the root cause, and energy checks are skipped for vehicles whose chain is
/// ill-formed.
std::vector<Diagnostic> validate_plan(const FleetPlan& plan, const Scenario& scenario, const TransitionGraph& graph,
                                      const DegradationParams& params);

/// plan.csv: vehicle,leg_index,node_from,node_to,station,charge_kwh,arrival_energy_kwh.
/// Leg index 0 is the start row (0 -> 0) carrying the initial energy. A
/// transition visiting several stations spans several rows with the same
/// leg index; an empty station field means no station.
void write_plan_csv(const FleetPlan& plan, const std::filesystem::path& path);
FleetPlan read_plan_csv(const std::filesystem::path& path, int n_requests);

}  // namespace evmaas
