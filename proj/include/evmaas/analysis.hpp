#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "evmaas/dag.hpp"
#include "evmaas/degradation.hpp"
#include "evmaas/plan.hpp"
#include "evmaas/scenario.hpp"
#include "evmaas/solver.hpp"

namespace evmaas {

/// Daily money and energy flows of a plan, in EUR and kWh.
struct ProfitBreakdown {
    double travel_revenue = 0.0;
    double charging_cost = 0.0;
    double discharging_revenue = 0.0;
    double degradation_cost = 0.0;
    double profit = 0.0;
    double charged_kwh = 0.0;
    double discharged_kwh = 0.0;
    int served_count = 0;
    double avg_lifetime_days = 0.0;  // infinite without throughput
};

/// Recomputed from the legs of the plan; the solver objective is never used.
ProfitBreakdown profit_breakdown(const FleetPlan& plan, const Scenario& scenario, const DegradationParams& params);
ProfitBreakdown profit_breakdown(const FleetPlan& plan, const TransitionGraph& graph, int n_vehicles,
                                 const DegradationParams& params);

struct GridSample {
    int t_min = 0;  // bin start
    double charge_kw = 0.0;
    double discharge_kw = 0.0;
    double net_kw = 0.0;
};

/// Grid power per bin. Each exchange is spread evenly over the time the
/// vehicle is plugged in at the station. `bin_minutes` must divide the horizon.
std::vector<GridSample> grid_profile(const FleetPlan& plan, const TransitionGraph& graph, int bin_minutes);

struct SweepRow {
    double p_batt_per_kwh = 0.0;
    double degradation_cost_per_vehicle_day = 0.0;
    double lifetime_days = 0.0;
    double objective_excl_travel = 0.0;  // J_elec + J_batt
    double charged_kwh_per_vehicle = 0.0;
    double discharged_kwh_per_vehicle = 0.0;
    int served_count = 0;
    double objective = 0.0;
    double bound = 0.0;  // solver lower bound on `objective`
    double wall_time = 0.0;
    std::string status;  // solver status, or "error: ..." when the point failed
    FleetPlan plan;      // empty when the point has no solution
};

/// One solve per battery price (EUR per kWh of capacity, so p_batt = price *
/// E_max). Points run on up to `jobs` threads; rows come back sorted by
/// price. A failing point is reported in its row and the sweep continues.
std::vector<SweepRow> pareto_sweep(const Scenario& scenario, const std::vector<double>& p_batt_per_kwh,
                                   const SolveSettings& settings, int jobs = 1);

struct DegradationPoint {
    double q_kwh = 0.0;
    double drop_nonlinear = 0.0;
    double drop_linear = 0.0;
};

/// `n_points` evenly spaced throughputs from 0 to Q_eol.
std::vector<DegradationPoint> degradation_curve(const DegradationParams& params, int n_points = 101);

void write_breakdown_csv(const ProfitBreakdown& b, const std::filesystem::path& path);
void write_grid_profile_csv(const std::vector<GridSample>& series, const std::filesystem::path& path);
void write_sweep_csv(const std::vector<SweepRow>& rows, const std::filesystem::path& path);
void write_degradation_curve_csv(const std::vector<DegradationPoint>& curve, const std::filesystem::path& path);

}  // namespace evmaas
