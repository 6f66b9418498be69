#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "../support/fixtures.hpp"
#include "evmaas/analysis.hpp"

using namespace evmaas;
using namespace evmaas::testing;

namespace {

std::string first_line(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::string s;
    std::getline(in, s);
    return s;
}

}  // namespace

TEST(Breakdown, EmptyPlan) {
    const auto sc = fault_scenario();
    FleetPlan p;
    const auto b = profit_breakdown(p, sc, sc.degradation);
    EXPECT_EQ(b.profit, 0.0);
    EXPECT_EQ(b.served_count, 0);
    EXPECT_TRUE(std::isinf(b.avg_lifetime_days));
}

TEST(Breakdown, ProfitIsMinusObjective) {
    const auto sc = fault_scenario();
    const auto g = build_graph(sc);
    auto p = fault_base_plan();
    p.vehicles[1].legs = {{0, 2, {{1, 3.0}}, 23.0}};  // extra 3 kWh bought by vehicle 1
    p.vehicles[0].legs[0].stations[0].charge_kwh -= 3.0;
    p.vehicles[0].legs[0].stations.push_back({1, 0.0});
    const double m = degradation::marginal_cost(sc.degradation);
    complete_plan(p, g, m);
    const auto b = profit_breakdown(p, g, 2, sc.degradation);
    EXPECT_NEAR(b.profit, -p.objective(), 1e-12);
    EXPECT_NEAR(b.degradation_cost, p.j_batt, 1e-12);
    EXPECT_EQ(b.served_count, 1);
    EXPECT_DOUBLE_EQ(b.travel_revenue, 8.0);
}

TEST(Breakdown, FleetScaleDegradationFigures) {
    // 6050 kWh charged and 4190 kWh discharged per day over 4 vehicles.
    const auto sc = fault_scenario();
    const auto g = build_graph(sc);
    FleetPlan p;
    p.vehicles = {{0, 20.0, {{0, 2, {{0, 6050.0}, {1, -4190.0}}, 0.0}}}};
    const auto b = profit_breakdown(p, g, 4, sc.degradation);
    EXPECT_NEAR(b.degradation_cost, 690.0, 690.0 * 0.01);
    // 10240 / 4 kWh per vehicle and day.
    EXPECT_DOUBLE_EQ(b.avg_lifetime_days, degradation::lifetime_days(sc.degradation, 2560.0));
}

TEST(GridProfile, SingleWindowFillsItsBins) {
    const auto sc = fault_scenario();
    const auto g = build_graph(sc);
    // 20 kWh spread over the plug-in window of station 0 on 0->1.
    const double a = g.window_start(0, 1, 0), b = g.window_end(0, 1, 0);
    const double kwh = 22.0 * (b - a) / 60.0;
    FleetPlan p;
    p.vehicles = {{0, 20.0, {{0, 1, {{0, std::min(kwh, 20.0)}}, 0.0}}}};
    const auto series = grid_profile(p, g, 15);
    ASSERT_EQ(series.size(), 96u);
    double integral = 0.0;
    for (const auto& s : series) {
        EXPECT_GE(s.charge_kw, 0.0);
        EXPECT_EQ(s.discharge_kw, 0.0);
        EXPECT_EQ(s.net_kw, s.charge_kw - s.discharge_kw);
        integral += s.charge_kw * 0.25;
    }
    EXPECT_NEAR(integral, std::min(kwh, 20.0), 1e-9);
}

TEST(GridProfile, FullPowerOverExactlyOneBin) {
    Scenario sc = fault_scenario();
    sc.requests = {{1, {0.0, 0.0}, {3.0, 0.0}, 15, 4.0}};
    sc.stations = {{0, {0.0, 0.0}, 22.0}};
    const auto g = build_graph(sc);
    ASSERT_DOUBLE_EQ(g.window_start(0, 1, 0), 0.0);
    ASSERT_DOUBLE_EQ(g.window_end(0, 1, 0), 15.0);
    FleetPlan p;
    p.vehicles = {{0, 20.0, {{0, 1, {{0, 22.0 * 15.0 / 60.0}}, 0.0}}}};
    const auto series = grid_profile(p, g, 15);
    EXPECT_NEAR(series[0].charge_kw, 22.0, 1e-12);
    EXPECT_NEAR(series[0].net_kw, 22.0, 1e-12);
    for (std::size_t k = 1; k < series.size(); ++k) EXPECT_EQ(series[k].net_kw, 0.0);
    for (const auto& s : grid_profile({}, g, 15)) EXPECT_EQ(s.net_kw, 0.0);
}

TEST(GridProfile, ConservesEnergyOfSolvedPlans) {
    for (std::uint64_t seed : {2, 6, 9, 21}) {
        const auto sc = tiny_scenario(seed);
        const auto g = build_graph(sc);
        FleetPlan p;
        for (int c = 0; c < g.n_stations(); ++c) {
            if (g.charge_feasible(0, g.sink(), c)) {
                const double half = g.max_charge(0, g.sink(), c) / 2;
                p.vehicles.push_back({0, 0.0, {{0, g.sink(), {{c, half}}, 0.0}}});
                p.vehicles.push_back({1, 0.0, {{0, g.sink(), {{c, -half / 2}}, 0.0}}});
            }
        }
        double charged = 0.0, discharged = 0.0;
        for (const auto& s : grid_profile(p, g, 10)) {
            charged += s.charge_kw / 6.0;
            discharged += s.discharge_kw / 6.0;
        }
        const auto b = profit_breakdown(p, g, 2, sc.degradation);
        EXPECT_NEAR(charged, b.charged_kwh, 1e-9) << "seed " << seed;
        EXPECT_NEAR(discharged, b.discharged_kwh, 1e-9) << "seed " << seed;
    }
}

TEST(GridProfile, BinMustDivideHorizon) {
    const auto sc = fault_scenario();
    const auto g = build_graph(sc);
    EXPECT_THROW(grid_profile({}, g, 7), Error);
    EXPECT_THROW(grid_profile({}, g, 0), Error);
    EXPECT_EQ(grid_profile({}, g, 1440).size(), 1u);
}

TEST(DegradationCurve, EndpointsAndShape) {
    DegradationParams p;
    const auto c = degradation_curve(p, 5);
    ASSERT_EQ(c.size(), 5u);
    EXPECT_EQ(c.front().q_kwh, 0.0);
    EXPECT_EQ(c.back().q_kwh, 59250.0);
    EXPECT_DOUBLE_EQ(c.back().drop_nonlinear, 0.2);
    EXPECT_DOUBLE_EQ(c.back().drop_linear, 0.2);
    EXPECT_DOUBLE_EQ(c[1].drop_nonlinear, 0.1);
    EXPECT_THROW(degradation_curve(p, 1), Error);
}

TEST(Sweep, RowsSortedAndDeterministic) {
    Scenario sc = fault_scenario();
    sc.fleet.n_vehicles = 1;
    sc.stations.resize(1);
    SolveSettings s;
    s.backend = Backend::BuiltinTiny;
    const auto rows = pareto_sweep(sc, {200, 0, 50, 50}, s, 3);
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_EQ(rows[0].p_batt_per_kwh, 0.0);
    EXPECT_EQ(rows[3].p_batt_per_kwh, 200.0);
    EXPECT_EQ(rows[1].objective, rows[2].objective);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        EXPECT_EQ(rows[i].status, "optimal") << rows[i].status;
        EXPECT_EQ(rows[i].served_count, 1);
        if (i > 0) EXPECT_GE(rows[i].objective_excl_travel, rows[i - 1].objective_excl_travel - 1e-12);
    }
    EXPECT_THROW(pareto_sweep(sc, {}, s), Error);
}

TEST(Sweep, HighBatteryPriceStopsDischarging) {
    SolveSettings s;
    s.solver_command = test_solver_command();
    if (s.solver_command.empty()) GTEST_SKIP() << "no external solver configured";
    s.mip_gap = 1e-9;
    bool some_v2g = false;
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
        const auto rows = pareto_sweep(tiny_scenario(seed), {0, 1000}, s);
        ASSERT_EQ(rows[0].status, "optimal") << rows[0].status;
        ASSERT_EQ(rows[1].status, "optimal") << rows[1].status;
        some_v2g = some_v2g || rows[0].discharged_kwh_per_vehicle > 0.1;
        EXPECT_EQ(rows[1].discharged_kwh_per_vehicle, 0.0) << "seed " << seed;
        EXPECT_LE(rows[1].charged_kwh_per_vehicle, rows[0].charged_kwh_per_vehicle + 1e-9) << "seed " << seed;
    }
    EXPECT_TRUE(some_v2g);
}

TEST(Sweep, FailingPointIsRecordedAndSweepContinues) {
    Scenario sc = fault_scenario();
    SolveSettings s;
    s.solver_command = "exit 1";
    const auto rows = pareto_sweep(sc, {0, 10}, s);
    ASSERT_EQ(rows.size(), 2u);
    for (const auto& r : rows) EXPECT_TRUE(r.status.starts_with("error: ")) << r.status;
}

TEST(Csv, Headers) {
    const auto dir = std::filesystem::temp_directory_path() / "evmaas_analysis_test";
    std::filesystem::create_directories(dir);
    write_grid_profile_csv({}, dir / "g.csv");
    EXPECT_EQ(first_line(dir / "g.csv"), "t_min,charge_kw,discharge_kw,net_kw");
    write_degradation_curve_csv(degradation_curve({}), dir / "d.csv");
    EXPECT_EQ(first_line(dir / "d.csv"), "q_kwh,drop_nonlinear,drop_linear");
    write_sweep_csv({SweepRow{}}, dir / "s.csv");
    EXPECT_EQ(first_line(dir / "s.csv").substr(0, 15), "p_batt_per_kwh,");
    write_breakdown_csv({}, dir / "b.csv");
    EXPECT_NE(first_line(dir / "b.csv").find("profit"), std::string::npos);
}
