#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "../support/fixtures.hpp"
#include "evmaas/plan.hpp"

using namespace evmaas;
using namespace evmaas::testing;

namespace {

std::set<std::string> tags(const std::vector<Diagnostic>& d) {
    std::set<std::string> out;
    for (const auto& x : d) out.insert(x.tag);
    return out;
}

std::filesystem::path temp_file(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "evmaas_plan_test";
    std::filesystem::create_directories(dir);
    return dir / name;
}

void write_text(const std::filesystem::path& p, const std::string& s) {
    std::ofstream(p) << s;
}

}  // namespace

TEST(ValidatePlan, BasePlanIsClean) {
    const auto sc = fault_scenario();
    const auto g = build_graph(sc);
    const auto d = validate_plan(fault_base_plan(), sc, g, sc.degradation);
    for (const auto& x : d) ADD_FAILURE() << x.tag << ": " << x.message;
}

TEST(ValidatePlan, EachInjectedFaultIsReportedUnderItsOwnTagOnly) {
    const auto sc = fault_scenario();
    const auto g = build_graph(sc);
    const auto faults = injected_faults();
    ASSERT_EQ(faults.size(), 7u);
    for (const auto& f : faults) {
        const auto got = tags(validate_plan(f.plan, sc, g, sc.degradation));
        EXPECT_EQ(got, std::set<std::string>{f.expected_tag}) << f.description;
    }
}

TEST(ValidatePlan, FinalEnergyBelowStartIsAnEnergyLimitViolation) {
    const auto sc = fault_scenario();
    const auto g = build_graph(sc);
    auto p = fault_base_plan();
    // Charge 1 kWh less: balance still holds leg by leg, the day ends at E0 - 1.
    p.vehicles[0].legs[0].stations[0].charge_kwh -= 1.0;
    recompute_energies(p, g);
    EXPECT_NEAR(p.vehicles[0].legs.back().arrival_energy_kwh, sc.fleet.e0_kwh - 1.0, 1e-12);
    EXPECT_EQ(tags(validate_plan(p, sc, g, sc.degradation)), std::set<std::string>{"Eq. (11)"});
}

TEST(ValidatePlan, ChargeAboveStationLimit) {
    auto sc = fault_scenario();
    sc.requests[0].t_request = 12;  // 4 minutes plugged in at 22 kW
    const auto g = build_graph(sc);
    ASSERT_TRUE(g.charge_feasible(0, 1, 0));
    auto p = fault_base_plan();
    recompute_energies(p, g);
    EXPECT_EQ(tags(validate_plan(p, sc, g, sc.degradation)), std::set<std::string>{"Eq. (8)"});
}

TEST(ValidatePlan, StationThatDoesNotFitAndInfeasibleArc) {
    auto sc = fault_scenario();
    sc.requests[0].t_request = 5;  // deadhead alone takes 8 minutes
    const auto g = build_graph(sc);
    ASSERT_FALSE(g.arc_feasible(0, 1));
    const auto got = tags(validate_plan(fault_base_plan(), sc, g, sc.degradation));
    EXPECT_TRUE(got.count("Eq. (1)"));
    EXPECT_TRUE(got.count("Eq. (2)"));
}

TEST(ValidatePlan, MissingVehicleAndEmptyChain) {
    const auto sc = fault_scenario();
    const auto g = build_graph(sc);
    auto p = fault_base_plan();
    p.vehicles.pop_back();
    EXPECT_EQ(tags(validate_plan(p, sc, g, sc.degradation)), std::set<std::string>{"Eq. (6)"});
    p = fault_base_plan();
    p.vehicles[1].legs.clear();
    EXPECT_EQ(tags(validate_plan(p, sc, g, sc.degradation)), std::set<std::string>{"Eq. (6)"});
}

TEST(CompletePlan, ObjectivePartsFromLegs) {
    const auto sc = fault_scenario();
    const auto g = build_graph(sc);
    auto p = fault_base_plan();
    const double m = 0.05;
    complete_plan(p, g, m);
    const double c = p.vehicles[0].legs[0].stations[0].charge_kwh;
    EXPECT_EQ(p.served_count(), 1);
    EXPECT_DOUBLE_EQ(p.j_trav, -8.0);
    // Idle window [0, 120] lies in the 60 EUR/MWh interval.
    EXPECT_NEAR(p.j_elec, 0.06 * c, 1e-15);
    EXPECT_NEAR(p.j_batt, m * c, 1e-15);
    EXPECT_DOUBLE_EQ(p.charged_kwh, c);
    EXPECT_DOUBLE_EQ(p.discharged_kwh, 0.0);
    EXPECT_NEAR(p.objective(), -8.0 + 0.11 * c, 1e-12);

    p.vehicles[0].legs[0].stations[0].charge_kwh = -2.0;
    complete_plan(p, g, m);
    EXPECT_DOUBLE_EQ(p.discharged_kwh, 2.0);
    EXPECT_NEAR(p.j_elec, -0.12, 1e-15);
    EXPECT_NEAR(p.j_batt, 0.1, 1e-15);
}

TEST(PlanCsv, RoundTripKeepsEveryLegAndStationRow) {
    const auto sc = fault_scenario();
    auto p = fault_base_plan();
    p.vehicles[0].legs[0].stations.push_back({1, -0.125});  // invalid, but must survive the file
    p.vehicles[1].legs[0].stations.push_back({kNoStation, 0.5});
    const auto path = temp_file("round_trip.csv");
    write_plan_csv(p, path);
    const auto q = read_plan_csv(path, 1);
    ASSERT_EQ(q.vehicles.size(), p.vehicles.size());
    for (std::size_t k = 0; k < p.vehicles.size(); ++k) {
        const auto& a = p.vehicles[k];
        const auto& b = q.vehicles[k];
        EXPECT_EQ(a.vehicle, b.vehicle);
        EXPECT_EQ(a.initial_energy_kwh, b.initial_energy_kwh);
        ASSERT_EQ(a.legs.size(), b.legs.size());
        for (std::size_t l = 0; l < a.legs.size(); ++l) {
            EXPECT_EQ(a.legs[l].from, b.legs[l].from);
            EXPECT_EQ(a.legs[l].to, b.legs[l].to);
            EXPECT_EQ(a.legs[l].arrival_energy_kwh, b.legs[l].arrival_energy_kwh);
            ASSERT_EQ(a.legs[l].stations.size(), b.legs[l].stations.size());
            for (std::size_t s = 0; s < a.legs[l].stations.size(); ++s) {
                EXPECT_EQ(a.legs[l].stations[s].station, b.legs[l].stations[s].station);
                EXPECT_EQ(a.legs[l].stations[s].charge_kwh, b.legs[l].stations[s].charge_kwh);
            }
        }
    }
}

TEST(PlanCsv, ErrorsCarryFileAndLine) {
    const auto path = temp_file("bad.csv");
    write_text(path,
               "vehicle,leg_index,node_from,node_to,station,charge_kwh,arrival_energy_kwh\n"
               "0,0,0,0,,0,20\n"
               "0,1,0,x,,0,20\n");
    try {
        read_plan_csv(path, 1);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("bad.csv:3"), std::string::npos) << e.what();
    }
    write_text(path,
               "vehicle,leg_index,node_from,node_to,station,charge_kwh,arrival_energy_kwh\n"
               "0,0,0,0,,0,20\n"
               "0,2,0,1,,0,20\n"
               "0,1,1,2,,0,20\n");
    EXPECT_THROW(read_plan_csv(path, 1), ParseError);
    write_text(path, "vehicle,leg\n");
    EXPECT_THROW(read_plan_csv(path, 1), ParseError);
    write_text(path, "");
    EXPECT_THROW(read_plan_csv(path, 1), ParseError);
}
