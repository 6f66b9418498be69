#include "fixtures.hpp"

#include <cmath>
#include <random>

#include "evmaas/solver.hpp"

namespace evmaas::testing {

Scenario tiny_scenario(std::uint64_t seed) {
    std::mt19937_64 rng(seed * 7919 + 17);
    auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };

    SyntheticOptions o;
    o.seed = seed;
    o.n_requests = pick(1, 4);
    o.n_vehicles = pick(1, 2);
    o.n_stations = pick(0, 3) == 0 ? 0 : 1;
    o.profile = pick(0, 1) ? DemandProfile::Uniform : DemandProfile::Bimodal;
    o.horizon = 240;
    o.day_start_min = 60 + 30 * pick(0, 2);
    o.day_end_min = 150 + 30 * pick(0, 2);
    o.price_low_eur_per_mwh = 40.0 + 10.0 * pick(0, 4);
    o.price_high_eur_per_mwh = 150.0 + 50.0 * pick(0, 3);
    o.area_km = 8.0 + 2.0 * pick(0, 3);
    o.fleet.e_max_kwh = 10.0;
    o.fleet.e0_kwh = 0.5 * pick(1, 6);
    o.fleet.econ_kwh_per_km = 0.15 + 0.05 * pick(0, 3);
    Scenario sc = generate_synthetic(o);
    // Battery prices from free degradation to well above the price spread.
    static constexpr double kPbatt[] = {0.0, 100.0, 500.0, 4000.0};
    sc.degradation.p_batt = kPbatt[pick(0, 3)];
    return sc;
}

Scenario fault_scenario() {
    Scenario sc;
    sc.horizon = 1440;
    sc.fleet.n_vehicles = 2;
    sc.fleet.depot = {0.0, 0.0};
    sc.fleet.detour_factor = 1.0;
    sc.requests.push_back({1, {4.0, 0.0}, {4.0, 4.0}, 120, 8.0});
    sc.stations.push_back({0, {1.0, 0.0}, 22.0});
    sc.stations.push_back({1, {2.0, 0.0}, 22.0});
    sc.prices = PriceSeries({0, 420}, {60.0, 180.0}, sc.horizon);
    return sc;
}

FleetPlan fault_base_plan() {
    const double out = 8.0 * 0.15;                  // 4 km deadhead + 4 km service
    const double back = std::sqrt(32.0) * 0.15;     // drop-off back to the depot
    FleetPlan p;
    p.n_requests = 1;
    VehicleSchedule v0{0, 20.0, {}};
    v0.legs.push_back({0, 1, {{0, out + back}}, 20.0 + back});
    v0.legs.push_back({1, 2, {}, 20.0});
    VehicleSchedule v1{1, 20.0, {}};
    v1.legs.push_back({0, 2, {}, 20.0});
    p.vehicles = {v0, v1};
    return p;
}

std::vector<InjectedFault> injected_faults() {
    std::vector<InjectedFault> faults;
    const FleetPlan base = fault_base_plan();
    {
        auto p = base;
        p.vehicles[1].legs = p.vehicles[0].legs;
        faults.push_back({"Eq. (4)", "second vehicle serves the same request", p});
    }
    {
        auto p = base;
        p.vehicles[1].legs = {{1, 2, {}, 20.0}};
        faults.push_back({"Eq. (5)", "second vehicle also leaves the request node", p});
    }
    {
        auto p = base;
        p.vehicles[0].legs.erase(p.vehicles[0].legs.begin());
        faults.push_back({"Eq. (6)", "first transition of a chain dropped", p});
    }
    {
        auto p = base;
        p.vehicles[0].legs[0].stations.push_back({1, 0.0});
        faults.push_back({"Eq. (7)", "two stations on one transition", p});
    }
    {
        auto p = base;
        p.vehicles[0].legs[0].stations[0].station = kNoStation;
        faults.push_back({"Eq. (8)", "energy exchanged without a station visit", p});
    }
    {
        auto p = base;
        p.vehicles[0].legs[0].arrival_energy_kwh += 1.0;
        faults.push_back({"Eq. (10)", "energy at a request node off by 1 kWh", p});
    }
    {
        auto p = base;
        for (auto& v : p.vehicles) {
            v.initial_energy_kwh -= 1.0;
            for (auto& leg : v.legs) leg.arrival_energy_kwh -= 1.0;
        }
        faults.push_back({"Eq. (11)", "whole trajectory shifted down by 1 kWh", p});
    }
    return faults;
}

MILPModel random_model(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> real(-1e3, 1e3);
    std::uniform_int_distribution<int> small(0, 9);
    MILPModel m;
    const int nv = 3 + small(rng) * 3;
    for (int v = 0; v < nv; ++v) {
        const bool bin = small(rng) < 4;
        const double lo = bin ? 0.0 : (small(rng) < 5 ? 0.0 : real(rng));
        const double hi = bin ? 1.0 : (small(rng) == 0 ? lo : lo + std::abs(real(rng)) / 3.0);
        m.add_variable((bin ? "B_" : "Y_") + std::to_string(v), bin ? VarKind::Binary : VarKind::Continuous, lo, hi,
                       small(rng) < 3 ? 0.0 : real(rng) / 7.0);
    }
    const int nr = 1 + small(rng) * 2;
    for (int r = 0; r < nr; ++r) {
        std::vector<Term> terms;
        for (int v = 0; v < nv; ++v) {
            if (small(rng) < 4) terms.push_back({v, real(rng) / 3.0});
        }
        const Sense s = static_cast<Sense>(small(rng) % 3);
        m.add_constraint("R_" + std::to_string(r), std::move(terms), s, small(rng) < 3 ? 0.0 : real(rng) * 1e-3);
    }
    return m;
}

std::string test_solver_command() { return default_solver_command(); }

}  // namespace evmaas::testing
