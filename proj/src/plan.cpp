#include "evmaas/plan.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "text.hpp"

namespace evmaas {

int FleetPlan::served_count() const {
    return static_cast<int>(std::count(served.begin(), served.end(), true));
}

namespace {

bool valid_station(const TransitionGraph& g, int c) { return c >= 0 && c < g.n_stations(); }

double leg_consumption(const TransitionGraph& g, const PlanLeg& leg) {
    double e = g.leg_energy(leg.from, leg.to);
    for (const auto& sc : leg.stations) {
        if (valid_station(g, sc.station)) e += g.detour_energy(leg.from, leg.to, sc.station);
    }
    return e;
}

double leg_exchange(const PlanLeg& leg) {
    double total = 0.0;
    for (const auto& sc : leg.stations) total += sc.charge_kwh;
    return total;
}

bool node_in_range(const TransitionGraph& g, int v) { return v >= 0 && v < g.n_nodes(); }

}  // namespace

void recompute_energies(FleetPlan& plan, const TransitionGraph& g) {
    for (auto& vs : plan.vehicles) {
        double e = vs.initial_energy_kwh;
        for (auto& leg : vs.legs) {
            e = e - leg_consumption(g, leg) + leg_exchange(leg);
            leg.arrival_energy_kwh = e;
        }
    }
}

void complete_plan(FleetPlan& plan, const TransitionGraph& g, double marginal) {
    plan.n_requests = g.n_requests();
    plan.served.assign(g.n_requests(), false);
    plan.charged_kwh = plan.discharged_kwh = 0.0;
    plan.j_trav = plan.j_elec = plan.j_batt = 0.0;
    for (const auto& vs : plan.vehicles) {
        for (const auto& leg : vs.legs) {
            if (leg.to >= 1 && leg.to <= g.n_requests() && !plan.served[leg.to - 1]) {
                plan.served[leg.to - 1] = true;
                plan.j_trav -= g.revenue(leg.to);
            }
            if (!node_in_range(g, leg.from) || !node_in_range(g, leg.to)) continue;
            const double price = g.price(leg.from, leg.to);
            for (const auto& sc : leg.stations) {
                if (sc.charge_kwh > 0.0) plan.charged_kwh += sc.charge_kwh;
                else plan.discharged_kwh -= sc.charge_kwh;
                plan.j_elec += price * sc.charge_kwh;
                plan.j_batt += marginal * std::abs(sc.charge_kwh);
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Validation

std::vector<Diagnostic> validate_plan(const FleetPlan& plan, const Scenario& sc, const TransitionGraph& g,
                                      const DegradationParams&) {
    constexpr double tol = 1e-6;
    std::vector<Diagnostic> out;
    auto report = [&](const char* tag, std::string msg) { out.push_back({tag, std::move(msg)}); };
    const int sink = g.sink();
    const int K = sc.fleet.n_vehicles;
    auto veh = [](int k) { return "vehicle " + std::to_string(k); };
    auto arc = [](const PlanLeg& l) { return std::to_string(l.from) + "->" + std::to_string(l.to); };

    // Vehicles whose chain is ill-formed get no energy checks.
    std::set<int> broken;

    std::set<int> seen_vehicles;
    for (const auto& vs : plan.vehicles) {
        if (vs.vehicle < 0 || vs.vehicle >= K || !seen_vehicles.insert(vs.vehicle).second) {
            report("Eq. (6)", veh(vs.vehicle) + " is unknown or listed twice");
            broken.insert(vs.vehicle);
        }
    }
    for (int k = 0; k < K; ++k) {
        if (!seen_vehicles.count(k)) report("Eq. (6)", veh(k) + " has no schedule (must leave and return to the depot)");
    }

    // Arc and station feasibility.
    for (const auto& vs : plan.vehicles) {
        for (const auto& leg : vs.legs) {
            if (!node_in_range(g, leg.from) || !node_in_range(g, leg.to)) {
                report("Eq. (1)", veh(vs.vehicle) + ": node out of range in " + arc(leg));
                broken.insert(vs.vehicle);
                continue;
            }
            if (leg.from == leg.to || !g.arc_feasible(leg.from, leg.to)) {
                report("Eq. (1)", veh(vs.vehicle) + ": transition " + arc(leg) + " is not time-feasible");
            }
            int visits = 0;
            for (const auto& st : leg.stations) {
                if (st.station == kNoStation) {
                    if (std::abs(st.charge_kwh) > tol)
                        report("Eq. (8)", veh(vs.vehicle) + ": " + text::format(st.charge_kwh) +
                                              " kWh exchanged on " + arc(leg) + " without a station visit");
                    continue;
                }
                ++visits;
                if (!valid_station(g, st.station)) {
                    report("Eq. (2)", veh(vs.vehicle) + ": unknown station " + std::to_string(st.station));
                    continue;
                }
                if (!g.charge_feasible(leg.from, leg.to, st.station)) {
                    report("Eq. (2)", veh(vs.vehicle) + ": station " + std::to_string(st.station) +
                                          " does not fit in " + arc(leg));
                    continue;
                }
                const double cap = g.max_charge(leg.from, leg.to, st.station);
                if (std::abs(st.charge_kwh) > cap + tol)
                    report("Eq. (8)", veh(vs.vehicle) + ": |C| = " + text::format(std::abs(st.charge_kwh)) +
                                          " exceeds " + text::format(cap) + " on " + arc(leg));
            }
            if (visits > 1)
                report("Eq. (7)", veh(vs.vehicle) + ": " + std::to_string(visits) + " station visits on " + arc(leg));
        }
    }

    // Assignment: in-degree (Eq. 4) before out-degree (Eq. 5); a node flagged
    // by one is not reported again by the next.
    std::map<int, std::set<int>> in_vehicles, out_vehicles;
    std::map<int, int> in_count, out_count;
    for (const auto& vs : plan.vehicles) {
        for (const auto& leg : vs.legs) {
            if (!node_in_range(g, leg.from) || !node_in_range(g, leg.to)) continue;
            if (leg.to >= 1 && leg.to < sink) {
                ++in_count[leg.to];
                in_vehicles[leg.to].insert(vs.vehicle);
            }
            if (leg.from >= 1 && leg.from < sink) {
                ++out_count[leg.from];
                out_vehicles[leg.from].insert(vs.vehicle);
            }
        }
    }
    std::set<int> flagged;
    for (const auto& [j, cnt] : in_count) {
        if (cnt <= 1) continue;
        report("Eq. (4)", "request node " + std::to_string(j) + " is served " + std::to_string(cnt) + " times");
        flagged.insert(j);
        for (int k : in_vehicles[j]) broken.insert(k);
        for (int k : out_vehicles[j]) broken.insert(k);
    }
    for (const auto& [i, cnt] : out_count) {
        if (cnt <= 1 || flagged.count(i)) continue;
        report("Eq. (5)", "request node " + std::to_string(i) + " is left " + std::to_string(cnt) + " times");
        flagged.insert(i);
        for (int k : in_vehicles[i]) broken.insert(k);
        for (int k : out_vehicles[i]) broken.insert(k);
    }

    // Continuity of each vehicle's chain from node 0 to node I+1.
    for (const auto& vs : plan.vehicles) {
        if (vs.legs.empty()) {
            report("Eq. (6)", veh(vs.vehicle) + " has no transitions");
            broken.insert(vs.vehicle);
            continue;
        }
        int expected = 0;
        for (const auto& leg : vs.legs) {
            if (leg.from != expected && !flagged.count(leg.from) && !flagged.count(expected)) {
                report("Eq. (6)", veh(vs.vehicle) + ": transition " + arc(leg) + " does not continue from node " +
                                      std::to_string(expected));
                broken.insert(vs.vehicle);
            } else if (leg.from != expected) {
                broken.insert(vs.vehicle);
            }
            expected = leg.to;
        }
        if (expected != sink && !flagged.count(expected)) {
            report("Eq. (6)", veh(vs.vehicle) + " does not return to the depot");
            broken.insert(vs.vehicle);
        }
    }

    // Energy balance and bounds.
    const double e0 = sc.fleet.e0_kwh;
    const double emax = sc.fleet.e_max_kwh;
    for (const auto& vs : plan.vehicles) {
        if (broken.count(vs.vehicle)) continue;
        if (std::abs(vs.initial_energy_kwh - e0) > tol)
            report("Eq. (11)", veh(vs.vehicle) + ": initial energy " + text::format(vs.initial_energy_kwh) +
                                   " != " + text::format(e0));
        double prev = vs.initial_energy_kwh;
        for (std::size_t l = 0; l < vs.legs.size(); ++l) {
            const auto& leg = vs.legs[l];
            const double expect = prev - leg_consumption(g, leg) + leg_exchange(leg);
            if (std::abs(leg.arrival_energy_kwh - expect) > tol)
                report("Eq. (10)", veh(vs.vehicle) + ": energy at node " + std::to_string(leg.to) + " is " +
                                       text::format(leg.arrival_energy_kwh) + ", balance gives " +
                                       text::format(expect));
            if (leg.arrival_energy_kwh < -tol || leg.arrival_energy_kwh > emax + tol)
                report("Eq. (11)", veh(vs.vehicle) + ": energy " + text::format(leg.arrival_energy_kwh) +
                                       " at node " + std::to_string(leg.to) + " outside [0, " +
                                       text::format(emax) + "]");
            prev = leg.arrival_energy_kwh;
        }
        if (std::abs(vs.legs.back().arrival_energy_kwh - e0) > tol)
            report("Eq. (11)", veh(vs.vehicle) + ": final energy " + text::format(vs.legs.back().arrival_energy_kwh) +
                                   " != " + text::format(e0));
    }
    return out;
}

// ---------------------------------------------------------------------------
// plan.csv

namespace {
constexpr const char* kPlanHeader = "vehicle,leg_index,node_from,node_to,station,charge_kwh,arrival_energy_kwh";
}

void write_plan_csv(const FleetPlan& plan, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << kPlanHeader << '\n';
    for (const auto& vs : plan.vehicles) {
        out << vs.vehicle << ",0,0,0,,0," << text::format(vs.initial_energy_kwh) << '\n';
        for (std::size_t l = 0; l < vs.legs.size(); ++l) {
            const auto& leg = vs.legs[l];
            const auto prefix = std::to_string(vs.vehicle) + ',' + std::to_string(l + 1) + ',' +
                                std::to_string(leg.from) + ',' + std::to_string(leg.to) + ',';
            const auto energy = text::format(leg.arrival_energy_kwh);
            if (leg.stations.empty()) out << prefix << ",0," << energy << '\n';
            for (const auto& st : leg.stations) {
                out << prefix << (st.station == kNoStation ? std::string() : std::to_string(st.station)) << ','
                    << text::format(st.charge_kwh) << ',' << energy << '\n';
            }
        }
    }
}

FleetPlan read_plan_csv(const std::filesystem::path& path, int n_requests) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    const auto file = path.string();
    FleetPlan plan;
    plan.n_requests = n_requests;
    std::map<int, VehicleSchedule> by_vehicle;
    std::map<int, int> last_index;
    std::string line;
    std::size_t line_no = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++line_no;
        const auto t = text::trim(line);
        if (t.empty()) continue;
        if (!header) {
            if (t != kPlanHeader) throw ParseError(file, line_no, std::string("expected header '") + kPlanHeader + "'");
            header = true;
            continue;
        }
        const auto f = text::split(t, ',');
        if (f.size() != 7) throw ParseError(file, line_no, "expected 7 fields");
        auto integer = [&](std::string_view s, const char* what) {
            const auto v = text::to_int(s);
            if (!v) throw ParseError(file, line_no, std::string("bad integer in ") + what);
            return static_cast<int>(*v);
        };
        auto real = [&](std::string_view s, const char* what) {
            const auto v = text::to_double(s);
            if (!v || !std::isfinite(*v)) throw ParseError(file, line_no, std::string("bad number in ") + what);
            return *v;
        };
        const int k = integer(f[0], "vehicle");
        const int idx = integer(f[1], "leg_index");
        const int from = integer(f[2], "node_from");
        const int to = integer(f[3], "node_to");
        const int station = f[4].empty() ? kNoStation : integer(f[4], "station");
        const double charge = real(f[5], "charge_kwh");
        const double energy = real(f[6], "arrival_energy_kwh");

        auto& vs = by_vehicle[k];
        vs.vehicle = k;
        if (idx == 0) {
            vs.initial_energy_kwh = energy;
            last_index[k] = 0;
            continue;
        }
        const auto prev = last_index.find(k);
        const bool same_leg = prev != last_index.end() && prev->second == idx && !vs.legs.empty();
        if (same_leg) {
            auto& leg = vs.legs.back();
            if (leg.from != from || leg.to != to)
                throw ParseError(file, line_no, "rows of one leg must share node_from/node_to");
            leg.stations.push_back({station, charge});
            continue;
        }
        if (prev != last_index.end() && idx <= prev->second)
            throw ParseError(file, line_no, "leg_index must increase within a vehicle");
        PlanLeg leg{from, to, {}, energy};
        if (station != kNoStation || charge != 0.0) leg.stations.push_back({station, charge});
        vs.legs.push_back(std::move(leg));
        last_index[k] = idx;
    }
    if (!header) throw ParseError(file, line_no, "missing header row");
    for (auto& [k, vs] : by_vehicle) plan.vehicles.push_back(std::move(vs));
    return plan;
}

}  // namespace evmaas
