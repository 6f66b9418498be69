#include "evmaas/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <thread>

#include "evmaas/milp_model.hpp"
#include "text.hpp"

namespace evmaas {

ProfitBreakdown profit_breakdown(const FleetPlan& plan, const Scenario& sc, const DegradationParams& params) {
    return profit_breakdown(plan, build_graph(sc), sc.fleet.n_vehicles, params);
}

ProfitBreakdown profit_breakdown(const FleetPlan& plan, const TransitionGraph& g, int n_vehicles,
                                 const DegradationParams& params) {
    ProfitBreakdown b;
    std::vector<bool> served(g.n_requests(), false);
    for (const auto& vs : plan.vehicles) {
        for (const auto& leg : vs.legs) {
            if (leg.to >= 1 && leg.to <= g.n_requests() && !served[leg.to - 1]) {
                served[leg.to - 1] = true;
                b.travel_revenue += g.revenue(leg.to);
                ++b.served_count;
            }
            if (leg.from < 0 || leg.from >= g.n_nodes() || leg.to < 0 || leg.to >= g.n_nodes()) continue;
            const double price = g.price(leg.from, leg.to);
            for (const auto& st : leg.stations) {
                const double cp = std::max(st.charge_kwh, 0.0);
                const double cm = std::max(-st.charge_kwh, 0.0);
                b.charged_kwh += cp;
                b.discharged_kwh += cm;
                b.charging_cost += price * cp;
                b.discharging_revenue += price * cm;
            }
        }
    }
    const double throughput = b.charged_kwh + b.discharged_kwh;
    b.degradation_cost = degradation::marginal_cost(params) * throughput;
    b.profit = b.travel_revenue - b.charging_cost + b.discharging_revenue - b.degradation_cost;
    b.avg_lifetime_days = throughput > 0.0 && n_vehicles > 0
                              ? degradation::lifetime_days(params, throughput / n_vehicles)
                              : std::numeric_limits<double>::infinity();
    return b;
}

std::vector<GridSample> grid_profile(const FleetPlan& plan, const TransitionGraph& g, int bin_minutes) {
    if (bin_minutes <= 0 || g.horizon() % bin_minutes != 0)
        throw Error("bin width must divide the horizon of " + std::to_string(g.horizon()) + " min");
    const int bins = g.horizon() / bin_minutes;
    std::vector<double> ch(bins, 0.0), dch(bins, 0.0);
    for (const auto& vs : plan.vehicles) {
        for (const auto& leg : vs.legs) {
            for (const auto& st : leg.stations) {
                if (st.station < 0 || st.station >= g.n_stations() || st.charge_kwh == 0.0) continue;
                const double a = g.window_start(leg.from, leg.to, st.station);
                const double b = g.window_end(leg.from, leg.to, st.station);
                if (!(b > a)) continue;
                auto& target = st.charge_kwh > 0.0 ? ch : dch;
                const double rate = std::abs(st.charge_kwh) / (b - a);  // kWh per minute
                const int first = std::max(0, static_cast<int>(std::floor(a / bin_minutes)));
                const int last = std::min(bins - 1, static_cast<int>(std::ceil(b / bin_minutes)) - 1);
                for (int k = first; k <= last; ++k) {
                    const double lo = std::max(a, static_cast<double>(k * bin_minutes));
                    const double hi = std::min(b, static_cast<double>((k + 1) * bin_minutes));
                    if (hi > lo) target[k] += rate * (hi - lo);
                }
            }
        }
    }
    const double hours = bin_minutes / kMinutesPerHour;
    std::vector<GridSample> out(bins);
    for (int k = 0; k < bins; ++k) {
        out[k].t_min = k * bin_minutes;
        out[k].charge_kw = ch[k] / hours;
        out[k].discharge_kw = dch[k] / hours;
        out[k].net_kw = out[k].charge_kw - out[k].discharge_kw;
    }
    return out;
}

namespace {

SweepRow sweep_point(const Scenario& base, double p_per_kwh, const SolveSettings& settings) {
    SweepRow row;
    row.p_batt_per_kwh = p_per_kwh;
    try {
        Scenario sc = base;
        sc.degradation.p_batt = p_per_kwh * sc.fleet.e_max_kwh;
        const auto graph = build_graph(sc);
        const auto model = build_model(sc, graph, sc.degradation);
        const auto result = solve(model, settings);
        row.status = to_string(result.status);
        row.wall_time = result.wall_time;
        if (!result.has_solution()) return row;
        const auto plan = extract_plan(model, result.values);
        const auto b = profit_breakdown(plan, graph, sc.fleet.n_vehicles, sc.degradation);
        const double k = sc.fleet.n_vehicles;
        row.degradation_cost_per_vehicle_day = b.degradation_cost / k;
        row.lifetime_days = b.avg_lifetime_days;
        row.objective_excl_travel = b.charging_cost - b.discharging_revenue + b.degradation_cost;
        row.charged_kwh_per_vehicle = b.charged_kwh / k;
        row.discharged_kwh_per_vehicle = b.discharged_kwh / k;
        row.served_count = b.served_count;
        row.objective = plan.objective();
        // The solver bound also covers the tie-break term (below 1e-6 EUR here).
        row.bound = std::min(result.bound, row.objective);
        row.plan = plan;
    } catch (const std::exception& e) {
        row.status = std::string("error: ") + e.what();
    }
    return row;
}

}  // namespace

std::vector<SweepRow> pareto_sweep(const Scenario& scenario, const std::vector<double>& prices,
                                   const SolveSettings& settings, int jobs) {
    if (prices.empty()) throw Error("sweep needs at least one battery price");
    std::vector<double> sorted = prices;
    std::sort(sorted.begin(), sorted.end());
    std::vector<SweepRow> rows(sorted.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < sorted.size(); i = next++) rows[i] = sweep_point(scenario, sorted[i], settings);
    };
    const int n_threads = std::clamp(jobs, 1, static_cast<int>(sorted.size()));
    std::vector<std::jthread> pool;
    for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    return rows;
}

std::vector<DegradationPoint> degradation_curve(const DegradationParams& params, int n_points) {
    if (n_points < 2) throw Error("degradation curve needs at least two points");
    const double q_eol = degradation::q_eol(params);
    std::vector<DegradationPoint> out;
    for (int k = 0; k < n_points; ++k) {
        const double q = q_eol * k / (n_points - 1);
        out.push_back({q, degradation::capacity_drop(params, q), degradation::capacity_drop_linear(params, q)});
    }
    return out;
}

namespace {

std::ofstream open_csv(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    return out;
}

}  // namespace

void write_breakdown_csv(const ProfitBreakdown& b, const std::filesystem::path& path) {
    auto out = open_csv(path);
    out << "travel_revenue,charging_cost,discharging_revenue,degradation_cost,profit,charged_kwh,discharged_kwh,"
           "served_count,avg_lifetime_days\n";
    out << text::format(b.travel_revenue) << ',' << text::format(b.charging_cost) << ','
        << text::format(b.discharging_revenue) << ',' << text::format(b.degradation_cost) << ','
        << text::format(b.profit) << ',' << text::format(b.charged_kwh) << ',' << text::format(b.discharged_kwh)
        << ',' << b.served_count << ',' << text::format(b.avg_lifetime_days) << '\n';
}

void write_grid_profile_csv(const std::vector<GridSample>& series, const std::filesystem::path& path) {
    auto out = open_csv(path);
    out << "t_min,charge_kw,discharge_kw,net_kw\n";
    for (const auto& s : series)
        out << s.t_min << ',' << text::format(s.charge_kw) << ',' << text::format(s.discharge_kw) << ','
            << text::format(s.net_kw) << '\n';
}

void write_sweep_csv(const std::vector<SweepRow>& rows, const std::filesystem::path& path) {
    auto out = open_csv(path);
    out << "p_batt_per_kwh,degradation_cost_per_vehicle_day,lifetime_days,objective_excl_travel,"
           "charged_kwh_per_vehicle,discharged_kwh_per_vehicle,served_count,objective,bound,wall_time_s,status\n";
    for (const auto& r : rows) {
        std::string status = r.status;
        std::replace(status.begin(), status.end(), ',', ';');
        std::replace(status.begin(), status.end(), '\n', ' ');
        out << text::format(r.p_batt_per_kwh) << ',' << text::format(r.degradation_cost_per_vehicle_day) << ','
            << text::format(r.lifetime_days) << ',' << text::format(r.objective_excl_travel) << ','
            << text::format(r.charged_kwh_per_vehicle) << ',' << text::format(r.discharged_kwh_per_vehicle) << ','
            << r.served_count << ',' << text::format(r.objective) << ',' << text::format(r.bound) << ','
            << text::format(r.wall_time) << ','
            << status << '\n';
    }
}

void write_degradation_curve_csv(const std::vector<DegradationPoint>& curve, const std::filesystem::path& path) {
    auto out = open_csv(path);
    out << "q_kwh,drop_nonlinear,drop_linear\n";
    for (const auto& p : curve)
        out << text::format(p.q_kwh) << ',' << text::format(p.drop_nonlinear) << ',' << text::format(p.drop_linear)
            << '\n';
}

}  // namespace evmaas
