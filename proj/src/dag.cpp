#include "evmaas/dag.hpp"

#include <algorithm>
#include <fstream>

#include "text.hpp"

namespace evmaas {

namespace {
// Absorbs rounding in the time comparisons of the feasibility masks.
constexpr double kTimeTol = 1e-9;
}  // namespace

StationDetour station_detour(const Point& dropoff, const Point& next_pickup, const Point& station,
                             double detour_factor, double speed_kmh) {
    const double direct = euclidean(dropoff, next_pickup);
    const double via = euclidean(dropoff, station) + euclidean(station, next_pickup);
    const double km = std::max(0.0, detour_factor * (via - direct));
    return {km / speed_kmh * kMinutesPerHour, km};
}

TransitionGraph build_graph(const Scenario& sc) {
    TransitionGraph g;
    const int I = static_cast<int>(sc.requests.size());
    const int C = static_cast<int>(sc.stations.size());
    g.n_requests_ = I;
    g.n_stations_ = C;
    g.horizon_ = sc.horizon;
    g.e_max_ = sc.fleet.e_max_kwh;
    g.econ_ = sc.fleet.econ_kwh_per_km;
    const int n = I + 2;
    const int sink = I + 1;
    const auto& fleet = sc.fleet;

    // Pick-up and drop-off point of each node; the depot nodes coincide.
    std::vector<Point> pickup(n, fleet.depot), dropoff(n, fleet.depot);
    g.node_time_.assign(n, 0.0);
    g.revenue_.assign(n, 0.0);
    for (int r = 0; r < I; ++r) {
        pickup[r + 1] = sc.requests[r].origin;
        dropoff[r + 1] = sc.requests[r].destination;
        g.node_time_[r + 1] = sc.requests[r].t_request;
        g.revenue_[r + 1] = sc.requests[r].revenue;
    }
    g.node_time_[sink] = sc.horizon;
    for (const auto& s : sc.stations) g.station_power_.push_back(s.power_kw);

    const std::size_t nn = static_cast<std::size_t>(n) * n;
    g.t_fp_.assign(nn, 0.0);
    g.d_fp_.assign(nn, 0.0);
    g.t_ava_.assign(nn, 0.0);
    g.leg_energy_.assign(nn, 0.0);
    g.price_.assign(nn, 0.0);
    g.arc_ok_.assign(nn, 0);
    g.detour_min_.assign(nn * C, 0.0);
    g.detour_km_.assign(nn * C, 0.0);
    g.c_hat_.assign(nn * C, 0.0);
    g.win_start_.assign(nn * C, 0.0);
    g.charge_ok_.assign(nn * C, 0);

    auto road_km = [&](const Point& a, const Point& b) { return fleet.detour_factor * euclidean(a, b); };
    auto minutes = [&](double km) { return km / fleet.speed_kmh * kMinutesPerHour; };

    for (int i = 0; i < n; ++i) {
        const double service_km = road_km(pickup[i], dropoff[i]);
        g.d_fp_[g.pair(i, i)] = service_km;
        g.t_fp_[g.pair(i, i)] = minutes(service_km);
    }

    for (int i = 0; i < n; ++i) {
        const double ready = g.node_time_[i] + g.t_fp(i, i);
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const auto ij = g.pair(i, j);
            const double km = road_km(dropoff[i], pickup[j]);
            g.d_fp_[ij] = km;
            g.t_fp_[ij] = minutes(km);
            g.t_ava_[ij] = g.node_time_[j] - ready;

            bool ok = false;
            if (i != sink && j != 0) {
                // Returning to the depot is always allowed; the horizon only limits charging.
                ok = j == sink || g.t_fp_[ij] <= g.t_ava_[ij] + kTimeTol;
            }
            g.arc_ok_[ij] = ok ? 1 : 0;

            double energy_km = km;
            if (fleet.count_service_energy && j != sink) energy_km += g.d_fp(j, j);
            g.leg_energy_[ij] = energy_km * fleet.econ_kwh_per_km;
            g.price_[ij] = sc.prices.average(ready, g.node_time_[j]);

            for (int c = 0; c < C; ++c) {
                const auto t = g.triple(i, j, c);
                const auto& st = sc.stations[c];
                const auto detour = station_detour(dropoff[i], pickup[j], st.location, fleet.detour_factor,
                                                   fleet.speed_kmh);
                g.detour_min_[t] = detour.minutes;
                g.detour_km_[t] = detour.km;
                g.win_start_[t] = ready + minutes(road_km(dropoff[i], st.location));
                const double slack = g.t_ava_[ij] - g.t_fp_[ij] - detour.minutes;
                const bool fits = ok && slack >= -kTimeTol;
                g.charge_ok_[t] = fits ? 1 : 0;
                if (fits) {
                    g.c_hat_[t] = std::min(std::max(0.0, slack) / kMinutesPerHour * st.power_kw, fleet.e_max_kwh);
                }
            }
        }
    }
    return g;
}

double max_charge_energy(const TransitionGraph& g, int i, int j, int c, double p_ch_kw) {
    if (!g.charge_feasible(i, j, c)) return 0.0;
    return std::min(std::max(0.0, g.slack(i, j, c)) / kMinutesPerHour * p_ch_kw, g.e_max());
}

void write_graph_csv(const TransitionGraph& g, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << "i,j,c,t_fp,t_ava,dT,chat\n";
    for (int i = 0; i < g.n_nodes(); ++i) {
        for (int j = 0; j < g.n_nodes(); ++j) {
            if (i == j || !g.arc_feasible(i, j)) continue;
            const auto prefix = std::to_string(i) + ',' + std::to_string(j) + ',';
            const auto times = text::format(g.t_fp(i, j)) + ',' + text::format(g.t_ava(i, j)) + ',';
            if (g.n_stations() == 0) out << prefix << ',' << times << ",0\n";
            for (int c = 0; c < g.n_stations(); ++c) {
                out << prefix << c << ',' << times << text::format(g.detour_minutes(i, j, c)) << ','
                    << text::format(g.max_charge(i, j, c)) << '\n';
            }
        }
    }
}

}  // namespace evmaas
