#pragma once

#include <filesystem>
#include <vector>

#include "evmaas/scenario.hpp"

namespace evmaas {

struct StationDetour {
    double minutes = 0.0;
    double km = 0.0;
};

/// Extra distance and time of passing by `station` between a drop-off and the
/// next pick-up, relative to driving there directly.
StationDetour station_detour(const Point& dropoff, const Point& next_pickup, const Point& station,
                             double detour_factor, double speed_kmh);

/// Transition graph over the extended request set {0, 1, ..., I, I+1}.
///
/// Node 0 and node I+1 sit at the depot, with t_0 = 0 and t_{I+1} equal to the
/// horizon. Node n in 1..I is request n-1 of the scenario. For i != j the
/// fastest-path quantities describe the deadhead d_i -> o_j; on the diagonal
/// they describe the service leg o_i -> d_i.
class TransitionGraph {
public:
    int n_requests() const { return n_requests_; }
    int n_nodes() const { return n_requests_ + 2; }
    int sink() const { return n_requests_ + 1; }
    int n_stations() const { return n_stations_; }
    int horizon() const { return horizon_; }
    double e_max() const { return e_max_; }

    double node_time(int i) const { return node_time_[i]; }
    double revenue(int i) const { return revenue_[i]; }
    double station_power(int c) const { return station_power_[c]; }

    double t_fp(int i, int j) const { return t_fp_[pair(i, j)]; }
    double d_fp(int i, int j) const { return d_fp_[pair(i, j)]; }
    double t_ava(int i, int j) const { return t_ava_[pair(i, j)]; }
    bool arc_feasible(int i, int j) const { return arc_ok_[pair(i, j)] != 0; }
    /// Energy of transition ij without a station visit, kWh.
    double leg_energy(int i, int j) const { return leg_energy_[pair(i, j)]; }
    /// Average electricity price over the idle window [t_i + t_fp_ii, t_j], EUR/kWh.
    double price(int i, int j) const { return price_[pair(i, j)]; }

    double detour_minutes(int i, int j, int c) const { return detour_min_[triple(i, j, c)]; }
    double detour_km(int i, int j, int c) const { return detour_km_[triple(i, j, c)]; }
    /// Extra energy of the station detour, kWh.
    double detour_energy(int i, int j, int c) const { return detour_km_[triple(i, j, c)] * econ_; }
    bool charge_feasible(int i, int j, int c) const { return charge_ok_[triple(i, j, c)] != 0; }
    /// Maximum energy exchangeable at station c during ij, kWh; 0 when not charge-feasible.
    double max_charge(int i, int j, int c) const { return c_hat_[triple(i, j, c)]; }
    /// Time interval spent plugged in at station c during ij (minutes).
    double window_start(int i, int j, int c) const { return win_start_[triple(i, j, c)]; }
    double window_end(int i, int j, int c) const { return win_start_[triple(i, j, c)] + slack(i, j, c); }
    /// t_ava - t_fp - detour time; negative when the station does not fit.
    double slack(int i, int j, int c) const { return t_ava(i, j) - t_fp(i, j) - detour_minutes(i, j, c); }

    friend TransitionGraph build_graph(const Scenario& scenario);

private:
    std::size_t pair(int i, int j) const { return static_cast<std::size_t>(i) * n_nodes() + j; }
    std::size_t triple(int i, int j, int c) const { return pair(i, j) * n_stations_ + c; }

    int n_requests_ = 0;
    int n_stations_ = 0;
    int horizon_ = 0;
    double e_max_ = 0.0;
    double econ_ = 0.0;
    std::vector<double> node_time_, revenue_, station_power_;
    std::vector<double> t_fp_, d_fp_, t_ava_, leg_energy_, price_;
    std::vector<char> arc_ok_;
    std::vector<double> detour_min_, detour_km_, c_hat_, win_start_;
    std::vector<char> charge_ok_;
};

TransitionGraph build_graph(const Scenario& scenario);

/// (t_ava - t_fp - dT) * P_ch, capped at the usable battery capacity; 0 for
/// triples that are not charge-feasible.
double max_charge_energy(const TransitionGraph& graph, int i, int j, int c, double p_ch_kw);

/// Debug dump with columns i,j,c,t_fp,t_ava,dT,chat (one row per feasible arc and station).
void write_graph_csv(const TransitionGraph& graph, const std::filesystem::path& path);

}  // namespace evmaas
