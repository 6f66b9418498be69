#include "evmaas/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include "evmaas/charge_schedule.hpp"

namespace evmaas {

namespace {

struct Chain {
    double cost = 0.0;               // includes the tie-break term
    std::vector<int> nodes;          // 0, requests..., sink
    std::vector<int> stations;       // per transition, kNoStation for none
    std::optional<ChargeSchedule> schedule;

    std::vector<int> encoding() const {
        std::vector<int> e;
        for (std::size_t l = 0; l + 1 < nodes.size(); ++l) {
            e.push_back(nodes[l + 1]);
            e.push_back(stations[l]);
        }
        return e;
    }
};

bool better(double a, const std::vector<int>& ea, double b, const std::vector<int>& eb) {
    const double tol = 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
    if (a < b - tol) return true;
    if (a > b + tol) return false;
    return ea < eb;
}

class Enumerator {
public:
    Enumerator(const Scenario& sc, const TransitionGraph& g, double marginal, double eps)
        : sc_(sc), g_(g), marginal_(marginal), eps_(eps) {}

    std::optional<Chain> best_chain(unsigned mask) const {
        std::vector<int> reqs;
        for (int r = 0; r < g_.n_requests(); ++r) {
            if (mask & (1u << r)) reqs.push_back(r + 1);
        }
        std::optional<Chain> best;
        do {
            std::vector<int> nodes{0};
            nodes.insert(nodes.end(), reqs.begin(), reqs.end());
            nodes.push_back(g_.sink());
            bool ok = true;
            for (std::size_t l = 0; l + 1 < nodes.size() && ok; ++l) ok = g_.arc_feasible(nodes[l], nodes[l + 1]);
            if (!ok) continue;
            std::vector<int> stations(nodes.size() - 1, kNoStation);
            search_stations(nodes, stations, 0, best);
        } while (std::next_permutation(reqs.begin(), reqs.end()));
        return best;
    }

private:
    void search_stations(const std::vector<int>& nodes, std::vector<int>& stations, std::size_t leg,
                         std::optional<Chain>& best) const {
        if (leg == stations.size()) {
            evaluate(nodes, stations, best);
            return;
        }
        stations[leg] = kNoStation;
        search_stations(nodes, stations, leg + 1, best);
        for (int c = 0; c < g_.n_stations(); ++c) {
            if (!g_.charge_feasible(nodes[leg], nodes[leg + 1], c)) continue;
            stations[leg] = c;
            search_stations(nodes, stations, leg + 1, best);
        }
        stations[leg] = kNoStation;
    }

    void evaluate(const std::vector<int>& nodes, const std::vector<int>& stations, std::optional<Chain>& best) const {
        ChargeProblem p;
        p.initial_kwh = sc_.fleet.e0_kwh;
        p.final_kwh = sc_.fleet.e0_kwh;
        p.capacity_kwh = sc_.fleet.e_max_kwh;
        double revenue = 0.0;
        for (std::size_t l = 0; l < stations.size(); ++l) {
            const int i = nodes[l], j = nodes[l + 1], c = stations[l];
            if (j != g_.sink()) revenue += g_.revenue(j);
            ChargeWindow w;
            w.consumption_kwh = g_.leg_energy(i, j);
            if (c != kNoStation) {
                w.consumption_kwh += g_.detour_energy(i, j, c);
                w.max_exchange_kwh = g_.max_charge(i, j, c);
                w.buy_cost = g_.price(i, j) + marginal_ + eps_;
                w.sell_value = g_.price(i, j) - marginal_ - eps_;
            }
            p.windows.push_back(w);
        }
        auto sched = solve_charge_schedule(p);
        if (!sched) return;
        Chain ch{-revenue + sched->cost, nodes, stations, std::move(sched)};
        if (!best || better(ch.cost, ch.encoding(), best->cost, best->encoding())) best = std::move(ch);
    }

    const Scenario& sc_;
    const TransitionGraph& g_;
    double marginal_;
    double eps_;
};

VehicleSchedule to_schedule(const Chain& ch, int vehicle, double e0) {
    VehicleSchedule vs;
    vs.vehicle = vehicle;
    vs.initial_energy_kwh = e0;
    for (std::size_t l = 0; l + 1 < ch.nodes.size(); ++l) {
        PlanLeg leg;
        leg.from = ch.nodes[l];
        leg.to = ch.nodes[l + 1];
        leg.arrival_energy_kwh = ch.schedule->energy[l];
        if (ch.stations[l] != kNoStation)
            leg.stations.push_back({ch.stations[l], ch.schedule->charged[l] - ch.schedule->discharged[l]});
        vs.legs.push_back(std::move(leg));
    }
    return vs;
}

}  // namespace

OracleResult enumerate_optimum(const Scenario& sc, const TransitionGraph& g, const DegradationParams& params,
                               const TinyLimits& limits) {
    const int I = static_cast<int>(sc.requests.size());
    const int K = sc.fleet.n_vehicles;
    if (I > limits.max_requests || K > limits.max_vehicles || static_cast<int>(sc.stations.size()) > limits.max_stations)
        throw Error("oracle: scenario exceeds tiny limits (" + std::to_string(limits.max_requests) + " requests, " +
                    std::to_string(limits.max_vehicles) + " vehicles, " + std::to_string(limits.max_stations) +
                    " stations)");
    if (g.n_requests() != I || g.n_stations() != static_cast<int>(sc.stations.size()))
        throw Error("oracle: graph was not built from this scenario");
    sc.validate();
    params.validate();
    const double marginal = degradation::marginal_cost(params);

    const Enumerator en(sc, g, marginal, limits.tie_break);
    const unsigned full = (1u << I) - 1u;
    std::vector<std::optional<Chain>> chains(full + 1);
    for (unsigned mask = 0; mask <= full; ++mask) chains[mask] = en.best_chain(mask);

    // Split request subsets over vehicles; vehicle k takes a subset disjoint
    // from those of vehicles 0..k-1.
    std::optional<std::pair<double, std::vector<int>>> best;
    std::vector<unsigned> pick(K), best_pick;
    auto rec = [&](auto& self, int k, unsigned used, double cost) -> void {
        if (k == K) {
            std::vector<int> enc;
            for (int v = 0; v < K; ++v) {
                const auto e = chains[pick[v]]->encoding();
                enc.insert(enc.end(), e.begin(), e.end());
                enc.push_back(-2);
            }
            if (!best || better(cost, enc, best->first, best->second)) {
                best = {cost, std::move(enc)};
                best_pick = pick;
            }
            return;
        }
        const unsigned free = full & ~used;
        // All submasks of `free`, including the empty one.
        for (unsigned sub = free;; sub = (sub - 1) & free) {
            if (chains[sub]) {
                pick[k] = sub;
                self(self, k + 1, used | sub, cost + chains[sub]->cost);
            }
            if (sub == 0) break;
        }
    };
    rec(rec, 0, 0u, 0.0);
    if (!best) throw Error("oracle: no feasible schedule (the all-idle plan should always exist)");

    OracleResult out;
    out.plan.n_requests = I;
    for (int k = 0; k < K; ++k) out.plan.vehicles.push_back(to_schedule(*chains[best_pick[k]], k, sc.fleet.e0_kwh));
    complete_plan(out.plan, g, marginal);
    out.objective = out.plan.objective();
    return out;
}

}  // namespace evmaas
