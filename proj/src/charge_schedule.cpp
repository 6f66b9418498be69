#include "evmaas/charge_schedule.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace evmaas {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kFlowTol = 1e-12;

class FlowNetwork {
public:
    explicit FlowNetwork(int nodes) : adj_(nodes) {}

    int add_arc(int from, int to, double cap, double cost) {
        adj_[from].push_back({to, cap, cost, static_cast<int>(adj_[to].size())});
        adj_[to].push_back({from, 0.0, -cost, static_cast<int>(adj_[from].size()) - 1});
        handles_.push_back({from, static_cast<int>(adj_[from].size()) - 1});
        return static_cast<int>(handles_.size()) - 1;
    }

    double flow(int arc) const {
        const auto [from, idx] = handles_[arc];
        const auto& a = adj_[from][idx];
        return adj_[a.to][a.rev].cap;
    }

    /// Augments along shortest s-t paths while they have negative cost.
    void min_cost_flow(int s, int t) {
        const int n = static_cast<int>(adj_.size());
        while (true) {
            std::vector<double> dist(n, kInf);
            std::vector<std::pair<int, int>> parent(n, {-1, -1});
            dist[s] = 0.0;
            for (int round = 0; round < n; ++round) {
                bool changed = false;
                for (int u = 0; u < n; ++u) {
                    if (dist[u] == kInf) continue;
                    for (int k = 0; k < static_cast<int>(adj_[u].size()); ++k) {
                        const auto& a = adj_[u][k];
                        if (a.cap <= kFlowTol) continue;
                        const double nd = dist[u] + a.cost;
                        if (nd < dist[a.to] - 1e-12) {
                            dist[a.to] = nd;
                            parent[a.to] = {u, k};
                            changed = true;
                        }
                    }
                }
                if (!changed) break;
            }
            if (dist[t] == kInf || dist[t] >= -1e-12) return;
            double push = kInf;
            for (int v = t; v != s; v = parent[v].first) {
                const auto [u, k] = parent[v];
                push = std::min(push, adj_[u][k].cap);
            }
            if (!(push > kFlowTol) || push == kInf) return;
            for (int v = t; v != s; v = parent[v].first) {
                const auto [u, k] = parent[v];
                auto& a = adj_[u][k];
                a.cap -= push;
                adj_[a.to][a.rev].cap += push;
            }
        }
    }

private:
    struct Arc {
        int to;
        double cap;
        double cost;
        int rev;
    };
    std::vector<std::vector<Arc>> adj_;
    std::vector<std::pair<int, int>> handles_;
};

}  // namespace

std::optional<ChargeSchedule> solve_charge_schedule(const ChargeProblem& p) {
    const int m = static_cast<int>(p.windows.size());
    const double tol = 1e-9 * std::max(1.0, p.capacity_kwh);
    if (m == 0) {
        if (std::abs(p.initial_kwh - p.final_kwh) > tol) return std::nullopt;
        return ChargeSchedule{};
    }

    // Nodes: source, sink, grid, then one node per window.
    constexpr int S = 0, T = 1, G = 2;
    auto node = [](int l) { return 3 + l; };
    FlowNetwork net(3 + m);

    double total_cost = 0.0;
    for (const auto& w : p.windows) total_cost += std::abs(w.buy_cost) + std::abs(w.sell_value);
    const double big = 1e3 * (1.0 + total_cost);

    struct Required {
        int arc;
        double cap;
    };
    std::vector<Required> required;
    auto require = [&](int from, int to, double cap) {
        if (cap > 0.0) required.push_back({net.add_arc(from, to, cap, -big), cap});
    };

    require(S, node(0), p.initial_kwh);
    for (int l = 0; l < m; ++l) {
        const auto& w = p.windows[l];
        require(node(l), T, w.consumption_kwh + (l == m - 1 ? p.final_kwh : 0.0));
        if (l + 1 < m) net.add_arc(node(l), node(l + 1), p.capacity_kwh, 0.0);
    }
    net.add_arc(S, G, kInf, 0.0);
    net.add_arc(G, T, kInf, 0.0);

    // Exchange arcs. A negative-cost direction starts saturated: it is
    // represented by a cancellation arc of positive cost and a required
    // source/sink arc carrying the pre-saturated amount.
    struct Exchange {
        int charge_arc = -1, discharge_arc = -1;
        bool charge_saturated = false, discharge_saturated = false;
    };
    std::vector<Exchange> ex(m);
    for (int l = 0; l < m; ++l) {
        const auto& w = p.windows[l];
        const double cap = w.max_exchange_kwh;
        if (!(cap > 0.0)) continue;
        if (w.buy_cost >= 0.0) {
            ex[l].charge_arc = net.add_arc(G, node(l), cap, w.buy_cost);
        } else {
            ex[l].charge_saturated = true;
            ex[l].charge_arc = net.add_arc(node(l), G, cap, -w.buy_cost);
            require(S, node(l), cap);
        }
        if (w.sell_value <= 0.0) {
            ex[l].discharge_arc = net.add_arc(node(l), G, cap, -w.sell_value);
        } else {
            ex[l].discharge_saturated = true;
            ex[l].discharge_arc = net.add_arc(G, node(l), cap, w.sell_value);
            require(node(l), T, cap);
        }
    }

    net.min_cost_flow(S, T);

    for (const auto& r : required) {
        if (net.flow(r.arc) < r.cap - tol) return std::nullopt;
    }

    ChargeSchedule out;
    out.charged.assign(m, 0.0);
    out.discharged.assign(m, 0.0);
    out.energy.assign(m, 0.0);
    double e = p.initial_kwh;
    for (int l = 0; l < m; ++l) {
        const auto& w = p.windows[l];
        if (ex[l].charge_arc >= 0) {
            const double f = net.flow(ex[l].charge_arc);
            out.charged[l] = ex[l].charge_saturated ? w.max_exchange_kwh - f : f;
        }
        if (ex[l].discharge_arc >= 0) {
            const double f = net.flow(ex[l].discharge_arc);
            out.discharged[l] = ex[l].discharge_saturated ? w.max_exchange_kwh - f : f;
        }
        // Buying and selling in one window is never better than the net
        // exchange when buy_cost >= sell_value; equal costs can leave both.
        if (w.buy_cost >= w.sell_value) {
            const double both = std::min(out.charged[l], out.discharged[l]);
            out.charged[l] -= both;
            out.discharged[l] -= both;
        }
        for (double* v : {&out.charged[l], &out.discharged[l]}) {
            if (std::abs(*v) < 1e-12) *v = 0.0;
        }
        e = e - w.consumption_kwh + out.charged[l] - out.discharged[l];
        out.energy[l] = e;
        out.cost += w.buy_cost * out.charged[l] - w.sell_value * out.discharged[l];
    }
    return out;
}

}  // namespace evmaas
