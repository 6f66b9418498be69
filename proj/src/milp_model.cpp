#include "evmaas/milp_model.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace evmaas {

// ---------------------------------------------------------------------------
// MILPModel

int MILPModel::add_variable(std::string name, VarKind kind, double lower, double upper, double objective) {
    if (!std::isfinite(lower) || !std::isfinite(upper) || lower > upper)
        throw Error("variable " + name + ": bounds must be finite and ordered");
    const int id = static_cast<int>(variables_.size());
    if (!by_name_.emplace(name, id).second) throw Error("duplicate variable " + name);
    variables_.push_back({std::move(name), kind, lower, upper, objective});
    return id;
}

void MILPModel::add_constraint(std::string name, std::vector<Term> terms, Sense sense, double rhs) {
    constraints_.push_back({std::move(name), std::move(terms), sense, rhs});
}

int MILPModel::binary_count() const {
    return static_cast<int>(std::count_if(variables_.begin(), variables_.end(),
                                          [](const Variable& v) { return v.kind == VarKind::Binary; }));
}

std::optional<int> MILPModel::find(const std::string& name) const {
    const auto it = by_name_.find(name);
    if (it == by_name_.end()) return std::nullopt;
    return it->second;
}

std::optional<int> MILPModel::x(int i, int j, int k) const {
    const auto it = x_index.find({i, j, k});
    if (it == x_index.end()) return std::nullopt;
    return it->second;
}

std::optional<int> MILPModel::s(int i, int j, int k, int c) const {
    const auto it = s_index.find({i, j, k, c});
    if (it == s_index.end()) return std::nullopt;
    return it->second;
}

double MILPModel::objective_value(const std::vector<double>& x) const {
    double total = 0.0;
    for (std::size_t v = 0; v < variables_.size(); ++v) total += variables_[v].objective * x[v];
    return total;
}

double MILPModel::max_violation(const std::vector<double>& x) const {
    double worst = 0.0;
    for (std::size_t v = 0; v < variables_.size(); ++v) {
        worst = std::max({worst, variables_[v].lower - x[v], x[v] - variables_[v].upper});
    }
    for (const auto& row : constraints_) {
        double lhs = 0.0;
        for (const auto& t : row.terms) lhs += t.coef * x[t.var];
        switch (row.sense) {
            case Sense::LessEqual: worst = std::max(worst, lhs - row.rhs); break;
            case Sense::GreaterEqual: worst = std::max(worst, row.rhs - lhs); break;
            case Sense::Equal: worst = std::max(worst, std::abs(lhs - row.rhs)); break;
        }
    }
    return worst;
}

std::vector<double> MILPModel::to_vector(const VariableValues& values) const {
    std::vector<double> x(variables_.size(), 0.0);
    for (std::size_t v = 0; v < variables_.size(); ++v) {
        if (const auto it = values.find(variables_[v].name); it != values.end()) x[v] = it->second;
    }
    return x;
}

VariableValues MILPModel::to_values(const std::vector<double>& x) const {
    VariableValues out;
    out.reserve(variables_.size());
    for (std::size_t v = 0; v < variables_.size(); ++v) out.emplace(variables_[v].name, x[v]);
    return out;
}

// ---------------------------------------------------------------------------
// Assembly

namespace {

std::string name_of(const char* prefix, std::initializer_list<int> idx) {
    std::string s(prefix);
    for (int v : idx) {
        s += '_';
        s += std::to_string(v);
    }
    return s;
}

void check_consistent(const Scenario& sc, const TransitionGraph& g) {
    if (g.n_requests() != static_cast<int>(sc.requests.size()) ||
        g.n_stations() != static_cast<int>(sc.stations.size()) || g.horizon() != sc.horizon ||
        g.e_max() != sc.fleet.e_max_kwh)
        throw Error("build_model: graph was not built from this scenario");
}

}  // namespace

MILPModel build_model(const Scenario& sc, const TransitionGraph& g, const DegradationParams& params,
                      const ModelOptions& options) {
    // A fleet of zero vehicles still yields a valid (all-rejecting) model.
    if (sc.fleet.n_vehicles < 0) throw Error("build_model: negative vehicle count");
    Scenario probe = sc;
    probe.fleet.n_vehicles = std::max(1, sc.fleet.n_vehicles);
    probe.validate();
    params.validate();
    check_consistent(sc, g);

    MILPModel m;
    m.graph = std::make_shared<const TransitionGraph>(g);
    m.n_vehicles = sc.fleet.n_vehicles;
    m.e0_kwh = sc.fleet.e0_kwh;
    m.e_max_kwh = sc.fleet.e_max_kwh;
    m.marginal_degradation = degradation::marginal_cost(params);
    m.tie_break = options.tie_break;
    // With X_ij = 0 every other term of the energy rows vanishes (S <= X,
    // Cp + Cm <= C_hat * S), leaving |e_j - e_i| <= E_max.
    m.big_m = sc.fleet.e_max_kwh;

    const int n = g.n_nodes();
    const int sink = g.sink();
    const int K = sc.fleet.n_vehicles;
    const int C = g.n_stations();
    const double per_kwh = m.marginal_degradation + m.tie_break;

    // Transition binaries; revenue is collected on the arc entering a request.
    for (int k = 0; k < K; ++k) {
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (i == j || !g.arc_feasible(i, j)) continue;
                const double obj = j != sink ? -g.revenue(j) : 0.0;
                m.x_index[{i, j, k}] = m.add_variable(name_of("X", {i, j, k}), VarKind::Binary, 0.0, 1.0, obj);
            }
        }
    }
    for (const auto& [key, xv] : m.x_index) {
        const auto [i, j, k] = key;
        for (int c = 0; c < C; ++c) {
            if (!g.charge_feasible(i, j, c)) continue;
            const double cap = g.max_charge(i, j, c);
            const double price = g.price(i, j);
            m.s_index[{i, j, k, c}] = m.add_variable(name_of("S", {i, j, k, c}), VarKind::Binary, 0.0, 1.0, 0.0);
            m.cp_index[{i, j, k, c}] =
                m.add_variable(name_of("Cp", {i, j, k, c}), VarKind::Continuous, 0.0, cap, price + per_kwh);
            m.cm_index[{i, j, k, c}] =
                m.add_variable(name_of("Cm", {i, j, k, c}), VarKind::Continuous, 0.0, cap, -price + per_kwh);
        }
    }
    for (int k = 0; k < K; ++k) {
        for (int j = 0; j < n; ++j) {
            const bool depot = j == 0 || j == sink;
            const double lo = depot ? m.e0_kwh : 0.0;
            const double hi = depot ? m.e0_kwh : m.e_max_kwh;
            m.e_index[{j, k}] = m.add_variable(name_of("E", {j, k}), VarKind::Continuous, lo, hi, 0.0);
        }
    }

    // Each request served at most once, left at most once.
    for (int j = 1; j < sink; ++j) {
        std::vector<Term> in, out;
        for (int k = 0; k < K; ++k) {
            for (int i = 0; i < n; ++i) {
                if (auto v = m.x(i, j, k)) in.push_back({*v, 1.0});
                if (auto v = m.x(j, i, k)) out.push_back({*v, 1.0});
            }
        }
        if (!in.empty()) m.add_constraint(name_of("serve", {j}), std::move(in), Sense::LessEqual, 1.0);
        if (!out.empty()) m.add_constraint(name_of("leave", {j}), std::move(out), Sense::LessEqual, 1.0);
    }

    // Flow continuity per vehicle.
    for (int k = 0; k < K; ++k) {
        for (int j = 1; j < sink; ++j) {
            std::vector<Term> terms;
            for (int i = 0; i < n; ++i) {
                if (auto v = m.x(i, j, k)) terms.push_back({*v, 1.0});
                if (auto v = m.x(j, i, k)) terms.push_back({*v, -1.0});
            }
            if (!terms.empty()) m.add_constraint(name_of("flow", {j, k}), std::move(terms), Sense::Equal, 0.0);
        }
        std::vector<Term> out, in;
        for (int j = 0; j < n; ++j) {
            if (auto v = m.x(0, j, k)) out.push_back({*v, 1.0});
            if (auto v = m.x(j, sink, k)) in.push_back({*v, 1.0});
        }
        m.add_constraint(name_of("depot_out", {k}), std::move(out), Sense::Equal, 1.0);
        m.add_constraint(name_of("depot_in", {k}), std::move(in), Sense::Equal, 1.0);
    }

    if (options.symmetry_breaking) {
        for (int k = 0; k + 1 < K; ++k) {
            std::vector<Term> terms;
            for (int j = 1; j < n; ++j) {
                if (auto v = m.x(0, j, k)) terms.push_back({*v, static_cast<double>(j)});
                if (auto v = m.x(0, j, k + 1)) terms.push_back({*v, -static_cast<double>(j)});
            }
            m.add_constraint(name_of("order", {k}), std::move(terms), Sense::LessEqual, 0.0);
        }
    }

    if (options.energy_cycle_rows) {
        std::vector<std::vector<Term>> cycle(K);
        for (const auto& [key, xv] : m.x_index) {
            const auto [i, j, k] = key;
            cycle[k].push_back({xv, g.leg_energy(i, j)});
            for (int c = 0; c < C; ++c) {
                const auto sv = m.s(i, j, k, c);
                if (!sv) continue;
                cycle[k].push_back({*sv, g.detour_energy(i, j, c)});
                cycle[k].push_back({m.cp_index.at({i, j, k, c}), -1.0});
                cycle[k].push_back({m.cm_index.at({i, j, k, c}), 1.0});
            }
        }
        for (int k = 0; k < K; ++k) m.add_constraint(name_of("cycle", {k}), std::move(cycle[k]), Sense::Equal, 0.0);
    }

    // Station visits, exchange bounds and the conditional energy balance.
    const double M = m.big_m;
    for (const auto& [key, xv] : m.x_index) {
        const auto [i, j, k] = key;
        std::vector<Term> visit;
        // Energy row: e_j - e_i + E_ij(X, S) - sum(Cp - Cm) +/- M X  vs  +/- M
        std::vector<Term> balance{{m.e_index.at({j, k}), 1.0},
                                  {m.e_index.at({i, k}), -1.0},
                                  {xv, g.leg_energy(i, j)}};
        for (int c = 0; c < C; ++c) {
            const auto sv = m.s(i, j, k, c);
            if (!sv) continue;
            visit.push_back({*sv, 1.0});
            const int cp = m.cp_index.at({i, j, k, c});
            const int cm = m.cm_index.at({i, j, k, c});
            m.add_constraint(name_of("cap", {i, j, k, c}), {{cp, 1.0}, {cm, 1.0}, {*sv, -g.max_charge(i, j, c)}},
                             Sense::LessEqual, 0.0);
            balance.push_back({*sv, g.detour_energy(i, j, c)});
            balance.push_back({cp, -1.0});
            balance.push_back({cm, 1.0});
        }
        if (!visit.empty() && options.departure_energy_rows) {
            // Energy after the transition, written from the departure side
            // only: e_i - E_ij X - sum(dE S) + sum(Cp - Cm) in [0, E_max].
            // Holds for X = 0 too, where every term but e_i vanishes.
            std::vector<Term> after{{m.e_index.at({i, k}), 1.0}, {xv, -g.leg_energy(i, j)}};
            for (std::size_t t = 3; t < balance.size(); ++t) after.push_back({balance[t].var, -balance[t].coef});
            m.add_constraint(name_of("dlo", {i, j, k}), after, Sense::GreaterEqual, 0.0);
            m.add_constraint(name_of("dhi", {i, j, k}), std::move(after), Sense::LessEqual, m.e_max_kwh);
        }
        if (!visit.empty()) {
            visit.push_back({xv, -1.0});
            m.add_constraint(name_of("visit", {i, j, k}), std::move(visit), Sense::LessEqual, 0.0);
        }
        auto upper = balance;
        upper[2].coef += M;
        m.add_constraint(name_of("ehi", {i, j, k}), std::move(upper), Sense::LessEqual, M);
        auto lower = std::move(balance);
        lower[2].coef -= M;
        m.add_constraint(name_of("elo", {i, j, k}), std::move(lower), Sense::GreaterEqual, -M);
    }
    return m;
}

// ---------------------------------------------------------------------------
// Decoding

namespace {

constexpr double kIntegralityTol = 1e-6;

bool is_one(double v, const std::string& name) {
    if (std::abs(v) <= kIntegralityTol) return false;
    if (std::abs(v - 1.0) <= kIntegralityTol) return true;
    throw Error("non-integral value " + std::to_string(v) + " for " + name);
}

}  // namespace

FleetPlan extract_plan(const MILPModel& m, const VariableValues& values) {
    const auto& g = *m.graph;
    const auto x = m.to_vector(values);
    const int n = g.n_nodes();
    const int sink = g.sink();

    // successor[k][i] for every active transition
    std::vector<std::vector<int>> succ(m.n_vehicles, std::vector<int>(n, -1));
    std::vector<int> visits(n, 0);
    for (const auto& [key, v] : m.x_index) {
        const auto [i, j, k] = key;
        if (!is_one(x[v], m.variables()[v].name)) continue;
        if (succ[k][i] != -1) throw Error("solution violates Eqs. (4)-(6): node " + std::to_string(i) +
                                          " has two successors for vehicle " + std::to_string(k));
        succ[k][i] = j;
    }

    FleetPlan plan;
    plan.n_requests = g.n_requests();
    for (int k = 0; k < m.n_vehicles; ++k) {
        VehicleSchedule vs;
        vs.vehicle = k;
        vs.initial_energy_kwh = m.e0_kwh;
        int at = 0;
        for (int steps = 0; at != sink; ++steps) {
            const int next = succ[k][at];
            if (next < 0 || steps > n)
                throw Error("solution violates Eqs. (4)-(6): broken chain for vehicle " + std::to_string(k));
            if (next != sink && ++visits[next] > 1)
                throw Error("solution violates Eqs. (4)-(6): request node " + std::to_string(next) +
                            " served twice");
            PlanLeg leg{at, next, {}, 0.0};
            for (int c = 0; c < g.n_stations(); ++c) {
                const auto sv = m.s(at, next, k, c);
                if (!sv || !is_one(x[*sv], m.variables()[*sv].name)) continue;
                double charge = x[m.cp_index.at({at, next, k, c})] - x[m.cm_index.at({at, next, k, c})];
                if (std::abs(charge) < 1e-9) charge = 0.0;
                leg.stations.push_back({c, charge});
            }
            vs.legs.push_back(std::move(leg));
            at = next;
        }
        plan.vehicles.push_back(std::move(vs));
    }
    // Any active arc not on a depot-rooted chain means a detached cycle or a dangling path.
    for (int k = 0; k < m.n_vehicles; ++k) {
        std::set<int> on_chain{0};
        for (const auto& leg : plan.vehicles[k].legs) on_chain.insert(leg.to);
        for (int i = 0; i < n; ++i) {
            if (succ[k][i] != -1 && !on_chain.count(i))
                throw Error("solution violates Eqs. (4)-(6): transition from node " + std::to_string(i) +
                            " is not on vehicle " + std::to_string(k) + "'s chain");
        }
    }
    recompute_energies(plan, g);
    complete_plan(plan, g, m.marginal_degradation);
    return plan;
}

}  // namespace evmaas
