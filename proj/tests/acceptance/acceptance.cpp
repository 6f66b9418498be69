// Acceptance gate: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <algorithm>
#include <cfloat>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "../support/fixtures.hpp"
#include "../support/mps_reader.hpp"
#include "evmaas/analysis.hpp"
#include "evmaas/degradation.hpp"
#include "evmaas/milp_model.hpp"
#include "evmaas/mps.hpp"
#include "evmaas/oracle.hpp"
#include "evmaas/solver.hpp"

using namespace evmaas;

namespace {

// Criterion 1
constexpr int kOracleSeeds = 60;
constexpr double kOracleGap = 1e-6;
constexpr double kOracleRelTol = 1e-6;

// Criteria 2 and 3
constexpr double kPbatt = 4000.0;
constexpr double kQeol = 59250.0;
constexpr double kFleetSize = 70.0;  // vehicles behind the daily fleet throughputs
constexpr double kTableTol = 0.02;
constexpr double kAwareCostTol = 0.05;

// Criterion 4
constexpr std::uint64_t kSweepSeed = 3;
constexpr int kSweepRequests = 30;
constexpr int kSweepVehicles = 4;
constexpr int kSweepStations = 2;
constexpr double kSweepGap = 1e-4;
constexpr double kSweepTimeLimit = 150.0;  // CPU seconds per point
const std::vector<double> kSweepPrices = {0, 25, 50, 100, 200};
constexpr double kDischargeMonotoneTol = 1e-6;  // kWh per vehicle
constexpr double kNoDischarge = 1.0;            // kWh, fleet total at the top price

// Criterion 5
constexpr double kValidationTol = 1e-6;  // inside validate_plan

// Criterion 6
constexpr int kMpsModels = 10;
constexpr double kUlpFactor = 4.0;

struct Line {
    bool pass = true;
    std::ostringstream detail;

    void fail(const std::string& why) {
        if (pass) detail.str("");
        if (!pass) detail << "; ";
        pass = false;
        detail << why;
    }
};

int failures = 0;

void report(int n, const std::string& name, Line& line) {
    std::cout << (line.pass ? "PASS" : "FAIL") << " criterion " << n << ": " << name << " (" << line.detail.str()
              << ")" << std::endl;
    failures += !line.pass;
}

bool within_rel(double got, double want, double rel) { return std::abs(got - want) <= rel * std::abs(want); }

std::string fmt(double v, int digits = 6) {
    std::ostringstream s;
    s.precision(digits);
    s << v;
    return s.str();
}

struct Solved {
    Scenario scenario;
    MILPModel model;
    FleetPlan plan;
    VariableValues values;
};

SolveSettings external(double gap, double time_limit) {
    SolveSettings s;
    s.solver_command = testing::test_solver_command();
    s.mip_gap = gap;
    s.time_limit = time_limit;
    return s;
}

// ---------------------------------------------------------------------------

void criterion_oracle(std::vector<Solved>& solved) {
    Line line;
    const auto start = std::chrono::steady_clock::now();
    if (testing::test_solver_command().empty()) {
        line.fail("no external solver configured");
        report(1, "oracle equivalence", line);
        return;
    }
    double worst = 0.0;
    int served = 0;
    for (int seed = 1; seed <= kOracleSeeds; ++seed) {
        const auto sc = testing::tiny_scenario(seed);
        const auto g = build_graph(sc);
        auto model = build_model(sc, g, sc.degradation);
        SolveResult r;
        try {
            r = solve(model, external(kOracleGap, 120.0));
        } catch (const std::exception& e) {
            line.fail("seed " + std::to_string(seed) + ": " + e.what());
            continue;
        }
        if (r.status != SolveStatus::Optimal) {
            line.fail("seed " + std::to_string(seed) + ": status " + to_string(r.status));
            continue;
        }
        auto plan = extract_plan(model, r.values);
        const auto best = enumerate_optimum(sc, g, sc.degradation);
        const double rel = std::abs(plan.objective() - best.objective) / std::max(1.0, std::abs(best.objective));
        worst = std::max(worst, rel);
        served += plan.served_count();
        if (rel > kOracleRelTol)
            line.fail("seed " + std::to_string(seed) + ": MILP " + fmt(plan.objective(), 12) + " vs oracle " +
                      fmt(best.objective, 12));
        solved.push_back({sc, std::move(model), std::move(plan), std::move(r.values)});
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (line.pass)
        line.detail << kOracleSeeds << " seeds, worst relative difference " << fmt(worst, 3) << " <= "
                    << kOracleRelTol << ", " << served << " requests served in total, " << fmt(secs, 3) << " s";
    report(1, "oracle equivalence", line);
}

void criterion_table2() {
    Line line;
    DegradationParams p;
    p.p_batt = kPbatt;
    p.q_eol_override = kQeol;
    struct Case {
        double throughput, cost, lifetime;
    };
    for (const Case c : {Case{10240.0, 690.0, 405.0}, Case{1780.0, 120.0, 2360.0}}) {
        const double cost = degradation::marginal_cost(p) * c.throughput;
        const double life = degradation::lifetime_days(p, c.throughput / kFleetSize);
        if (!within_rel(cost, c.cost, kTableTol))
            line.fail(fmt(c.throughput) + " kWh/day costs " + fmt(cost) + ", expected " + fmt(c.cost));
        if (!within_rel(life, c.lifetime, kTableTol))
            line.fail(fmt(c.throughput) + " kWh/day lasts " + fmt(life) + " days, expected " + fmt(c.lifetime));
        if (line.pass)
            line.detail << (c.throughput == 10240.0 ? "" : "; ") << fmt(c.throughput) << " kWh/day: " << fmt(cost, 5)
                        << " EUR/day, " << fmt(life, 5) << " days";
    }
    report(2, "degradation arithmetic (fleet table)", line);
}

void criterion_table3() {
    Line line;
    DegradationParams p;
    p.p_batt = kPbatt;
    p.q_eol_override = kQeol;
    const double cost = degradation::marginal_cost(p) * 59.0;
    const double life = degradation::lifetime_days(p, 59.0);
    if (!within_rel(cost, 4.0, kAwareCostTol)) line.fail("cost " + fmt(cost) + " EUR/day, expected 4");
    if (!within_rel(life, 1000.0, kTableTol)) line.fail("lifetime " + fmt(life) + " days, expected 1000");
    if (line.pass) line.detail << "59 kWh/day: " << fmt(cost, 4) << " EUR/day, " << fmt(life, 5) << " days";
    report(3, "degradation-aware single vehicle", line);
}

Scenario sweep_scenario() {
    SyntheticOptions o;
    o.seed = kSweepSeed;
    o.n_requests = kSweepRequests;
    o.n_vehicles = kSweepVehicles;
    o.n_stations = kSweepStations;
    o.profile = DemandProfile::Uniform;
    o.price_pattern = PricePattern::TwoLevel;
    return generate_synthetic(o);
}

void criterion_sweep(std::vector<std::pair<Scenario, FleetPlan>>& plans) {
    Line line;
    if (testing::test_solver_command().empty()) {
        line.fail("no external solver configured");
        report(4, "battery price sweep trends", line);
        return;
    }
    const auto sc = sweep_scenario();
    const auto rows = pareto_sweep(sc, kSweepPrices, external(kSweepGap, kSweepTimeLimit), 1);
    std::ostringstream table;
    bool solved_all = true;
    for (const auto& r : rows) {
        table << " p=" << r.p_batt_per_kwh << ":" << r.status << ",dis=" << fmt(r.discharged_kwh_per_vehicle, 4)
              << ",oet=" << fmt(r.objective_excl_travel, 5) << ",gap=" << fmt(r.objective - r.bound, 3) << "EUR"
              << ",served=" << r.served_count;
        if (r.status != "optimal" && r.status != "gap-feasible") {
            line.fail("p=" + fmt(r.p_batt_per_kwh) + " has no solution (" + r.status + ")");
            solved_all = false;
        }
    }
    if (solved_all) {
        for (std::size_t i = 1; i < rows.size(); ++i) {
            const auto& a = rows[i - 1];
            const auto& b = rows[i];
            if (b.discharged_kwh_per_vehicle > a.discharged_kwh_per_vehicle + kDischargeMonotoneTol)
                line.fail("discharge rises from p=" + fmt(a.p_batt_per_kwh) + " to p=" + fmt(b.p_batt_per_kwh));
            const double gap = std::max(a.objective - a.bound, b.objective - b.bound);
            if (b.objective_excl_travel < a.objective_excl_travel - 2.0 * gap)
                line.fail("objective excl. travel falls from p=" + fmt(a.p_batt_per_kwh) + " to p=" +
                          fmt(b.p_batt_per_kwh) + " by more than twice the gap");
            if (b.served_count != a.served_count)
                line.fail("served count changes between p=" + fmt(a.p_batt_per_kwh) + " and p=" +
                          fmt(b.p_batt_per_kwh));
        }
        const double top = rows.back().discharged_kwh_per_vehicle * kSweepVehicles;
        if (top > kNoDischarge) line.fail("discharged " + fmt(top) + " kWh at the top price");
    }
    line.detail << (line.pass ? "" : " |") << table.str().substr(line.pass ? 1 : 0);
    report(4, "battery price sweep trends", line);
    for (const auto& r : rows) {
        if (!r.plan.vehicles.empty()) plans.push_back({sc, r.plan});
    }
}

void criterion_constraints(const std::vector<Solved>& solved, const std::vector<std::pair<Scenario, FleetPlan>>& more) {
    Line line;
    std::vector<std::pair<Scenario, FleetPlan>> plans = more;
    for (const auto& s : solved) plans.push_back({s.scenario, s.plan});
    std::size_t checked = 0;
    for (const auto& [scenario, plan] : plans) {
        const auto g = build_graph(scenario);
        const auto d = validate_plan(plan, scenario, g, scenario.degradation);
        ++checked;
        if (!d.empty()) line.fail("solver plan: " + d.front().tag + ": " + d.front().message);
    }
    if (checked == 0) line.fail("no solver plans to check");
    const auto sc = testing::fault_scenario();
    const auto g = build_graph(sc);
    if (!validate_plan(testing::fault_base_plan(), sc, g, sc.degradation).empty())
        line.fail("the unmodified fault base plan is reported as invalid");
    std::set<std::string> covered;
    for (const auto& f : testing::injected_faults()) {
        std::set<std::string> tags;
        for (const auto& d : validate_plan(f.plan, sc, g, sc.degradation)) tags.insert(d.tag);
        if (tags != std::set<std::string>{f.expected_tag}) {
            std::string got;
            for (const auto& t : tags) got += (got.empty() ? "" : " ") + t;
            line.fail(f.description + ": expected " + f.expected_tag + ", got {" + got + "}");
        }
        covered.insert(f.expected_tag);
    }
    if (covered.size() != 7) line.fail("fault set covers " + std::to_string(covered.size()) + " families, not 7");
    if (line.pass)
        line.detail << checked << " solver plans clean at " << kValidationTol << " kWh; " << covered.size()
                    << " injected faults each tagged exactly";
    report(5, "constraint satisfaction", line);
}

void criterion_invariants(const std::vector<Solved>& solved) {
    Line line;
    std::size_t pairs = 0;
    for (const auto& s : solved) {
        const auto x = s.model.to_vector(s.values);
        for (const auto& [key, cp] : s.model.cp_index) {
            const int cm = s.model.cm_index.at(key);
            ++pairs;
            if (x[cp] * x[cm] != 0.0)
                line.fail(s.model.variables()[cp].name + " and " + s.model.variables()[cm].name + " both nonzero");
        }
    }
    if (pairs == 0) line.fail("no charge variables in solved models");

    // J_batt of a plan exchanging exactly Q_eol.
    DegradationParams p;
    p.p_batt = kPbatt;
    p.q_eol_override = kQeol;
    const auto sc = testing::fault_scenario();
    const auto g = build_graph(sc);
    FleetPlan plan;
    plan.vehicles = {{0, 20.0, {{0, 2, {{0, kQeol}}, 0.0}}}};
    complete_plan(plan, g, degradation::marginal_cost(p));
    const double ulps = std::abs(plan.j_batt - p.p_batt) / (DBL_EPSILON * p.p_batt);
    if (ulps > kUlpFactor) line.fail("J_batt at Q_eol is " + fmt(plan.j_batt, 17));

    const double half = degradation::capacity_drop(p, degradation::q_eol(p) / 4.0);
    if (half != p.de_eol / 2.0) line.fail("capacity_drop(Q_eol/4) = " + fmt(half, 17));

    for (int seed = 1; seed <= kMpsModels; ++seed) {
        const auto m = testing::random_model(1000 + seed);
        const auto d = testing::parse_mps(to_mps(m));
        bool same = d.columns.size() == m.variables().size() && d.rows.size() == m.constraints().size();
        std::size_t nnz = 0;
        for (std::size_t r = 0; same && r < m.constraints().size(); ++r) {
            const auto& row = m.constraints()[r];
            same = d.rows[r].name == row.name && d.rows[r].rhs == row.rhs;
            for (const auto& t : row.terms) {
                ++nnz;
                const auto it = d.matrix.find({static_cast<int>(r), t.var});
                same = same && it != d.matrix.end() && it->second == t.coef;
            }
        }
        for (std::size_t v = 0; same && v < m.variables().size(); ++v) {
            const auto& a = m.variables()[v];
            const auto& b = d.columns[v];
            same = a.name == b.name && a.lower == b.lower && a.upper == b.upper && a.objective == b.objective &&
                   (a.kind == VarKind::Binary) == b.integer;
        }
        same = same && d.matrix.size() == nnz;
        if (!same) line.fail("MPS round trip differs for random model " + std::to_string(seed));
    }
    if (line.pass)
        line.detail << pairs << " Cp/Cm pairs complementary; J_batt(Q_eol) within " << fmt(ulps, 2)
                    << " ulp of p_batt; capacity_drop(Q_eol/4) = " << half << "; " << kMpsModels
                    << " MPS round trips bit-exact";
    report(6, "structural invariants", line);
}

}  // namespace

int main() {
    std::vector<Solved> solved;
    std::vector<std::pair<Scenario, FleetPlan>> sweep_plans;
    criterion_oracle(solved);
    criterion_table2();
    criterion_table3();
    criterion_sweep(sweep_plans);
    criterion_constraints(solved, sweep_plans);
    criterion_invariants(solved);
    return failures;
}
