#pragma once

#include <array>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "evmaas/dag.hpp"
#include "evmaas/degradation.hpp"
#include "evmaas/plan.hpp"
#include "evmaas/scenario.hpp"

namespace evmaas {

enum class VarKind { Binary, Continuous };
enum class Sense { LessEqual, Equal, GreaterEqual };

struct Variable {
    std::string name;
    VarKind kind = VarKind::Continuous;
    double lower = 0.0;
    double upper = 0.0;
    double objective = 0.0;
};

struct Term {
    int var = 0;
    double coef = 0.0;
};

struct Constraint {
    std::string name;
    std::vector<Term> terms;
    Sense sense = Sense::LessEqual;
    double rhs = 0.0;
};

/// Variable values keyed by variable name; absent names read as 0.
using VariableValues = std::unordered_map<std::string, double>;

struct ModelOptions {
    /// Added to the per-kWh cost of Cp + Cm so that simultaneous charge and
    /// discharge is never optimal, even with zero prices and p_batt = 0.
    double tie_break = 1e-9;
    /// Orders identical vehicles by the index of their first node. Removes
    /// permuted copies of every schedule without changing the optimum.
    bool symmetry_breaking = true;
    /// Per vehicle, total consumption equals net energy bought, because the
    /// day starts and ends at E0. Implied by the energy rows for integral X
    /// but much tighter in the relaxation, where the big-M rows go slack.
    bool energy_cycle_rows = true;
    /// Bounds on the energy after each station transition in terms of the
    /// departure energy alone. Also implied for integral X.
    bool departure_energy_rows = true;
};

/// Solver-neutral mixed-integer linear program (minimization).
class MILPModel {
public:
    int add_variable(std::string name, VarKind kind, double lower, double upper, double objective);
    void add_constraint(std::string name, std::vector<Term> terms, Sense sense, double rhs);

    const std::vector<Variable>& variables() const { return variables_; }
    const std::vector<Constraint>& constraints() const { return constraints_; }
    int binary_count() const;
    std::optional<int> find(const std::string& name) const;

    double objective_value(const std::vector<double>& x) const;
    /// Largest violation over all rows and bounds.
    double max_violation(const std::vector<double>& x) const;
    std::vector<double> to_vector(const VariableValues& values) const;
    VariableValues to_values(const std::vector<double>& x) const;

    // Index maps, filled by build_model. Missing keys mean the variable was
    // never created because the arc or triple is infeasible.
    std::map<std::array<int, 3>, int> x_index;   // (i, j, k)
    std::map<std::array<int, 4>, int> s_index;   // (i, j, k, c)
    std::map<std::array<int, 4>, int> cp_index;  // (i, j, k, c)
    std::map<std::array<int, 4>, int> cm_index;  // (i, j, k, c)
    std::map<std::array<int, 2>, int> e_index;   // (j, k)

    std::optional<int> x(int i, int j, int k) const;
    std::optional<int> s(int i, int j, int k, int c) const;

    // Problem data needed to decode a solution.
    std::shared_ptr<const TransitionGraph> graph;
    int n_vehicles = 0;
    double e0_kwh = 0.0;
    double e_max_kwh = 0.0;
    double marginal_degradation = 0.0;
    double tie_break = 0.0;
    double big_m = 0.0;

private:
    std::vector<Variable> variables_;
    std::vector<Constraint> constraints_;
    std::unordered_map<std::string, int> by_name_;
};

/// Assembles the fleet operation MILP. Throws Error when `graph` was not
/// built from `scenario` or when the scenario is invalid.
MILPModel build_model(const Scenario& scenario, const TransitionGraph& graph, const DegradationParams& params,
                      const ModelOptions& options = {});

/// Decodes integral variable values into per-vehicle schedules. Energies and
/// objective parts are recomputed from the decoded plan.
FleetPlan extract_plan(const MILPModel& model, const VariableValues& values);

}  // namespace evmaas
