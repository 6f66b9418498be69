#pragma once

#include <optional>
#include <string>

#include "evmaas/milp_model.hpp"

namespace evmaas {

enum class Backend { ExternalCommand, BuiltinTiny };
enum class SolveStatus { Optimal, GapFeasible, Infeasible, TimeoutNoSolution };

std::string to_string(SolveStatus status);
std::string to_string(Backend backend);
Backend parse_backend(const std::string& text);

struct SolveSettings {
    Backend backend = Backend::ExternalCommand;
    /// Shell command with placeholders {mps} {sol} {gap} {timelimit} {threads}.
    /// Empty means default_solver_command().
    std::string solver_command;
    double mip_gap = 1e-4;
    double time_limit = 600.0;  // seconds
    int threads = 1;

    void validate() const;
};

struct SolveResult {
    SolveStatus status = SolveStatus::TimeoutNoSolution;
    double objective = 0.0;  // recomputed from values
    double bound = 0.0;      // best bound reported by the solver; equals objective when unknown and optimal
    VariableValues values;
    double wall_time = 0.0;
    std::string log;

    bool has_solution() const { return status == SolveStatus::Optimal || status == SolveStatus::GapFeasible; }
};

/// EVMAAS_SOLVER_CMD if set, otherwise a CBC template when a CBC binary was
/// found at configure time, otherwise empty.
std::string default_solver_command();

/// Writes the model to MPS in a private temporary directory, runs the
/// command, and reads the solution back. Binary values are snapped to 0/1 and
/// the continuous part is recomputed exactly for the chosen binaries (solver
/// output carries only ~8 significant digits); every row is then re-checked
/// to 1e-6. Infeasibility is a status; a crash, unparseable output or a
/// solution failing the re-check throws SolverError with the raw output.
SolveResult solve(const MILPModel& model, const SolveSettings& settings);

struct TinySolveLimits {
    int max_binaries = 25;
};

/// Exhaustive enumeration over binary assignments, pruned on rows that hold
/// only binaries. For each surviving assignment the charge amounts and
/// energies follow from the exact per-chain subproblem. Throws Error("... use
/// external backend") above the binary limit.
SolveResult solve_tiny(const MILPModel& model, const TinySolveLimits& limits = {});

/// Contents of a solution file in either supported dialect.
struct SolutionFile {
    std::optional<SolveStatus> status;  // nullopt when the header is unknown
    std::optional<double> objective;
    VariableValues values;
    std::string status_text;
};

/// Columnar dialect: status header ("Optimal - objective value ..."), then
/// rows "index name value [reduced cost]". Name/value dialect: a "Model
/// status" block followed by "# Columns N" and one "name value" line per
/// column. Throws Error when neither dialect matches.
SolutionFile parse_solution(const std::string& text);

/// Recomputes Cp, Cm and E for fixed binaries: decodes each vehicle chain and
/// solves its charge subproblem exactly. Returns nullopt when the binaries do
/// not form chains or the energy limits cannot be met.
std::optional<std::vector<double>> complete_continuous(const MILPModel& model, std::vector<double> x);

}  // namespace evmaas
