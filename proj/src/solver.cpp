#include "evmaas/solver.hpp"

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "evmaas/charge_schedule.hpp"
#include "evmaas/mps.hpp"
#include "text.hpp"

namespace evmaas {

std::string to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::GapFeasible: return "gap-feasible";
        case SolveStatus::Infeasible: return "infeasible";
        case SolveStatus::TimeoutNoSolution: return "timeout-no-solution";
    }
    return "unknown";
}

std::string to_string(Backend b) { return b == Backend::BuiltinTiny ? "builtin-tiny" : "external-command"; }

Backend parse_backend(const std::string& text) {
    if (text == "external-command" || text == "external") return Backend::ExternalCommand;
    if (text == "builtin-tiny" || text == "tiny") return Backend::BuiltinTiny;
    throw Error("unknown backend '" + text + "' (external-command, builtin-tiny)");
}

void SolveSettings::validate() const {
    if (!(mip_gap >= 0.0) || !std::isfinite(mip_gap)) throw Error("mip_gap must be >= 0");
    if (!(time_limit > 0.0)) throw Error("time_limit must be > 0");
    if (threads < 1) throw Error("threads must be >= 1");
}

std::string default_solver_command() {
    if (const char* env = std::getenv("EVMAAS_SOLVER_CMD"); env && *env) return env;
#ifdef EVMAAS_CBC_PATH
    const std::string cbc = EVMAAS_CBC_PATH;
    if (!cbc.empty()) return cbc + " {mps} -ratio {gap} -sec {timelimit} -threads {threads} -solve -solu {sol}";
#endif
    return {};
}

// ---------------------------------------------------------------------------
// Solution files

namespace {

std::optional<SolveStatus> columnar_status(std::string_view head, bool& has_solution) {
    has_solution = true;
    if (head.starts_with("Optimal")) return SolveStatus::Optimal;
    if (head.starts_with("Infeasible") || head.starts_with("Integer infeasible")) {
        has_solution = false;
        return SolveStatus::Infeasible;
    }
    if (head.starts_with("Stopped on")) {
        if (head.find("no integer solution") != std::string_view::npos) {
            has_solution = false;
            return SolveStatus::TimeoutNoSolution;
        }
        return SolveStatus::GapFeasible;
    }
    return std::nullopt;
}

SolutionFile parse_columnar(const std::vector<std::string_view>& lines) {
    SolutionFile out;
    const auto head = text::trim(lines.front());
    out.status_text = std::string(head);
    bool has_solution = true;
    out.status = columnar_status(head, has_solution);
    if (const auto pos = head.find("objective value"); pos != std::string_view::npos) {
        const auto toks = text::tokens(head.substr(pos + 15));
        if (!toks.empty()) out.objective = text::to_double(toks.front());
    }
    if (!has_solution) return out;
    for (std::size_t l = 1; l < lines.size(); ++l) {
        auto toks = text::tokens(lines[l]);
        if (!toks.empty() && toks.front() == "**") toks.erase(toks.begin());
        if (toks.empty()) continue;
        if (toks.size() < 3 || !text::to_int(toks[0])) throw Error("bad solution row: " + std::string(lines[l]));
        const auto v = text::to_double(toks[2]);
        if (!v) throw Error("bad solution value: " + std::string(lines[l]));
        out.values[std::string(toks[1])] = *v;
    }
    return out;
}

SolutionFile parse_name_value(const std::vector<std::string_view>& lines) {
    SolutionFile out;
    std::string model_status, primal_status;
    std::size_t l = 0;
    for (; l < lines.size(); ++l) {
        const auto t = text::trim(lines[l]);
        if (t == "Model status" && l + 1 < lines.size()) {
            model_status = std::string(text::trim(lines[++l]));
        } else if (t.starts_with("Model status")) {
            const auto colon = t.find(':');
            if (colon != std::string_view::npos) model_status = std::string(text::trim(t.substr(colon + 1)));
        } else if (t == "# Primal solution values" && l + 1 < lines.size()) {
            primal_status = std::string(text::trim(lines[++l]));
        } else if (t.starts_with("Objective ")) {
            out.objective = text::to_double(t.substr(10));
        } else if (t.starts_with("# Columns")) {
            ++l;
            break;
        }
    }
    out.status_text = model_status;
    const bool feasible = primal_status.empty() || primal_status == "Feasible";
    if (model_status == "Optimal") {
        out.status = SolveStatus::Optimal;
    } else if (model_status == "Infeasible") {
        out.status = SolveStatus::Infeasible;
    } else if (model_status.find("limit") != std::string::npos || model_status.find("Interrupt") != std::string::npos) {
        out.status = feasible && l < lines.size() ? SolveStatus::GapFeasible : SolveStatus::TimeoutNoSolution;
    }
    if (!out.status || !(*out.status == SolveStatus::Optimal || *out.status == SolveStatus::GapFeasible)) return out;
    for (; l < lines.size(); ++l) {
        const auto t = text::trim(lines[l]);
        if (t.empty()) continue;
        if (t.starts_with("#")) break;  // "# Rows" and beyond
        const auto toks = text::tokens(t);
        if (toks.size() < 2) throw Error("bad solution row: " + std::string(t));
        const auto v = text::to_double(toks[1]);
        if (!v) throw Error("bad solution value: " + std::string(t));
        out.values[std::string(toks[0])] = *v;
    }
    return out;
}

}  // namespace

SolutionFile parse_solution(const std::string& content) {
    std::vector<std::string_view> lines;
    for (auto line : text::split(content, '\n')) {
        if (!line.empty()) lines.push_back(line);
    }
    if (lines.empty()) throw Error("empty solution file");
    for (const auto& line : lines) {
        if (line.starts_with("Model status")) return parse_name_value(lines);
    }
    if (lines.front().find(" - objective value") != std::string_view::npos) return parse_columnar(lines);
    throw Error("unrecognised solution file format");
}

// ---------------------------------------------------------------------------
// Continuous completion

std::optional<std::vector<double>> complete_continuous(const MILPModel& m, std::vector<double> x) {
    if (!m.graph) throw Error("complete_continuous needs a model built by build_model");
    const auto& g = *m.graph;
    const auto& vars = m.variables();
    for (std::size_t v = 0; v < vars.size(); ++v) {
        if (vars[v].kind == VarKind::Binary) x[v] = x[v] > 0.5 ? 1.0 : 0.0;
    }
    for (const auto& idx : {&m.cp_index, &m.cm_index}) {
        for (const auto& [key, v] : *idx) x[v] = 0.0;
    }
    const int n = g.n_nodes();
    const int sink = g.sink();
    const int C = g.n_stations();

    // S = 1 requires X = 1 on the same arc.
    for (const auto& [key, v] : m.s_index) {
        if (x[v] == 1.0 && x[m.x_index.at({key[0], key[1], key[2]})] == 0.0) return std::nullopt;
    }

    for (int k = 0; k < m.n_vehicles; ++k) {
        std::vector<std::array<int, 3>> legs;  // from, to, station
        int arcs_on = 0;
        for (const auto& [key, v] : m.x_index) {
            if (key[2] == k && x[v] == 1.0) ++arcs_on;
        }
        int i = 0;
        while (i != sink && static_cast<int>(legs.size()) <= n) {
            int next = -1;
            for (int j = 0; j < n; ++j) {
                const auto v = m.x(i, j, k);
                if (!v || x[*v] == 0.0) continue;
                if (next != -1) return std::nullopt;
                next = j;
            }
            if (next == -1) return std::nullopt;
            int station = -1;
            for (int c = 0; c < C; ++c) {
                const auto sv = m.s(i, next, k, c);
                if (!sv || x[*sv] == 0.0) continue;
                if (station != -1) return std::nullopt;
                station = c;
            }
            legs.push_back({i, next, station});
            i = next;
        }
        if (i != sink || static_cast<int>(legs.size()) != arcs_on) return std::nullopt;

        ChargeProblem p;
        p.initial_kwh = m.e0_kwh;
        p.final_kwh = m.e0_kwh;
        p.capacity_kwh = m.e_max_kwh;
        for (const auto& [a, b, c] : legs) {
            ChargeWindow w;
            w.consumption_kwh = g.leg_energy(a, b);
            if (c >= 0) {
                const int cp = m.cp_index.at({a, b, k, c});
                const int cm = m.cm_index.at({a, b, k, c});
                w.consumption_kwh += g.detour_energy(a, b, c);
                w.max_exchange_kwh = vars[cp].upper;
                w.buy_cost = vars[cp].objective;
                w.sell_value = -vars[cm].objective;
            }
            p.windows.push_back(w);
        }
        const auto sched = solve_charge_schedule(p);
        if (!sched) return std::nullopt;

        for (int j = 0; j < n; ++j) {
            const int ev = m.e_index.at({j, k});
            x[ev] = (j == 0 || j == sink) ? m.e0_kwh : 0.0;
        }
        for (std::size_t l = 0; l < legs.size(); ++l) {
            const auto& [a, b, c] = legs[l];
            if (b != sink) x[m.e_index.at({b, k})] = sched->energy[l];
            if (c >= 0) {
                x[m.cp_index.at({a, b, k, c})] = sched->charged[l];
                x[m.cm_index.at({a, b, k, c})] = sched->discharged[l];
            }
        }
    }
    return x;
}

// ---------------------------------------------------------------------------
// Builtin enumeration

namespace {

constexpr double kFeasTol = 1e-6;

class TinyEnumerator {
public:
    explicit TinyEnumerator(const MILPModel& m) : m_(m), x_(m.variables().size(), 0.0) {
        const auto& vars = m.variables();
        std::vector<char> is_bin(vars.size(), 0);
        for (std::size_t v = 0; v < vars.size(); ++v) {
            if (vars[v].kind == VarKind::Binary) {
                is_bin[v] = 1;
                order_.push_back(static_cast<int>(v));
            }
        }
        position_.assign(vars.size(), -1);
        for (std::size_t p = 0; p < order_.size(); ++p) position_[order_[p]] = static_cast<int>(p);
        rows_of_.resize(order_.size());
        const auto& rows = m.constraints();
        for (std::size_t r = 0; r < rows.size(); ++r) {
            const bool binary_only = std::all_of(rows[r].terms.begin(), rows[r].terms.end(),
                                                 [&](const Term& t) { return is_bin[t.var]; });
            if (!binary_only) continue;
            for (const auto& t : rows[r].terms) rows_of_[position_[t.var]].push_back(static_cast<int>(r));
        }
    }

    void run() { dfs(0); }

    std::optional<std::vector<double>> best;
    double best_objective = 0.0;
    long evaluations = 0;

private:
    // Row still satisfiable given the binaries fixed so far (positions < depth).
    bool row_ok(int r, int depth) const {
        const auto& row = m_.constraints()[r];
        double lo = 0.0, hi = 0.0;
        for (const auto& t : row.terms) {
            const auto& var = m_.variables()[t.var];
            if (position_[t.var] < depth) {
                lo += t.coef * x_[t.var];
                hi += t.coef * x_[t.var];
            } else {
                const double a = t.coef * var.lower, b = t.coef * var.upper;
                lo += std::min(a, b);
                hi += std::max(a, b);
            }
        }
        switch (row.sense) {
            case Sense::LessEqual: return lo <= row.rhs + kFeasTol;
            case Sense::GreaterEqual: return hi >= row.rhs - kFeasTol;
            case Sense::Equal: return lo <= row.rhs + kFeasTol && hi >= row.rhs - kFeasTol;
        }
        return true;
    }

    void dfs(int depth) {
        if (depth == static_cast<int>(order_.size())) {
            evaluate();
            return;
        }
        const int v = order_[depth];
        const auto& var = m_.variables()[v];
        for (double value : {0.0, 1.0}) {
            if (value < var.lower - kFeasTol || value > var.upper + kFeasTol) continue;
            x_[v] = value;
            bool ok = true;
            for (int r : rows_of_[depth]) {
                if (!row_ok(r, depth + 1)) {
                    ok = false;
                    break;
                }
            }
            if (ok) dfs(depth + 1);
        }
        x_[v] = 0.0;
    }

    void evaluate() {
        ++evaluations;
        std::optional<std::vector<double>> full;
        if (m_.graph) {
            full = complete_continuous(m_, x_);
        } else if (std::all_of(m_.variables().begin(), m_.variables().end(),
                               [](const Variable& v) { return v.kind == VarKind::Binary; })) {
            full = x_;
        } else {
            throw Error("builtin-tiny needs a model built by build_model when continuous variables are present");
        }
        if (!full || m_.max_violation(*full) > kFeasTol) return;
        const double obj = m_.objective_value(*full);
        if (!best || obj < best_objective) {
            best = std::move(full);
            best_objective = obj;
        }
    }

    const MILPModel& m_;
    std::vector<double> x_;
    std::vector<int> order_;
    std::vector<int> position_;
    std::vector<std::vector<int>> rows_of_;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

SolveResult solve_tiny(const MILPModel& model, const TinySolveLimits& limits) {
    const int nb = model.binary_count();
    if (nb > limits.max_binaries)
        throw Error("builtin-tiny: " + std::to_string(nb) + " binaries exceed the limit of " +
                    std::to_string(limits.max_binaries) + "; use external backend");
    const auto start = std::chrono::steady_clock::now();
    TinyEnumerator en(model);
    en.run();
    SolveResult out;
    out.log = "builtin-tiny: " + std::to_string(en.evaluations) + " complete assignments evaluated\n";
    if (en.best) {
        out.status = SolveStatus::Optimal;
        out.values = model.to_values(*en.best);
        out.objective = en.best_objective;
        out.bound = en.best_objective;
    } else {
        out.status = SolveStatus::Infeasible;
    }
    out.wall_time = seconds_since(start);
    return out;
}

// ---------------------------------------------------------------------------
// External command

namespace {

std::string substitute(std::string tmpl, const std::string& key, const std::string& value) {
    for (auto pos = tmpl.find(key); pos != std::string::npos; pos = tmpl.find(key, pos + value.size()))
        tmpl.replace(pos, key.size(), value);
    return tmpl;
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class TempDir {
public:
    TempDir() {
        auto pattern = (std::filesystem::temp_directory_path() / "evmaas-XXXXXX").string();
        if (!mkdtemp(pattern.data())) throw Error("cannot create temporary directory");
        path_ = pattern;
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

/// Best bound from a CBC or HiGHS log, if printed.
std::optional<double> log_bound(const std::string& log) {
    std::optional<double> bound;
    for (auto line : text::split(log, '\n')) {
        for (std::string_view key : {"Lower bound:", "Best possible:", "Dual bound"}) {
            const auto pos = line.find(key);
            if (pos == std::string_view::npos) continue;
            const auto toks = text::tokens(line.substr(pos + key.size()));
            if (toks.empty()) continue;
            if (const auto v = text::to_double(toks.front())) bound = *v;
        }
    }
    return bound;
}

}  // namespace

SolveResult solve(const MILPModel& model, const SolveSettings& settings) {
    settings.validate();
    if (settings.backend == Backend::BuiltinTiny) return solve_tiny(model);

    const std::string tmpl = settings.solver_command.empty() ? default_solver_command() : settings.solver_command;
    if (tmpl.empty())
        throw SolverError("no external solver configured; pass --solver-cmd or set EVMAAS_SOLVER_CMD", "");

    const auto start = std::chrono::steady_clock::now();
    TempDir dir;
    const auto mps = dir.path() / "model.mps";
    const auto sol = dir.path() / "model.sol";
    const auto log_path = dir.path() / "solver.log";
    write_mps(model, mps);

    std::string cmd = tmpl;
    cmd = substitute(cmd, "{mps}", mps.string());
    cmd = substitute(cmd, "{sol}", sol.string());
    cmd = substitute(cmd, "{gap}", text::format(settings.mip_gap));
    cmd = substitute(cmd, "{timelimit}", text::format(settings.time_limit));
    cmd = substitute(cmd, "{threads}", std::to_string(settings.threads));
    const int raw = std::system(("(" + cmd + ") > '" + log_path.string() + "' 2>&1").c_str());
    const int code = raw == -1 ? -1 : (WIFEXITED(raw) ? WEXITSTATUS(raw) : 128 + WTERMSIG(raw));

    SolveResult out;
    out.log = "$ " + cmd + "\n" + read_file(log_path);
    if (!std::filesystem::exists(sol))
        throw SolverError("solver produced no solution file (exit code " + std::to_string(code) + ")", out.log);

    const auto sol_text = read_file(sol);
    SolutionFile parsed;
    try {
        parsed = parse_solution(sol_text);
    } catch (const Error& e) {
        throw SolverError(std::string("unparseable solution file: ") + e.what(), out.log + "\n--- solution ---\n" + sol_text);
    }
    if (!parsed.status)
        throw SolverError("unrecognised solver status '" + parsed.status_text + "'", out.log);
    out.status = *parsed.status;
    out.wall_time = seconds_since(start);
    if (!out.has_solution()) return out;

    std::vector<double> x = model.to_vector(parsed.values);
    const auto& vars = model.variables();
    for (std::size_t v = 0; v < vars.size(); ++v) {
        if (vars[v].kind != VarKind::Binary) continue;
        const double r = std::round(x[v]);
        if (std::abs(x[v] - r) > kFeasTol)
            throw SolverError("non-integral value " + text::format(x[v]) + " for " + vars[v].name, out.log);
        x[v] = r;
    }
    if (model.graph) {
        auto full = complete_continuous(model, x);
        if (!full) throw SolverError("solver binaries do not form feasible vehicle chains", out.log);
        x = std::move(*full);
    }
    const double viol = model.max_violation(x);
    if (viol > kFeasTol)
        throw SolverError("solver solution violates the model by " + text::format(viol), out.log);

    out.values = model.to_values(x);
    out.objective = model.objective_value(x);
    const auto bound = log_bound(out.log);
    out.bound = bound ? std::min(*bound, out.objective) : out.objective;
    if (out.status == SolveStatus::Optimal && !bound) out.bound = out.objective;
    out.wall_time = seconds_since(start);
    return out;
}

}  // namespace evmaas
