#include "evmaas/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <iostream>

#include "evmaas/analysis.hpp"
#include "evmaas/milp_model.hpp"
#include "evmaas/oracle.hpp"
#include "evmaas/solver.hpp"
#include "text.hpp"

namespace evmaas {

namespace {

namespace fs = std::filesystem;

struct SolverFlags {
    std::string backend = "external-command";
    std::string command;
    double gap = 1e-4;
    double time_limit = 600.0;
    int threads = 1;

    void add_to(CLI::App* app) {
        app->add_option("--backend", backend, "external-command or builtin-tiny")->capture_default_str();
        app->add_option("--solver-cmd", command,
                        "solver command template with {mps} {sol} {gap} {timelimit} {threads}; "
                        "defaults to $EVMAAS_SOLVER_CMD, then the CBC found at build time");
        app->add_option("--gap", gap, "relative MIP gap")->capture_default_str()->check(CLI::NonNegativeNumber);
        app->add_option("--timelimit", time_limit, "seconds per solve")->capture_default_str()->check(
            CLI::PositiveNumber);
        app->add_option("--threads", threads, "solver threads")->capture_default_str()->check(CLI::PositiveNumber);
    }

    SolveSettings settings() const {
        SolveSettings s;
        s.backend = parse_backend(backend);
        s.solver_command = command;
        s.mip_gap = gap;
        s.time_limit = time_limit;
        s.threads = threads;
        return s;
    }
};

std::vector<double> parse_list(const std::string& csv) {
    std::vector<double> out;
    for (auto tok : text::split(csv, ',')) {
        const auto v = text::to_double(tok);
        if (!v || !std::isfinite(*v) || *v < 0.0) throw Error("bad battery price '" + std::string(tok) + "'");
        out.push_back(*v);
    }
    return out;
}

void print_breakdown(std::ostream& out, const ProfitBreakdown& b) {
    out << "served requests     " << b.served_count << '\n'
        << "travel revenue      " << b.travel_revenue << " EUR\n"
        << "charging cost       " << b.charging_cost << " EUR (" << b.charged_kwh << " kWh)\n"
        << "discharging revenue " << b.discharging_revenue << " EUR (" << b.discharged_kwh << " kWh)\n"
        << "degradation cost    " << b.degradation_cost << " EUR\n"
        << "profit              " << b.profit << " EUR\n";
}

int cmd_generate(const SyntheticOptions& opt, const fs::path& out_dir, std::ostream& out) {
    const auto sc = generate_synthetic(opt);
    save_scenario(sc, out_dir);
    out << "wrote " << sc.requests.size() << " requests, " << sc.stations.size() << " stations to "
        << out_dir.string() << '\n';
    return kExitOk;
}

int cmd_solve(const fs::path& scenario_dir, const fs::path& out_dir, const SolverFlags& flags, std::ostream& out,
              std::ostream& err) {
    const auto sc = load_scenario(scenario_dir);
    const auto graph = build_graph(sc);
    const auto model = build_model(sc, graph, sc.degradation);
    out << "model: " << model.variables().size() << " variables (" << model.binary_count() << " binary), "
        << model.constraints().size() << " rows\n";
    const auto result = solve(model, flags.settings());
    out << "status: " << to_string(result.status) << " in " << result.wall_time << " s\n";
    if (!result.has_solution()) {
        err << "no plan: solver status " << to_string(result.status) << '\n';
        return kExitInfeasible;
    }
    const auto plan = extract_plan(model, result.values);
    const auto diags = validate_plan(plan, sc, graph, sc.degradation);
    fs::create_directories(out_dir);
    write_plan_csv(plan, out_dir / "plan.csv");
    const auto b = profit_breakdown(plan, graph, sc.fleet.n_vehicles, sc.degradation);
    write_breakdown_csv(b, out_dir / "breakdown.csv");
    out << "objective: " << plan.objective() << " EUR\n";
    print_breakdown(out, b);
    if (!diags.empty()) {
        for (const auto& d : diags) err << d.tag << ": " << d.message << '\n';
        return kExitInfeasible;
    }
    return kExitOk;
}

int cmd_sweep(const fs::path& scenario_dir, const std::string& prices, const fs::path& out_dir,
              const SolverFlags& flags, int jobs, std::ostream& out) {
    const auto sc = load_scenario(scenario_dir);
    const auto rows = pareto_sweep(sc, parse_list(prices), flags.settings(), jobs);
    fs::create_directories(out_dir);
    write_sweep_csv(rows, out_dir / "sweep.csv");
    bool failed = false;
    for (const auto& r : rows) {
        out << "p_batt " << r.p_batt_per_kwh << " EUR/kWh: " << r.status << ", discharged "
            << r.discharged_kwh_per_vehicle << " kWh/vehicle, objective excl. travel " << r.objective_excl_travel
            << " EUR\n";
        failed = failed || r.status.starts_with("error");
    }
    return failed ? kExitSolver : kExitOk;
}

int cmd_validate(const fs::path& plan_path, const fs::path& scenario_dir, bool oracle, std::ostream& out,
                 std::ostream& err) {
    const auto sc = load_scenario(scenario_dir);
    const auto graph = build_graph(sc);
    auto plan = read_plan_csv(plan_path, graph.n_requests());
    const auto diags = validate_plan(plan, sc, graph, sc.degradation);
    for (const auto& d : diags) err << d.tag << ": " << d.message << '\n';
    if (!diags.empty()) return kExitInfeasible;
    complete_plan(plan, graph, degradation::marginal_cost(sc.degradation));
    out << "plan valid; objective " << plan.objective() << " EUR\n";
    if (oracle) {
        const auto best = enumerate_optimum(sc, graph, sc.degradation);
        const double tol = 1e-6 * std::max(1.0, std::abs(best.objective));
        out << "oracle optimum " << best.objective << " EUR\n";
        if (plan.objective() > best.objective + tol) {
            err << "plan is not optimal: " << plan.objective() << " > " << best.objective << '\n';
            return kExitInfeasible;
        }
    }
    return kExitOk;
}

int cmd_report(const fs::path& plan_path, const fs::path& scenario_dir, const fs::path& out_dir, int bin,
               std::ostream& out) {
    const auto sc = load_scenario(scenario_dir);
    const auto graph = build_graph(sc);
    auto plan = read_plan_csv(plan_path, graph.n_requests());
    complete_plan(plan, graph, degradation::marginal_cost(sc.degradation));
    fs::create_directories(out_dir);
    const auto b = profit_breakdown(plan, graph, sc.fleet.n_vehicles, sc.degradation);
    write_breakdown_csv(b, out_dir / "breakdown.csv");
    write_grid_profile_csv(grid_profile(plan, graph, bin), out_dir / "grid_profile.csv");
    write_degradation_curve_csv(degradation_curve(sc.degradation), out_dir / "degradation_curve.csv");
    print_breakdown(out, b);
    out << "wrote breakdown.csv, grid_profile.csv, degradation_curve.csv to " << out_dir.string() << '\n';
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Fleet scheduling with vehicle-to-grid for electric ride services", "evmaas"};
    app.require_subcommand(1);

    SyntheticOptions gen;
    std::string gen_profile = "bimodal", gen_prices = "two-level";
    fs::path gen_out;
    auto* generate = app.add_subcommand("generate", "write a seeded synthetic scenario");
    generate->add_option("--seed", gen.seed)->capture_default_str();
    generate->add_option("--requests", gen.n_requests)->capture_default_str()->check(CLI::NonNegativeNumber);
    generate->add_option("--vehicles", gen.n_vehicles)->capture_default_str()->check(CLI::PositiveNumber);
    generate->add_option("--stations", gen.n_stations)->capture_default_str()->check(CLI::NonNegativeNumber);
    generate->add_option("--profile", gen_profile, "uniform or bimodal")->capture_default_str();
    generate->add_option("--prices", gen_prices, "flat or two-level")
        ->capture_default_str()
        ->check(CLI::IsMember({"flat", "two-level"}));
    generate->add_option("--out", gen_out)->required();

    SolverFlags solve_flags;
    fs::path solve_scenario, solve_out;
    auto* solve_cmd = app.add_subcommand("solve", "solve a scenario and write plan.csv and breakdown.csv");
    solve_cmd->add_option("--scenario", solve_scenario)->required()->check(CLI::ExistingDirectory);
    solve_cmd->add_option("--out", solve_out)->required();
    solve_flags.add_to(solve_cmd);

    SolverFlags sweep_flags;
    fs::path sweep_scenario, sweep_out;
    std::string sweep_prices = "0,25,50,100,150,200";
    int jobs = 1;
    auto* sweep = app.add_subcommand("sweep", "solve once per battery price (EUR/kWh) and write sweep.csv");
    sweep->add_option("--scenario", sweep_scenario)->required()->check(CLI::ExistingDirectory);
    sweep->add_option("--pbatt", sweep_prices, "comma-separated EUR/kWh")->capture_default_str();
    sweep->add_option("--out", sweep_out)->required();
    sweep->add_option("--jobs", jobs, "price points solved in parallel")->capture_default_str()->check(
        CLI::PositiveNumber);
    sweep_flags.add_to(sweep);

    fs::path val_plan, val_scenario;
    bool use_oracle = false;
    auto* validate = app.add_subcommand("validate", "check a plan against every constraint family");
    validate->add_option("--plan", val_plan)->required()->check(CLI::ExistingFile);
    validate->add_option("--scenario", val_scenario)->required()->check(CLI::ExistingDirectory);
    validate->add_flag("--oracle", use_oracle, "also compare with the brute-force optimum (tiny scenarios)");

    fs::path rep_plan, rep_scenario, rep_out;
    int bin = 15;
    auto* report = app.add_subcommand("report", "write breakdown, grid profile and degradation curve");
    report->add_option("--plan", rep_plan)->required()->check(CLI::ExistingFile);
    report->add_option("--scenario", rep_scenario)->required()->check(CLI::ExistingDirectory);
    report->add_option("--out", rep_out)->required();
    report->add_option("--bin", bin, "bin width in minutes")->capture_default_str()->check(CLI::PositiveNumber);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n';
        return kExitUsage;
    }

    try {
        if (generate->parsed()) {
            gen.profile = parse_profile(gen_profile);
            gen.price_pattern = gen_prices == "flat" ? PricePattern::Flat : PricePattern::TwoLevel;
            gen.fleet.n_vehicles = gen.n_vehicles;
            return cmd_generate(gen, gen_out, out);
        }
        if (solve_cmd->parsed()) return cmd_solve(solve_scenario, solve_out, solve_flags, out, err);
        if (sweep->parsed()) return cmd_sweep(sweep_scenario, sweep_prices, sweep_out, sweep_flags, jobs, out);
        if (validate->parsed()) return cmd_validate(val_plan, val_scenario, use_oracle, out, err);
        if (report->parsed()) return cmd_report(rep_plan, rep_scenario, rep_out, bin, out);
    } catch (const SolverError& e) {
        err << "solver failure: " << e.what() << '\n';
        if (!e.raw_output().empty()) err << e.raw_output() << '\n';
        return kExitSolver;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}

int run_cli(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run_cli(args, std::cout, std::cerr);
}

}  // namespace evmaas
