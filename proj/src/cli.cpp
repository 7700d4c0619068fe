#include "whitham/cli.hpp"

#include "whitham/config.hpp"
#include "whitham/errors.hpp"
#include "whitham/experiments.hpp"
#include "whitham/io.hpp"
#include "whitham/multipliers.hpp"
#include "whitham/plot.hpp"
#include "whitham/timestepper.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

namespace whitham {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::string snapshot_name(std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "state_%06zu.wbsnap", index);
    return buf;
}

void print_warnings(const RunConfig& c, std::ostream& err) {
    for (const auto& w : validate(c).warnings) err << "warning: " << w << "\n";
}

int cmd_run(const std::string& path, const std::string& out_dir, std::ostream& out, std::ostream& err) {
    const RunConfig c = load_config(path);
    print_warnings(c, err);
    const fs::path dir = out_dir.empty() ? fs::path(c.output.dir) : fs::path(out_dir);
    fs::create_directories(dir);
    for (const char* stale : {".failed", "diagnostics.csv.failed"}) fs::remove(dir / stale);

    const Model model(build_grid(c), model_params(c));
    const State initial = initial_state(c, model);
    const StepperConfig sc = stepper_config(c);
    RunControl ctl = run_control(c);
    ctl.store_rates = false;

    save_config(c, (dir / "config.json").string());
    write_snapshot((dir / "initial.wbsnap").string(), initial, c.mu, c.epsilon);
    const Trajectory traj = run(model, initial, sc, ctl);

    json summary;
    summary["outcome"] = to_string(traj.outcome);
    summary["steps"] = traj.steps;
    summary["dt"] = traj.dt;
    summary["t_start"] = traj.start_time();
    summary["t_end"] = traj.end_time();
    summary["blowup_time"] = finite_or_null(traj.blowup_time);
    summary["initial_x_norm_s"] = traj.reports.front().x_norm_s;
    summary["last_finite_x_norm_s"] = traj.last_finite_norm;
    summary["cavitation_flag"] = traj.cavitation_flag;

    if (traj.outcome != RunOutcome::completed) {
        fs::remove(dir / "diagnostics.csv");
        fs::remove(dir / "final.wbsnap");
        write_file_atomic((dir / "diagnostics.csv.failed").string(), diagnostics_csv(traj.reports));
        write_file_atomic((dir / "summary.json").string(), summary.dump(2) + "\n");
        const std::string reason =
            std::string(to_string(traj.outcome)) + " at t = " + format_double(traj.blowup_time);
        write_failed_marker(dir.string(), reason);
        err << "blow-up detected at t = " << format_double(traj.blowup_time) << " (" << to_string(traj.outcome)
            << ")\n";
        return exit_blowup;
    }

    if (c.output.snapshot_cadence > 0)
        for (std::size_t k = 0; k < traj.states.size(); ++k)
            write_snapshot((dir / snapshot_name(k)).string(), traj.states[k], c.mu, c.epsilon);
    write_snapshot((dir / "final.wbsnap").string(), traj.final_state(), c.mu, c.epsilon);
    write_file_atomic((dir / "summary.json").string(), summary.dump(2) + "\n");
    write_diagnostics_csv((dir / "diagnostics.csv").string(), traj.reports);
    out << "completed t = " << format_double(traj.end_time()) << " in " << traj.steps << " steps (dt "
        << format_double(traj.dt) << "), x_norm_s ratio "
        << format_double(traj.reports.back().x_norm_s / traj.reports.front().x_norm_s) << "\n";
    out << "wrote " << dir.string() << "\n";
    return exit_ok;
}

int cmd_validate(const std::string& path, std::ostream& out, std::ostream& err) {
    std::string text;
    try {
        text = read_file(path);
    } catch (const std::exception& e) {
        throw ConfigValidationError(std::vector<Violation>{{"path", e.what()}});
    }
    const RunConfig c = parse_config(text);
    const ValidationReport rep = validate(c);
    if (rep.admissibility) {
        const auto& a = *rep.admissibility;
        out << "admissibility: " << (a.pass() ? "pass" : "fail") << " (sup G1 " << format_double(a.sup_g[0])
            << ", sup G2 " << format_double(a.sup_g[1]) << ", min G1 " << format_double(a.min_g1) << ")\n";
    }
    if (rep.non_cavitation)
        out << "non-cavitation: " << (rep.non_cavitation->ok ? "pass" : "fail") << " (min depth "
            << format_double(rep.non_cavitation->min_depth) << ", h_min " << format_double(c.h_min) << ")\n";
    for (const auto& w : rep.warnings) err << "warning: " << w << "\n";
    if (!rep.ok()) {
        for (const auto& v : rep.violations) err << "violation: " << v.field << ": " << v.reason << "\n";
        return exit_validation;
    }
    out << "valid\n";
    return exit_ok;
}

int cmd_sweep(const std::string& path, const std::string& out_dir, std::ostream& out) {
    const StudySpec spec = load_study(path);
    const StudyOutput result = run_study(spec);
    const std::string dir = out_dir.empty() ? spec.base.output.dir : out_dir;
    write_study_output(dir, result);
    out << result.kind << ": " << result.table.rows.size() << " rows\n";
    for (const auto& [k, v] : result.summary) out << "  " << k << " = " << format_double(v) << "\n";
    for (const auto& n : result.notes) out << "  note: " << n << "\n";
    out << "wrote " << dir << "\n";
    return exit_ok;
}

int cmd_compare(const std::string& a, const std::string& b, const std::string& out_dir, std::ostream& out) {
    const RunConfig ca = load_config(a), cb = load_config(b);
    const CompareReport rep = model_compare(ca, cb);
    CsvTable table;
    table.columns = {"time", "error", "residual", "bound"};
    for (std::size_t k = 0; k < rep.times.size(); ++k)
        table.rows.push_back({rep.times[k], rep.error[k], rep.residual[k],
                              rep.c_hat * (rep.e0 + (rep.times[k] - rep.times.front()) * rep.sup_residual)});
    const fs::path dir = out_dir.empty() ? fs::path(ca.output.dir) : fs::path(out_dir);
    write_file_atomic((dir / "compare.csv").string(), table.to_string());
    out << "e0 = " << format_double(rep.e0) << "\n"
        << "sup residual = " << format_double(rep.sup_residual) << "\n"
        << "c_hat = " << format_double(rep.c_hat) << "\n"
        << "bound holds: " << (rep.bound_holds ? "yes" : "no") << "\n"
        << "wrote " << (dir / "compare.csv").string() << "\n";
    return exit_ok;
}

int cmd_selftest(std::ostream& out) {
    bool all = true;
    for (const auto& r : run_selftest()) {
        out << (r.passed ? "PASS " : "FAIL ") << r.name << " (" << r.detail << ")\n";
        all = all && r.passed;
    }
    return all ? exit_ok : exit_internal;
}

int cmd_plot(const std::string& csv, const PlotOptions& options, const std::string& out_path, std::ostream& out,
             std::ostream& err) {
    try {
        emit_plot(csv, options, out_path);
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return exit_validation;
    }
    out << "wrote " << out_path << "\n";
    return exit_ok;
}

}  // namespace

int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Whitham-Boussinesq laboratory: runs, sweeps and checks of the multiplier systems"};
    app.require_subcommand(1);

    std::string config_path, study_path, config_b, out_dir, csv_path, plot_out;
    PlotOptions plot;

    auto* run = app.add_subcommand("run", "integrate one configuration");
    run->add_option("config", config_path, "run config (JSON)")->required();
    run->add_option("--out", out_dir, "output directory (overrides output.dir)");

    auto* sweep = app.add_subcommand("sweep", "run a study");
    sweep->add_option("study", study_path, "study config (JSON)")->required();
    sweep->add_option("--out", out_dir, "output directory (overrides base.output.dir)");

    auto* val = app.add_subcommand("validate", "check admissibility and non-cavitation without running");
    val->add_option("config", config_path, "run config (JSON)")->required();

    auto* cmp = app.add_subcommand("compare", "compare two models on one grid");
    cmp->add_option("config_a", config_path, "model A config")->required();
    cmp->add_option("config_b", config_b, "model B config")->required();
    cmp->add_option("--out", out_dir, "output directory (overrides A's output.dir)");

    auto* self = app.add_subcommand("selftest", "run the invariant suite");

    auto* plt = app.add_subcommand("plot", "render CSV columns as SVG");
    plt->add_option("csv", csv_path, "input CSV")->required();
    plt->add_option("--cols", plot.columns, "columns to plot")->required()->delimiter(',');
    plt->add_option("--out", plot_out, "output SVG")->required();
    plt->add_option("--x", plot.x_column, "x column")->capture_default_str();
    plt->add_flag("--log", plot.log_y, "logarithmic y axis");
    plt->add_option("--title", plot.title, "plot title");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? exit_ok : exit_usage;
    }

    try {
        if (*run) return cmd_run(config_path, out_dir, out, err);
        if (*sweep) return cmd_sweep(study_path, out_dir, out);
        if (*val) return cmd_validate(config_path, out, err);
        if (*cmp) return cmd_compare(config_path, config_b, out_dir, out);
        if (*self) return cmd_selftest(out);
        if (*plt) return cmd_plot(csv_path, plot, plot_out, out, err);
    } catch (const ConfigParseError& e) {
        err << "error: " << e.what() << "\n";
        return exit_validation;
    } catch (const ConfigValidationError& e) {
        for (const auto& v : e.violations) err << "violation: " << v.field << ": " << v.reason << "\n";
        return exit_validation;
    } catch (const CavitationError& e) {
        err << "error: " << e.what() << "\n";
        return exit_validation;
    } catch (const SnapshotError& e) {
        err << "error: " << e.what() << "\n";
        return exit_validation;
    } catch (const StudyError& e) {
        err << "blow-up: " << e.what() << "\n";
        return exit_blowup;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return exit_internal;
    }
    return exit_usage;
}

int cli_dispatch(int argc, const char* const* argv) { return cli_dispatch(argc, argv, std::cout, std::cerr); }

}  // namespace whitham
