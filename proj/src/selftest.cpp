#include "whitham/cli.hpp"
#include "whitham/config.hpp"
#include "whitham/experiments.hpp"
#include "whitham/io.hpp"
#include "whitham/multipliers.hpp"
#include "whitham/timestepper.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>

#include <unistd.h>

namespace whitham {

namespace {

double state_inner(const State& a, const State& b) {
    double s = inner_product(a.zeta, b.zeta);
    for (std::size_t i = 0; i < a.v.size(); ++i) s += inner_product(a.v[i], b.v[i]);
    return s;
}

double state_sup(const State& a) {
    double m = max_abs(a.zeta);
    for (const auto& c : a.v) m = std::max(m, max_abs(c));
    return m;
}

State state_derivative(const State& u, int j) {
    VectorField v;
    for (const auto& c : u.v) v.push_back(spectral_derivative(c, j));
    return State(spectral_derivative(u.zeta, j), std::move(v), u.time);
}

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

Model make_model(const std::string& name, int dim, std::size_t n, double eps, double mu = 1.0) {
    ModelParams p;
    p.pair = preset(name).pair;
    p.epsilon = eps;
    p.mu = mu;
    return Model(make_grid(dim, n, 2.0 * std::numbers::pi), p);
}

SelftestResult check_consistency() {
    double worst = 0.0;
    for (const char* name : {"shallow_water", "ddk"})
        for (int dim : {1, 2}) {
            const Model m = make_model(name, dim, dim == 1 ? 32 : 16, 0.3);
            State u = random_state(m.grid_ptr(), 7, 2.5);
            u.zeta *= 0.5 / max_abs(u.zeta);
            State assembled(m.grid_ptr());
            for (int j = 0; j < dim; ++j) assembled -= m.apply_A(u, j, state_derivative(u, j));
            const State r = m.rhs(u);
            worst = std::max(worst, state_sup(r - assembled) / state_sup(r));
        }
    return {"rhs equals -sum A_j(U) d_j U", worst < 1e-10, "relative " + num(worst)};
}

SelftestResult check_symmetry() {
    const Model m = make_model("ddk", 1, 16, 0.4);
    double worst = 0.0, worst_b = 0.0;
    for (std::uint64_t t = 0; t < 5; ++t) {
        const State f = random_frozen_state(m, 100 + t, 2.5);
        const State u = random_state(m.grid_ptr(), 200 + t, 2.0);
        const State w = random_state(m.grid_ptr(), 300 + t, 2.0);
        const double lhs = state_inner(m.apply_A_tilde(f, 0, u), w);
        const double rhs = state_inner(u, m.apply_A_tilde(f, 0, w));
        worst = std::max(worst, std::abs(lhs - rhs) / std::max(std::abs(lhs), 1e-300));
        const State b = m.apply_B(f, 0, u);
        const State sa = m.apply_S0(f, m.apply_A(f, 0, u));
        worst_b = std::max(worst_b, state_sup(b - sa) / state_sup(b));
    }
    return {"A~ self-adjoint and B = S0 A", worst < 1e-12 && worst_b < 1e-10,
            "adjoint " + num(worst) + ", product " + num(worst_b)};
}

SelftestResult check_coercivity() {
    const Model m = make_model("ddk", 1, 32, 0.5);
    const auto r = coercivity_check(m, 50, 11);
    return {"coercivity of the symmetrizer", r.worst_margin >= -1e-10, "worst margin " + num(r.worst_margin)};
}

SelftestResult check_dispersion() {
    const Model m = make_model("ddk", 1, 32, 0.0);
    const double omega = m.g1()[1] * 1.0;
    State u(m.grid_ptr());
    u.zeta = ScalarField::sample(m.grid_ptr(), [](const Vec2& x) { return std::cos(x[0]); });
    StepperConfig sc;
    sc.t_end = 2.0 * std::numbers::pi / omega;
    sc.dt_override = sc.t_end / 400.0;
    RunControl ctl;
    ctl.state_cadence = 0;
    const auto traj = run(m, u, sc, ctl);
    const double err = state_sup(traj.final_state() - u);
    return {"plane wave returns after 2 pi / (|xi| G1)", err < 1e-8, "error " + num(err)};
}

SelftestResult check_linear_invariants() {
    const Model m = make_model("ddk", 1, 64, 0.0);
    const State u = random_state(m.grid_ptr(), 5, 2.0, 4);
    StepperConfig sc;
    sc.t_end = 2.0;
    sc.dt_override = 0.005;
    RunControl ctl;
    ctl.state_cadence = 0;
    const auto traj = run(m, u, sc, ctl);
    const double q0 = m.quadratic_form(u, u);
    const double drift = std::abs(m.quadratic_form(u, traj.final_state()) - q0) / q0;
    const double exact = state_sup(traj.final_state() - linear_exact(m, u, sc.t_end));
    return {"linear quadratic form conserved, exact solution matched", drift < 1e-8 && exact < 1e-8,
            "drift " + num(drift) + ", error " + num(exact)};
}

SelftestResult check_rk4_order() {
    const Model m = make_model("ddk", 1, 32, 0.0);
    const State u = random_state(m.grid_ptr(), 9, 2.0, 6);
    const State exact = linear_exact(m, u, 1.0);
    std::vector<double> err;
    for (double dt : {0.1, 0.05}) {
        StepperConfig sc;
        sc.t_end = 1.0;
        sc.dt_override = dt;
        RunControl ctl;
        ctl.state_cadence = 0;
        err.push_back(m.x_norm(run(m, u, sc, ctl).final_state() - exact, 0.0));
    }
    const double ratio = err[0] / err[1];
    return {"RK4 fourth order", std::abs(ratio - 16.0) <= 3.2, "ratio " + num(ratio)};
}

SelftestResult check_mass() {
    const Model m = make_model("shallow_water", 2, 16, 0.2);
    State u = random_state(m.grid_ptr(), 3, 3.0);
    u.zeta *= 1.0 / max_abs(u.zeta);
    StepperConfig sc;
    sc.t_end = 0.5;
    RunControl ctl;
    ctl.state_cadence = 0;
    const auto traj = run(m, u, sc, ctl);
    auto mean = [](const ScalarField& f) {
        double s = 0.0;
        for (double x : f.values()) s += x;
        return s / static_cast<double>(f.size());
    };
    const double drift = std::abs(mean(traj.final_state().zeta) - mean(u.zeta));
    return {"mass conserved by the nonlinear flow", drift < 1e-12, "drift " + num(drift)};
}

SelftestResult check_picard_linear() {
    const Model m = make_model("ddk", 1, 16, 0.0);
    const State u = random_state(m.grid_ptr(), 4, 2.0);
    StepperConfig sc;
    sc.t_end = 0.2;
    sc.dt_override = 0.02;
    const auto r = picard_solve(m, u, sc);
    return {"Picard converges in one iteration when eps = 0", r.iterations == 1,
            "iterations " + std::to_string(r.iterations)};
}

SelftestResult check_plumbing() {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / ("whitham_selftest_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    bool ok = true;
    std::string detail;

    RunConfig c = RunConfig::defaults(2);
    c.model.preset = "ddk";
    c.N = 16;
    c.initial.kind = InitialKind::random;
    c.seed = 42;
    if (!(parse_config(to_json(c)) == c)) {
        ok = false;
        detail += "config round trip differs; ";
    }

    const Model m(build_grid(c), model_params(c));
    const State u = initial_state(c, m);
    const std::string path = (dir / "u.wbsnap").string();
    write_snapshot(path, u, c.mu, c.epsilon);
    const Snapshot back = read_snapshot(path);
    for (std::size_t i = 0; i < u.zeta.size(); ++i) {
        bool same = back.state.zeta[i] == u.zeta[i];
        for (int j = 0; j < 2; ++j) same = same && back.state.v[j][i] == u.v[j][i];
        if (!same) {
            ok = false;
            detail += "snapshot round trip differs; ";
            break;
        }
    }
    if (fs::file_size(path) != snapshot_size(2, 16)) {
        ok = false;
        detail += "snapshot size; ";
    }
    if (diagnostics_csv({}) != std::string(csv_header) + "\n") {
        ok = false;
        detail += "csv header; ";
    }
    fs::remove_all(dir);
    return {"config, snapshot and csv round trips", ok, ok ? "exact" : detail};
}

}  // namespace

std::vector<SelftestResult> run_selftest() {
    const std::vector<std::function<SelftestResult()>> checks = {
        check_consistency, check_symmetry, check_coercivity,    check_dispersion, check_linear_invariants,
        check_rk4_order,   check_mass,     check_picard_linear, check_plumbing};
    std::vector<SelftestResult> results;
    for (const auto& check : checks) {
        try {
            results.push_back(check());
        } catch (const std::exception& e) {
            results.push_back({"(check threw)", false, e.what()});
        }
    }
    return results;
}

}  // namespace whitham
