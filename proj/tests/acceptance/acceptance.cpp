// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
// Every criterion also has a wall-clock budget that is part of its verdict.

#include "oracle/dense_operators.hpp"
#include "test_support.hpp"

#include "whitham/cli.hpp"
#include "whitham/config.hpp"
#include "whitham/diagnostics.hpp"
#include "whitham/experiments.hpp"
#include "whitham/io.hpp"
#include "whitham/multipliers.hpp"
#include "whitham/timestepper.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

using namespace whitham;
using namespace test_support;

namespace {

constexpr double pi = std::numbers::pi;

struct Verdict {
    bool pass;
    std::string detail;
};

struct Criterion {
    int id;
    std::string name;
    double budget_seconds;
    std::function<Verdict()> check;
};

std::string fmt(const char* pattern, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, pattern, a);
    return buf;
}

ModelParams params(const std::string& name, double eps, double mu = 1.0) {
    ModelParams p;
    p.pair = preset(name).pair;
    p.epsilon = eps;
    p.mu = mu;
    return p;
}

StepperConfig fixed(double t_end, double dt) {
    StepperConfig c;
    c.t_end = t_end;
    c.dt_override = dt;
    return c;
}

// periodic analytic bump amp exp(2 (cos(x - pi) - 1))
State smooth_bump(const GridPtr& g, double amp) {
    State u(g);
    u.zeta = ScalarField::sample(g, [&](const Vec2& x) { return amp * std::exp(2.0 * (std::cos(x[0] - pi) - 1.0)); });
    return u;
}

// shared data of the model-comparison criteria: smooth right-moving bump
RunConfig compare_base() {
    RunConfig c = RunConfig::defaults(1);
    c.model.preset = "ddk";
    c.N = 128;
    c.epsilon = 0.1;
    c.t_end_over_eps = 0.5;
    c.initial.amplitude = 0.5;
    c.initial.width = 1.5;
    c.initial.velocity = VelocityProfile::right_moving;
    return c;
}

// ------------------------------------------------------------ criteria

Verdict operator_oracle() {
    const std::size_t n = 16;
    const double eps = 0.45;
    const auto g = make_grid(1, n, 2 * pi);
    const Model m(g, params("ddk", eps));
    auto g1 = [](double r) { return r == 0 ? 1.0 : std::sqrt(std::tanh(r) / r); };
    auto g2 = [](double r) { return r == 0 ? 1.0 : std::tanh(r) / r; };
    double worst = 0.0, adjoint = 0.0;
    for (std::uint64_t trial = 0; trial < 20; ++trial) {
        const State frozen = random_state(g, 200 + trial, 1.5);
        const State u = random_state(g, 300 + trial, 1.5);
        const State w = random_state(g, 400 + trial, 1.5);
        const oracle::DenseModel dm(oracle::Grid1{n, 2 * pi}, g1, g2, eps, samples(frozen.zeta),
                                    samples(frozen.v[0]));
        const auto x = samples(u);
        for (double e : {relative_error(samples(m.apply_A(frozen, 0, u)), dm.A * x),
                         relative_error(samples(m.apply_S0(frozen, u)), dm.S0 * x),
                         relative_error(samples(m.apply_B(frozen, 0, u)), dm.B * x),
                         relative_error(samples(m.apply_A_tilde(frozen, 0, u)), dm.A_tilde * x),
                         relative_error(samples(m.apply_F(frozen, 0, u)), dm.F * x)})
            worst = std::max(worst, e);
        const double a = state_inner(m.apply_A_tilde(frozen, 0, u), w);
        const double b = state_inner(u, m.apply_A_tilde(frozen, 0, w));
        adjoint = std::max(adjoint, std::abs(a - b) / std::abs(a));
    }
    return {worst < 1e-10 && adjoint < 1e-12,
            "max relative deviation " + fmt("%.2e", worst) + ", self-adjointness residual " + fmt("%.2e", adjoint)};
}

Verdict coercivity() {
    const auto g = make_grid(1, 64, 2 * pi);
    const Model m(g, params("ddk", 0.5));
    const auto r = coercivity_check(m, 100, 2024);
    return {r.trials == 100 && r.worst_margin >= -1e-10,
            std::to_string(r.trials) + " trials, worst margin " + fmt("%.4e", r.worst_margin)};
}

Verdict energy_identity() {
    std::string detail;
    bool ok = true;
    for (const char* name : {"shallow_water", "ddk"}) {
        const auto g = make_grid(1, 64, 2 * pi);
        const Model m(g, params(name, 0.2));
        State u0(g);
        u0.zeta = ScalarField::sample(g, [](const Vec2& x) { return 0.8 * std::exp(-(x[0] - pi) * (x[0] - pi) / 0.64); });
        u0.v[0] = ScalarField::sample(g, [](const Vec2& x) { return 0.3 * std::sin(x[0]); });
        std::vector<double> res;
        for (double dt : {0.04, 0.02}) {
            RunControl ctl;
            ctl.store_rates = false;
            const auto traj = run(m, u0, fixed(1.0, dt), ctl);
            res.push_back(energy_identity_residual(m, traj, traj).max_residual());
        }
        const double ratio = res[0] / res[1];
        ok = ok && ratio > 3.6 && ratio < 4.4;
        detail += std::string(name) + " ratio " + fmt("%.3f", ratio) + "; ";
    }
    return {ok, detail + "required 4 +/- 10%"};
}

Verdict skew_bound() {
    std::vector<double> ratios;
    for (std::size_t n : {32, 64, 128}) {
        const Model m(make_grid(1, n, 2 * pi), params("ddk", 0.3));
        EstimateSuiteOptions o;
        o.s = 0.0;
        o.n_trials = 50;
        ratios.push_back(max_ratio(estimate_ratio_suite(m, o), EstimateId::skew_bound));
    }
    const double g1 = ratios[1] / ratios[0] - 1, g2 = ratios[2] / ratios[1] - 1;
    return {g1 < 0.1 && g2 < 0.1, "max ratio " + fmt("%.5f", ratios[0]) + " / " + fmt("%.5f", ratios[1]) + " / " +
                                      fmt("%.5f", ratios[2]) + " at N = 32/64/128, growth " + fmt("%+.2f%%", 100 * g1) +
                                      ", " + fmt("%+.2f%%", 100 * g2)};
}

Verdict linear_physics() {
    const auto g = make_grid(1, 32, 2 * pi);
    const Model m(g, params("ddk", 0.0));
    State u0(g);
    u0.zeta = ScalarField::sample(g, [](const Vec2& x) { return std::cos(x[0]); });
    const auto traj = run(m, u0, fixed(10.0, 0.001));
    std::vector<double> crossings;
    for (std::size_t k = 1; k < traj.states.size(); ++k) {
        const double a = traj.states[k - 1].zeta[0], b = traj.states[k].zeta[0];
        if ((a < 0) != (b < 0)) crossings.push_back(traj.times[k - 1] + (traj.times[k] - traj.times[k - 1]) * a / (a - b));
    }
    if (crossings.size() < 3) return {false, "fewer than three zero crossings"};
    const double period = 2.0 * (crossings[2] - crossings[1]);
    const double omega_ref = 0.872694;
    const double rel = std::abs(period * omega_ref / (2 * pi) - 1.0);

    const Model q(make_grid(1, 64, 2 * pi), params("ddk", 0.0));
    const auto cons = run(q, random_state(q.grid_ptr(), 4, 2.0, 4), fixed(10.0, 0.005));
    const double q0 = cons.reports.front().quad_form;
    double drift = 0.0;
    for (const auto& r : cons.reports) drift = std::max(drift, std::abs(r.quad_form - q0) / q0);
    return {rel < 1e-3 && drift < 1e-8, "period " + fmt("%.6f", period) + " vs 2 pi / 0.872694 (rel " +
                                            fmt("%.1e", rel) + "), quadratic form drift " + fmt("%.1e", drift)};
}

Verdict scheme_orders() {
    const Model m(make_grid(1, 32, 2 * pi), params("ddk", 0.0));
    const State u0 = random_state(m.grid_ptr(), 9, 2.0, 6);
    const State exact = linear_exact(m, u0, 2.0);
    auto err = [&](double dt) { return m.x_norm(run(m, u0, fixed(2.0, dt)).final_state() - exact, 0.0); };
    const double ratio = err(0.04) / err(0.02);

    const double dt = 0.02, t = 1.0;
    const auto g64 = make_grid(1, 64, 2 * pi), g128 = make_grid(1, 128, 2 * pi);
    const Model m64(g64, params("ddk", 0.2)), m128(g128, params("ddk", 0.2));
    const State a = run(m64, smooth_bump(g64, 0.5), fixed(t, dt)).final_state();
    const State b = run(m128, smooth_bump(g128, 0.5), fixed(t, dt)).final_state();
    State br = b;
    br.zeta = resample(b.zeta, g64);
    br.v[0] = resample(b.v[0], g64);
    const double spatial = m64.x_norm(a - br, 0.0);
    const double temporal = m64.x_norm(a - run(m64, smooth_bump(g64, 0.5), fixed(t, dt / 2)).final_state(), 0.0);
    return {std::abs(ratio - 16.0) <= 3.2 && spatial < temporal,
            "RK4 ratio " + fmt("%.3f", ratio) + ", spatial error " + fmt("%.2e", spatial) + " vs temporal floor " +
                fmt("%.2e", temporal)};
}

Verdict picard_oracle() {
    const auto g = make_grid(1, 32, 2 * pi);
    const Model m(g, params("shallow_water", 0.2));
    const State u0 = smooth_bump(g, 0.5);
    const auto cfg = fixed(1.0, 0.0125);
    const auto p = picard_solve(m, u0, cfg);
    const double diff = m.x_norm(p.trajectory.final_state() - run(m, u0, cfg).final_state(), 0.0);
    bool monotone = true;
    for (std::size_t n = 3; n < p.cauchy_differences.size(); ++n)
        monotone = monotone && p.cauchy_differences[n] < p.cauchy_differences[n - 1];
    const Model lin(g, params("shallow_water", 0.0));
    const int linear_iterations = picard_solve(lin, u0, cfg).iterations;
    return {diff < 1e-6 && monotone && linear_iterations == 1,
            "X0 distance to RK4 " + fmt("%.2e", diff) + " after " + std::to_string(p.iterations) +
                " iterations, Cauchy differences " + (monotone ? "monotone" : "not monotone") +
                ", eps = 0 iterations " + std::to_string(linear_iterations)};
}

Verdict energy_growth() {
    StudySpec s;
    s.kind = StudyKind::energy_growth;
    s.base = RunConfig::defaults(1);
    s.base.model.preset = "shallow_water";
    s.base.N = 256;
    s.base.t_end_over_eps = 5.0;
    s.base.initial.amplitude = 0.5;
    s.base.initial.width = 0.8;
    s.base.initial.velocity = VelocityProfile::right_moving;
    s.epsilons = {0.05, 0.1, 0.2};
    const auto rep = energy_growth_study(s);
    std::string detail;
    for (const auto& g : rep.runs)
        detail += "eps " + fmt("%g", g.epsilon) + ": lambda " + fmt("%.4f", g.lambda_hat) + ", eps*t_e " +
                  fmt("%.3f", g.epsilon * g.efold_time) + "; ";
    return {rep.max_rate_excess <= 1.5 && rep.efold_spread <= 2.0,
            detail + "slope " + fmt("%.3f", rep.slope) + ", rate excess " + fmt("%.3f", rep.max_rate_excess) +
                " (<= 1.5), e-fold spread " + fmt("%.3f", rep.efold_spread) + " (<= 2)"};
}

Verdict timescale() {
    StudySpec s;
    s.kind = StudyKind::timescale;
    s.base = RunConfig::defaults(1);
    s.base.model.preset = "ddk";
    s.base.N = 128;
    s.base.initial.width = 1.0;
    s.base.initial.velocity = VelocityProfile::right_moving;
    s.base.initial.target_norm = 1.0;
    s.epsilons = {0.1, 0.2, 0.4};
    s.mus = {0.01, 0.1, 1.0};
    s.t_target = 0.5;
    bool ok = true;
    double worst = 0.0;
    int completed = 0;
    const auto rows = timescale_study(s);
    for (const auto& r : rows) {
        ok = ok && r.completed && r.max_ratio <= 2.0;
        completed += r.completed;
        worst = std::max(worst, r.max_ratio);
    }
    return {ok && rows.size() == 9, std::to_string(completed) + "/9 runs reached t = 0.5/eps, worst norm ratio " +
                                        fmt("%.4f", worst) + " (<= 2)"};
}

Verdict stability() {
    StudySpec s;
    s.kind = StudyKind::stability;
    s.base = compare_base();
    s.mus = {0.01, 0.1, 1.0};
    const auto rep = stability_study(s);
    bool holds = true;
    std::string detail;
    for (std::size_t i = 0; i < rep.mus.size(); ++i) {
        holds = holds && rep.compares[i].bound_holds;
        detail += "mu " + fmt("%g", rep.mus[i]) + ": C " + fmt("%.4f", rep.compares[i].c_hat) + "; ";
    }
    return {holds && rep.c_hat_spread < 2.0,
            detail + "spread " + fmt("%.3f", rep.c_hat_spread) + " (< 2), bound " + (holds ? "holds" : "violated")};
}

Verdict mu_order() {
    StudySpec s;
    s.kind = StudyKind::mu_scaling;
    s.base = compare_base();
    s.mus = {0.01, 0.04, 0.16};
    const auto rep = mu_scaling_study(s);
    std::string detail;
    bool resolved = true;
    for (std::size_t i = 0; i < rep.mus.size(); ++i) {
        detail += "mu " + fmt("%g", rep.mus[i]) + ": " + fmt("%.3e", rep.errors[i]) + "; ";
        resolved = resolved && !rep.under_resolved[i];
    }
    return {std::abs(rep.slope - 1.0) <= 0.3 && resolved,
            detail + "slope " + fmt("%.3f", rep.slope) + " (1 +/- 0.3)" + (resolved ? "" : ", under-resolved")};
}

Verdict estimate_ladders() {
    bool a3 = true;
    std::map<EstimateId, std::vector<double>> ladder;
    for (std::size_t n : {32, 64, 128}) {
        const Model m(make_grid(1, n, 2 * pi), params("ddk", 0.3, 0.5));
        EstimateSuiteOptions o;
        o.t0 = default_t0(1);
        const auto samples = estimate_ratio_suite(m, o);
        // multiplier samples alternate G1, G2
        std::size_t k = 0;
        for (const auto& x : samples) {
            if (x.id != EstimateId::multiplier_bound) continue;
            const double sup = (k++ % 2 == 0 ? m.g1() : m.g2()).sup_abs();
            a3 = a3 && x.ratio <= sup * (1.0 + 1e-14);
        }
        for (auto id : {EstimateId::product, EstimateId::commutator_lambda_s, EstimateId::commutator_order0})
            ladder[id].push_back(max_ratio(samples, id));
    }
    bool stable = true;
    std::string detail = std::string("multiplier bound ") + (a3 ? "within sup|G|" : "exceeds sup|G|") + "; ";
    for (const auto& [id, r] : ladder) {
        const double growth = std::max(r[1] / r[0], r[2] / r[1]) - 1.0;
        stable = stable && growth < 0.1;
        detail += to_string(id) + " growth " + fmt("%+.2f%%", 100 * growth) + "; ";
    }
    return {a3 && stable, detail};
}

Verdict plumbing() {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / ("whitham_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    std::string detail;

    RunConfig c = RunConfig::defaults(1);
    c.model.preset = "ddk";
    c.N = 64;
    c.mu = 0.5;
    c.t_end_over_eps = 0.5;
    c.initial.kind = InitialKind::random;
    c.initial.amplitude = 0.4;
    c.seed = 77;
    c.output.snapshot_cadence = 10;
    const bool config_ok = parse_config(to_json(c)) == c;
    detail += std::string("config round trip ") + (config_ok ? "identical" : "differs");

    const Model m(build_grid(c), model_params(c));
    const State u = initial_state(c, m);
    write_snapshot((dir / "u.wbsnap").string(), u, c.mu, c.epsilon);
    const Snapshot back = read_snapshot((dir / "u.wbsnap").string());
    const bool snap_ok =
        std::memcmp(back.state.zeta.values().data(), u.zeta.values().data(), u.zeta.size() * sizeof(double)) == 0 &&
        std::memcmp(back.state.v[0].values().data(), u.v[0].values().data(), u.zeta.size() * sizeof(double)) == 0;
    detail += std::string(", snapshot ") + (snap_ok ? "bit-exact" : "differs");

    save_config(c, (dir / "c.json").string());
    std::ostringstream sink;
    auto lab = [&](std::vector<std::string> args) {
        args.insert(args.begin(), "whitham_lab");
        std::vector<const char*> argv;
        for (const auto& a : args) argv.push_back(a.c_str());
        return cli_dispatch(static_cast<int>(argv.size()), argv.data(), sink, sink);
    };
    bool rerun_ok = lab({"run", (dir / "c.json").string(), "--out", (dir / "a").string()}) == 0 &&
                    lab({"run", (dir / "c.json").string(), "--out", (dir / "b").string()}) == 0;
    std::size_t files = 0;
    if (rerun_ok)
        for (const auto& e : fs::directory_iterator(dir / "a")) {
            rerun_ok = rerun_ok && read_file(e.path().string()) ==
                                       read_file((dir / "b" / e.path().filename()).string());
            ++files;
        }
    detail += ", rerun " + std::string(rerun_ok ? "byte-identical" : "differs") + " (" + std::to_string(files) +
              " files)";
    const int selftest = lab({"selftest"});
    detail += ", selftest exit " + std::to_string(selftest);
    fs::remove_all(dir);
    return {config_ok && snap_ok && rerun_ok && files >= 5 && selftest == 0, detail};
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "operator assembly oracle", 10, operator_oracle},
        {2, "coercivity", 10, coercivity},
        {3, "energy identity second order", 60, energy_identity},
        {4, "skew part bounded across grids", 60, skew_bound},
        {5, "linear dispersion and conservation", 30, linear_physics},
        {6, "scheme orders", 60, scheme_orders},
        {7, "Picard oracle", 60, picard_oracle},
        {8, "energy growth scales with eps", 120, energy_growth},
        {9, "mu-uniform existence time", 180, timescale},
        {10, "stability constant across mu", 180, stability},
        {11, "cross-model mu order", 180, mu_order},
        {12, "commutator and product estimates", 60, estimate_ladders},
        {13, "plumbing", 60, plumbing},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = c.check();
        } catch (const std::exception& e) {
            v = {false, std::string("threw: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_budget = secs < c.budget_seconds;
        const bool pass = v.pass && in_budget;
        failed += !pass;
        std::cout << (pass ? "PASS" : "FAIL") << " [" << c.id << "] " << c.name << ": " << v.detail << " ("
                  << fmt("%.2f", secs) << " s of " << fmt("%g", c.budget_seconds) << " s"
                  << (in_budget ? "" : ", over budget") << ")\n";
    }
    std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << "\n";
    return failed == 0 ? 0 : 1;
}
