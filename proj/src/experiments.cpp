#include "whitham/experiments.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <mutex>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <sstream>
#include <thread>

namespace whitham {

int sweep_threads() {
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("WHITHAM_LAB_THREADS")) {
        char* end = nullptr;
        const long n = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && n >= 1) return static_cast<int>(n);
    }
    return static_cast<int>(hw);
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& f) {
    const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    f(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

std::pair<double, double> linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    if (x.size() < 2) return {0.0, y.empty() ? 0.0 : y[0]};
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
    return {slope, my - slope * mx};
}

State linear_exact(const Model& model, const State& initial, double t) {
    const auto& grid = initial.grid();
    const int d = grid.dim();
    const Spectrum z0 = forward(initial.zeta);
    std::vector<Spectrum> v0;
    for (const auto& c : initial.v) v0.push_back(forward(c));
    Spectrum z = z0;
    std::vector<Spectrum> v = v0;
    const Complex I(0.0, 1.0);
    for (std::size_t m = 0; m < grid.size(); ++m) {
        Vec2 xi = grid.wavenumber(m);
        for (int j = 0; j < d; ++j)
            if (grid.nyquist(m, j)) xi[j] = 0.0;
        double r2 = 0.0;
        for (int j = 0; j < d; ++j) r2 += xi[j] * xi[j];
        if (r2 == 0.0) continue;
        const double r = std::sqrt(r2);
        const double g1 = model.g1()[m];
        const double omega = r * g1;
        Complex w0 = 0.0;
        for (int j = 0; j < d; ++j) w0 += xi[j] / r * v0[j][m];
        const double c = std::cos(omega * t), s = std::sin(omega * t);
        z[m] = z0[m] * c - I * g1 * w0 * s;
        const Complex w = w0 * c - I * z0[m] / g1 * s;
        for (int j = 0; j < d; ++j) v[j][m] = v0[j][m] + (w - w0) * (xi[j] / r);
    }
    VectorField vf;
    for (const auto& s : v) vf.push_back(inverse(s));
    return State(inverse(z), std::move(vf), initial.time + t);
}

Trajectory run_config(const RunConfig& config, const RunControl& control) {
    const Model model(build_grid(config), model_params(config));
    return run(model, initial_state(config, model), stepper_config(config), control);
}

// -------------------------------------------------------------- growth

GrowthFit fit_growth(const std::vector<double>& times, const std::vector<double>& norms, const FitOptions& fit) {
    GrowthFit g;
    g.times = times;
    g.norms = norms;
    if (times.empty() || !(norms.front() > 0.0)) return g;
    const double n0 = norms.front();

    std::size_t first = times.size(), last = times.size();
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double ratio = norms[i] / n0;
        if (first == times.size() && ratio >= fit.lower) first = i;
        if (ratio > fit.upper) {
            last = i;
            break;
        }
    }
    std::vector<double> t, y;
    if (first < last && last - first >= 3) {
        for (std::size_t i = first; i < last; ++i) {
            t.push_back(times[i]);
            y.push_back(std::log(norms[i]));
        }
    } else {
        g.window_fallback = true;
        for (std::size_t i = 0; i < std::min(last + 1, times.size()); ++i) {
            if (!(norms[i] > 0.0) || !std::isfinite(norms[i])) continue;
            t.push_back(times[i]);
            y.push_back(std::log(norms[i]));
        }
    }
    g.window_points = t.size();
    const auto [slope, intercept] = linear_fit(t, y);
    g.lambda_hat = slope;
    g.kappa_hat = std::exp(intercept) / n0;
    double ss = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) ss += std::pow(y[i] - (intercept + slope * t[i]), 2);
    g.fit_residual = t.empty() ? 0.0 : std::sqrt(ss / static_cast<double>(t.size()));

    for (std::size_t i = 1; i < times.size(); ++i) {
        const double a = norms[i - 1] / n0, b = norms[i] / n0;
        if (b >= std::exp(1.0) && a < std::exp(1.0)) {
            g.efold_time = times[i - 1] + (times[i] - times[i - 1]) * (std::exp(1.0) - a) / (b - a);
            break;
        }
    }
    return g;
}

namespace {

RunConfig cell(const RunConfig& base, double epsilon, double mu) {
    RunConfig c = base;
    c.epsilon = epsilon;
    c.mu = mu;
    return c;
}

void require_valid(const RunConfig& c, const std::string& what) {
    auto report = validate(c);
    std::vector<Violation> kept;
    for (auto& v : report.violations)
        if (!(v.field == "epsilon" && c.epsilon == 0.0)) kept.push_back(v);
    if (!kept.empty()) {
        for (auto& v : kept) v.field = what + "." + v.field;
        throw ConfigValidationError(std::move(kept));
    }
}

std::vector<double> mus_or_base(const StudySpec& spec) {
    return spec.mus.empty() ? std::vector<double>{spec.base.mu} : spec.mus;
}

}  // namespace

EnergyFitReport energy_growth_study(const StudySpec& spec) {
    std::vector<std::pair<double, double>> cells;
    for (double mu : mus_or_base(spec))
        for (double eps : spec.epsilons) cells.emplace_back(eps, mu);

    EnergyFitReport report;
    report.runs.resize(cells.size());
    parallel_for(cells.size(), sweep_threads(), [&](std::size_t i) {
        const RunConfig c = cell(spec.base, cells[i].first, cells[i].second);
        require_valid(c, "energy_growth");
        RunControl ctl = run_control(c);
        ctl.state_cadence = 0;
        ctl.store_rates = false;
        const double upper = spec.fit.upper;
        double initial = -1.0;
        ctl.stop = [&initial, upper](const EnergyReport& r) {
            if (initial < 0.0) initial = r.x_norm_s;
            return r.x_norm_s > upper * initial;
        };
        const Trajectory traj = run_config(c, ctl);
        std::vector<double> t, n;
        for (const auto& r : traj.reports) {
            t.push_back(r.time);
            n.push_back(r.x_norm_s);
        }
        GrowthFit g = fit_growth(t, n, spec.fit);
        g.epsilon = c.epsilon;
        g.mu = c.mu;
        g.outcome = traj.outcome;
        if (traj.outcome == RunOutcome::blown_up || traj.outcome == RunOutcome::non_finite) {
            const bool reached =
                std::any_of(n.begin(), n.end(), [&](double x) { return x >= spec.fit.lower * n.front(); });
            if (!reached) throw StudyError("energy_growth: run blew up before the fit window");
        }
        report.runs[i] = std::move(g);
    });

    double sxy = 0.0, sxx = 0.0;
    for (const auto& g : report.runs) {
        sxy += g.epsilon * g.lambda_hat;
        sxx += g.epsilon * g.epsilon;
    }
    report.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    double lo = INFINITY, hi = 0.0;
    for (const auto& g : report.runs) {
        if (g.epsilon > 0.0 && report.slope > 0.0)
            report.max_rate_excess = std::max(report.max_rate_excess, g.lambda_hat / (report.slope * g.epsilon));
        if (g.epsilon > 0.0 && std::isfinite(g.efold_time)) {
            lo = std::min(lo, g.epsilon * g.efold_time);
            hi = std::max(hi, g.epsilon * g.efold_time);
        }
    }
    report.efold_spread = hi > 0.0 ? hi / lo : std::numeric_limits<double>::quiet_NaN();
    return report;
}

// ------------------------------------------------------------ timescale

std::vector<TimescaleRow> timescale_study(const StudySpec& spec) {
    std::vector<std::pair<double, double>> cells;
    for (double eps : spec.epsilons)
        for (double mu : spec.mus) cells.emplace_back(eps, mu);
    std::vector<TimescaleRow> rows(cells.size());
    parallel_for(cells.size(), sweep_threads(), [&](std::size_t i) {
        RunConfig c = cell(spec.base, cells[i].first, cells[i].second);
        c.t_end_over_eps = spec.t_target;
        require_valid(c, "timescale");
        RunControl ctl = run_control(c);
        ctl.state_cadence = 0;
        ctl.store_rates = false;
        const Trajectory traj = run_config(c, ctl);
        TimescaleRow row;
        row.epsilon = c.epsilon;
        row.mu = c.mu;
        row.outcome = traj.outcome;
        row.completed = traj.outcome == RunOutcome::completed;
        row.t_reached = traj.end_time();
        const double n0 = traj.reports.front().x_norm_s;
        row.final_ratio = traj.last_finite_norm / n0;
        row.max_ratio = 0.0;
        for (const auto& r : traj.reports) row.max_ratio = std::max(row.max_ratio, r.x_norm_s / n0);
        row.max_ratio = std::max(row.max_ratio, row.final_ratio);
        rows[i] = row;
    });
    return rows;
}

// -------------------------------------------------------------- compare

CompareReport model_compare(const RunConfig& a, const RunConfig& b) {
    if (a.dim != b.dim || a.N != b.N || a.L != b.L) 
        throw ConfigValidationError(std::vector<Violation>{{"grid", "both configs must share dim, N and L"}});
    const GridPtr grid = build_grid(a);
    const Model ma(grid, model_params(a)), mb(grid, model_params(b));
    const State ua = initial_state(a, ma), ub = initial_state(b, mb);

    StepperConfig sc = stepper_config(a);
    if (!sc.dt_override) sc.dt_override = std::min(cfl_dt(ma, ua, sc.cfl), cfl_dt(mb, ub, sc.cfl));
    RunControl ctl = run_control(a);
    ctl.report_cadence = 1;
    ctl.state_cadence = 1;
    ctl.store_rates = false;
    const Trajectory ta = run(ma, ua, sc, ctl);
    const Trajectory tb = run(mb, ub, sc, ctl);
    if (ta.outcome != RunOutcome::completed || tb.outcome != RunOutcome::completed)
        throw StudyError("model_compare: a run did not complete");

    const double s = a.s - 1.0;
    CompareReport rep;
    rep.times = ta.times;
    const std::size_t n = ta.times.size();
    for (std::size_t k = 0; k < n; ++k) rep.error.push_back(ma.x_norm(ta.states[k] - tb.states[k], s));
    rep.residual.assign(n, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t k = 1; k + 1 < n; ++k) {
        State r = (1.0 / (tb.times[k + 1] - tb.times[k - 1])) * (tb.states[k + 1] - tb.states[k - 1]);
        r -= ma.rhs(tb.states[k]);
        rep.residual[k] = ma.x_norm(r, s);
        rep.sup_residual = std::max(rep.sup_residual, rep.residual[k]);
    }
    rep.e0 = rep.error.front();
    const double t0 = rep.times.front();
    for (std::size_t k = 0; k < n; ++k) {
        const double denom = rep.e0 + (rep.times[k] - t0) * rep.sup_residual;
        if (denom > 0.0) rep.c_hat = std::max(rep.c_hat, rep.error[k] / denom);
    }
    for (std::size_t k = 0; k < n; ++k) {
        const double bound = rep.c_hat * (rep.e0 + (rep.times[k] - t0) * rep.sup_residual);
        if (rep.error[k] > bound * (1.0 + 1e-12) + 1e-300) rep.bound_holds = false;
    }
    return rep;
}

StabilityReport stability_study(const StudySpec& spec) {
    StabilityReport rep;
    rep.mus = spec.mus;
    rep.compares.resize(spec.mus.size());
    parallel_for(spec.mus.size(), sweep_threads(), [&](std::size_t i) {
        const RunConfig a = cell(spec.base, spec.base.epsilon, spec.mus[i]);
        RunConfig b = a;
        b.model = ModelSpec{};
        b.model.preset = spec.compare_model;
        require_valid(a, "stability");
        require_valid(b, "stability");
        rep.compares[i] = model_compare(a, b);
    });
    double lo = INFINITY, hi = 0.0;
    for (const auto& c : rep.compares) {
        lo = std::min(lo, c.c_hat);
        hi = std::max(hi, c.c_hat);
    }
    rep.c_hat_spread = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
    return rep;
}

// -------------------------------------------------------------- mu order

MuScalingReport mu_scaling_study(const StudySpec& spec) {
    MuScalingReport rep;
    const std::size_t n = spec.mus.size();
    rep.mus = spec.mus;
    rep.errors.resize(n);
    rep.spatial_errors.resize(n);
    rep.under_resolved.resize(n);
    parallel_for(n, sweep_threads(), [&](std::size_t i) {
        const RunConfig a = cell(spec.base, spec.base.epsilon, spec.mus[i]);
        RunConfig b = a;
        b.model = ModelSpec{};
        b.model.preset = spec.compare_model;
        require_valid(a, "mu_scaling");
        require_valid(b, "mu_scaling");
        const GridPtr grid = build_grid(a);
        const Model ma(grid, model_params(a)), mb(grid, model_params(b));
        const State ua = initial_state(a, ma), ub = initial_state(b, mb);
        StepperConfig sc = stepper_config(a);
        if (!sc.dt_override) sc.dt_override = std::min(cfl_dt(ma, ua, sc.cfl), cfl_dt(mb, ub, sc.cfl));
        RunControl ctl = run_control(a);
        ctl.state_cadence = 0;
        ctl.store_rates = false;
        const State fa = run(ma, ua, sc, ctl).final_state();
        const State fb = run(mb, ub, sc, ctl).final_state();
        rep.errors[i] = ma.x_norm(fa - fb, 0.0);

        RunConfig fine = a;
        fine.N = 2 * a.N;
        const GridPtr fg = build_grid(fine);
        const Model mf(fg, model_params(fine));
        const State ff = run(mf, initial_state(fine, mf), sc, ctl).final_state();
        State up(fg);
        up.zeta = resample(fa.zeta, fg);
        for (int j = 0; j < a.dim; ++j) up.v[j] = resample(fa.v[j], fg);
        rep.spatial_errors[i] = mf.x_norm(ff - up, 0.0);
        rep.under_resolved[i] = rep.spatial_errors[i] > 0.1 * rep.errors[i];
    });
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < n; ++i) {
        lx.push_back(std::log(rep.mus[i]));
        ly.push_back(std::log(rep.errors[i]));
    }
    std::tie(rep.slope, rep.intercept) = linear_fit(lx, ly);
    return rep;
}

// ----------------------------------------------------------- convergence

ConvergenceReport convergence_study(const StudySpec& spec) {
    ConvergenceReport rep;
    rep.dts = spec.dts;
    std::sort(rep.dts.begin(), rep.dts.end(), std::greater<>());
    rep.grid_sizes = spec.grid_sizes;
    std::sort(rep.grid_sizes.begin(), rep.grid_sizes.end());
    for (std::size_t i = 1; i < rep.dts.size(); ++i)
        if (std::abs(rep.dts[i - 1] / rep.dts[i] - std::round(rep.dts[i - 1] / rep.dts[i])) > 1e-9)
            throw ConfigValidationError(std::vector<Violation>{{"dts", "each dt must divide the previous one"}});
    for (std::size_t i = 1; i < rep.grid_sizes.size(); ++i)
        if (rep.grid_sizes[i] % rep.grid_sizes[i - 1] != 0)
            throw ConfigValidationError(std::vector<Violation>{{"grid_sizes", "each size must divide the next one"}});

    const RunConfig& base = spec.base;
    const double eps = base.epsilon;
    rep.exact_reference = eps == 0.0;
    rep.temporal_grid = rep.grid_sizes.empty() ? base.N : rep.grid_sizes.back();

    // one model per grid size, so every state of a size shares its grid
    std::map<int, std::unique_ptr<Model>> models;
    auto config_for = [&](int n, double dt) {
        RunConfig c = base;
        c.N = n;
        c.stepper.dt_override = dt;
        return c;
    };
    std::vector<int> sizes = rep.grid_sizes;
    sizes.push_back(rep.temporal_grid);
    for (int n : sizes) {
        if (models.count(n)) continue;
        const RunConfig c = config_for(n, rep.dts.back());
        require_valid(c, "convergence");
        models[n] = std::make_unique<Model>(build_grid(c), model_params(c));
    }
    auto final_state = [&](int n, double dt) {
        const RunConfig c = config_for(n, dt);
        const Model& m = *models.at(n);
        RunControl ctl = run_control(c);
        ctl.state_cadence = 0;
        ctl.store_rates = false;
        return run(m, initial_state(c, m), stepper_config(c), ctl).final_state();
    };

    const Model& tm = *models.at(rep.temporal_grid);
    const RunConfig tc = config_for(rep.temporal_grid, rep.dts.back());
    const State reference = rep.exact_reference
                                ? linear_exact(tm, initial_state(tc, tm), stepper_config(tc).t_end)
                                : final_state(rep.temporal_grid, rep.dts.back() / 4.0);
    rep.temporal_errors.resize(rep.dts.size());
    parallel_for(rep.dts.size(), sweep_threads(), [&](std::size_t i) {
        rep.temporal_errors[i] = tm.x_norm(final_state(rep.temporal_grid, rep.dts[i]) - reference, 0.0);
    });
    rep.temporal_floor = rep.temporal_errors.back();

    if (rep.grid_sizes.empty()) return rep;
    const double dt = rep.dts.back();
    std::vector<std::optional<State>> finals(rep.grid_sizes.size());
    parallel_for(rep.grid_sizes.size(), sweep_threads(),
                 [&](std::size_t i) { finals[i] = final_state(rep.grid_sizes[i], dt); });
    const State& finest = *finals.back();
    const Model& fm = *models.at(rep.grid_sizes.back());
    for (const auto& f : finals) {
        State up(finest.grid_ptr());
        up.zeta = resample(f->zeta, finest.grid_ptr());
        for (int j = 0; j < base.dim; ++j) up.v[j] = resample(f->v[j], finest.grid_ptr());
        rep.spatial_errors.push_back(fm.x_norm(up - finest, 0.0));
    }
    return rep;
}

// --------------------------------------------------------------- output

StudyOutput run_study(const StudySpec& spec) {
    StudyOutput out;
    out.kind = to_string(spec.kind);
    auto outcome_code = [](RunOutcome o) { return static_cast<double>(static_cast<int>(o)); };
    switch (spec.kind) {
        case StudyKind::energy_growth: {
            const auto rep = energy_growth_study(spec);
            out.table.columns = {"epsilon", "mu", "lambda_hat", "kappa_hat", "efold_time", "window_points",
                                 "window_fallback", "fit_residual", "outcome"};
            for (const auto& g : rep.runs)
                out.table.rows.push_back({g.epsilon, g.mu, g.lambda_hat, g.kappa_hat, g.efold_time,
                                          static_cast<double>(g.window_points), g.window_fallback ? 1.0 : 0.0,
                                          g.fit_residual, outcome_code(g.outcome)});
            out.summary = {{"slope", rep.slope},
                           {"max_rate_excess", rep.max_rate_excess},
                           {"efold_spread", rep.efold_spread}};
            std::ostringstream note;
            note << "lambda_hat fitted on log x_norm_s where the norm ratio lies in [" << spec.fit.lower << ", "
                 << spec.fit.upper << "]";
            out.notes.push_back(note.str());
            break;
        }
        case StudyKind::timescale: {
            out.table.columns = {"epsilon", "mu", "completed", "t_reached", "final_ratio", "max_ratio", "outcome"};
            double worst = 0.0, completed = 0.0;
            const auto rows = timescale_study(spec);
            for (const auto& r : rows) {
                out.table.rows.push_back({r.epsilon, r.mu, r.completed ? 1.0 : 0.0, r.t_reached, r.final_ratio,
                                          r.max_ratio, outcome_code(r.outcome)});
                worst = std::max(worst, r.max_ratio);
                completed += r.completed ? 1.0 : 0.0;
            }
            out.summary = {{"cells", static_cast<double>(rows.size())},
                           {"completed", completed},
                           {"worst_max_ratio", worst}};
            break;
        }
        case StudyKind::stability: {
            const auto rep = stability_study(spec);
            out.table.columns = {"mu", "time", "error", "residual", "bound"};
            for (std::size_t i = 0; i < rep.mus.size(); ++i) {
                const auto& c = rep.compares[i];
                for (std::size_t k = 0; k < c.times.size(); ++k)
                    out.table.rows.push_back({rep.mus[i], c.times[k], c.error[k], c.residual[k],
                                              c.c_hat * (c.e0 + (c.times[k] - c.times.front()) * c.sup_residual)});
                std::ostringstream key;
                key << "c_hat_mu_" << rep.mus[i];
                out.summary.emplace_back(key.str(), c.c_hat);
            }
            out.summary.emplace_back("c_hat_spread", rep.c_hat_spread);
            break;
        }
        case StudyKind::mu_scaling: {
            const auto rep = mu_scaling_study(spec);
            out.table.columns = {"mu", "error", "spatial_error", "under_resolved"};
            for (std::size_t i = 0; i < rep.mus.size(); ++i)
                out.table.rows.push_back(
                    {rep.mus[i], rep.errors[i], rep.spatial_errors[i], rep.under_resolved[i] ? 1.0 : 0.0});
            out.summary = {{"slope", rep.slope}, {"intercept", rep.intercept}};
            out.notes.push_back(
                "cross-model surrogate: the gap between the two models stands in for the distance to the water-waves "
                "solution, which is not computed here");
            break;
        }
        case StudyKind::convergence: {
            const auto rep = convergence_study(spec);
            out.table.columns = {"ladder", "step", "error"};
            for (std::size_t i = 0; i < rep.dts.size(); ++i)
                out.table.rows.push_back({0.0, rep.dts[i], rep.temporal_errors[i]});
            for (std::size_t i = 0; i < rep.grid_sizes.size(); ++i)
                out.table.rows.push_back({1.0, static_cast<double>(rep.grid_sizes[i]), rep.spatial_errors[i]});
            out.summary = {{"temporal_floor", rep.temporal_floor}, {"exact_reference", rep.exact_reference ? 1.0 : 0.0}};
            for (std::size_t i = 1; i < rep.dts.size(); ++i)
                out.summary.emplace_back("temporal_ratio_" + std::to_string(i),
                                         rep.temporal_errors[i - 1] / rep.temporal_errors[i]);
            out.notes.push_back("ladder 0 is dt (temporal), ladder 1 is N (spatial)");
            break;
        }
    }
    return out;
}

void write_study_output(const std::string& dir, const StudyOutput& output) {
    std::filesystem::create_directories(dir);
    write_file_atomic((std::filesystem::path(dir) / "study.csv").string(), output.table.to_string());
    nlohmann::ordered_json j;
    j["study"] = output.kind;
    nlohmann::ordered_json summary = nlohmann::ordered_json::object();
    for (const auto& [k, v] : output.summary) summary[k] = std::isfinite(v) ? nlohmann::ordered_json(v) : nullptr;
    j["summary"] = summary;
    j["notes"] = output.notes;
    write_file_atomic((std::filesystem::path(dir) / "summary.json").string(), j.dump(2) + "\n");
}

}  // namespace whitham
