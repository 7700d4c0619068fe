#include "whitham/timestepper.hpp"

#include "whitham/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace whitham {

namespace {

double time_tolerance(double t) { return 1e-12 * std::max(1.0, std::abs(t)); }

struct HermiteWeights {
    double h00, h10, h01, h11;
};

HermiteWeights hermite(double s) {
    const double s2 = s * s, s3 = s2 * s;
    return {2 * s3 - 3 * s2 + 1, s3 - 2 * s2 + s, -2 * s3 + 3 * s2, s3 - s2};
}

HermiteWeights hermite_derivative(double s) {
    const double s2 = s * s;
    return {6 * s2 - 6 * s, 3 * s2 - 4 * s + 1, -6 * s2 + 6 * s, 3 * s2 - 2 * s};
}

State derivative_state(const State& u, int j) {
    VectorField v;
    for (const auto& c : u.v) v.push_back(spectral_derivative(c, j));
    return State(spectral_derivative(u.zeta, j), std::move(v), u.time);
}

State apply_symbol_state(const SymbolTable& g, const State& u) {
    VectorField v;
    for (const auto& c : u.v) v.push_back(apply_symbol(g, c));
    return State(apply_symbol(g, u.zeta), std::move(v), u.time);
}

}  // namespace

const char* to_string(RunOutcome outcome) {
    switch (outcome) {
        case RunOutcome::completed: return "completed";
        case RunOutcome::blown_up: return "blown_up";
        case RunOutcome::non_finite: return "non_finite";
        case RunOutcome::stopped: return "stopped";
    }
    return "unknown";
}

// ----------------------------------------------------------------- Trajectory

State Trajectory::at(double t) const {
    if (empty()) throw TimeRangeError("empty trajectory");
    if (t < times.front() - time_tolerance(t) || t > times.back() + time_tolerance(t))
        throw TimeRangeError("time " + std::to_string(t) + " outside trajectory range [" +
                             std::to_string(times.front()) + ", " + std::to_string(times.back()) + "]");
    t = std::clamp(t, times.front(), times.back());
    auto it = std::upper_bound(times.begin(), times.end(), t);
    if (it == times.end()) return states.back();
    const auto b = static_cast<std::size_t>(it - times.begin());
    if (b == 0) return states.front();
    const std::size_t a = b - 1;
    const double h = times[b] - times[a];
    const double s = (t - times[a]) / h;
    State out = states[a];
    if (has_rates()) {
        const auto w = hermite(s);
        out *= w.h00;
        out.axpy(w.h10 * h, rates[a]);
        out.axpy(w.h01, states[b]);
        out.axpy(w.h11 * h, rates[b]);
    } else {
        out *= 1.0 - s;
        out.axpy(s, states[b]);
    }
    out.time = t;
    return out;
}

State Trajectory::rate_at(double t) const {
    if (empty()) throw TimeRangeError("empty trajectory");
    if (t < times.front() - time_tolerance(t) || t > times.back() + time_tolerance(t))
        throw TimeRangeError("time outside trajectory range");
    if (times.size() == 1) {
        if (has_rates()) return rates.front();
        State z(states.front().grid_ptr());
        z.time = t;
        return z;
    }
    t = std::clamp(t, times.front(), times.back());
    auto it = std::upper_bound(times.begin(), times.end(), t);
    std::size_t b = std::min(static_cast<std::size_t>(it - times.begin()), times.size() - 1);
    b = std::max<std::size_t>(b, 1);
    const std::size_t a = b - 1;
    const double h = times[b] - times[a];
    const double s = (t - times[a]) / h;
    State out(states[a].grid_ptr());
    if (has_rates()) {
        const auto w = hermite_derivative(s);
        out.axpy(w.h00 / h, states[a]);
        out.axpy(w.h10, rates[a]);
        out.axpy(w.h01 / h, states[b]);
        out.axpy(w.h11, rates[b]);
    } else {
        out.axpy(1.0 / h, states[b]);
        out.axpy(-1.0 / h, states[a]);
    }
    out.time = t;
    return out;
}

// --------------------------------------------------------------- integrators

double cfl_dt(const Model& model, const State& state, double cfl) {
    if (!(cfl > 0.0)) throw std::invalid_argument("cfl must be positive");
    double vmax2 = 0.0;
    for (std::size_t p = 0; p < state.zeta.size(); ++p) {
        double m = 0.0;
        for (const auto& c : state.v) m += c[p] * c[p];
        vmax2 = std::max(vmax2, m);
    }
    const double g2 = model.g2().sup_abs();
    const double speed = model.g1_squared().sup_abs() + model.epsilon() * (1.0 + g2 * g2 * std::sqrt(vmax2));
    return cfl * model.grid().spacing() / speed;
}

StepPlan plan_steps(double t_end, double dt_nominal) {
    if (!(t_end >= 0.0)) throw std::invalid_argument("t_end must be non-negative");
    if (!(dt_nominal > 0.0)) throw std::invalid_argument("time step must be positive");
    if (t_end == 0.0) return {0, dt_nominal};
    const auto steps = static_cast<std::size_t>(std::ceil(t_end / dt_nominal - 1e-9));
    const std::size_t n = std::max<std::size_t>(steps, 1);
    return {n, t_end / static_cast<double>(n)};
}

namespace {

template <class Rhs>
State rk4_step(const Rhs& f, const State& u, const State& k1, double t, double dt) {
    State y = u;
    y.axpy(0.5 * dt, k1);
    const State k2 = f(t + 0.5 * dt, y);
    y = u;
    y.axpy(0.5 * dt, k2);
    const State k3 = f(t + 0.5 * dt, y);
    y = u;
    y.axpy(dt, k3);
    const State k4 = f(t + dt, y);
    State out = u;
    out.axpy(dt / 6.0, k1);
    out.axpy(dt / 3.0, k2);
    out.axpy(dt / 3.0, k3);
    out.axpy(dt / 6.0, k4);
    out.time = t + dt;
    return out;
}

}  // namespace

State step_rk4(const Model& model, const State& u, double dt) {
    auto f = [&model](double, const State& y) { return model.rhs(y); };
    return rk4_step(f, u, model.rhs(u), u.time, dt);
}

Trajectory run(const Model& model, const State& initial, const StepperConfig& config, const RunControl& control) {
    const auto cav = check_non_cavitation(initial.zeta, model.epsilon(), model.params().h_min);
    if (!cav.ok) throw CavitationError(cav.min_depth, model.params().h_min);
    if (!initial.all_finite()) throw NonFiniteError("initial state is not finite");

    const double dt_nominal = config.dt_override ? *config.dt_override : cfl_dt(model, initial, config.cfl);
    const StepPlan plan = plan_steps(config.t_end, dt_nominal);
    const double t0 = initial.time;
    const double h_min = model.params().h_min;
    const int report_every = std::max(1, control.report_cadence);

    Trajectory traj;
    traj.dt = plan.dt;
    auto rhs = [&model](double, const State& y) { return model.rhs(y); };

    State u = initial;
    const double initial_norm = model.x_norm(u, control.ladder.s);
    traj.last_finite_norm = initial_norm;

    bool pending_rate = false;
    auto store = [&](const State& s) {
        traj.times.push_back(s.time);
        traj.states.push_back(s);
        pending_rate = control.store_rates;
    };
    auto report = [&](const State& s) {
        traj.reports.push_back(energy_report(model, s, control.ladder));
        const auto& r = traj.reports.back();
        if (r.min_depth < 0.95 * h_min) traj.cavitation_flag = true;
        return control.stop && control.stop(r);
    };

    store(u);
    if (report(u)) traj.outcome = RunOutcome::stopped;

    for (std::size_t n = 0; n < plan.steps && traj.outcome == RunOutcome::completed; ++n) {
        const State k1 = rhs(u.time, u);
        if (pending_rate) {
            traj.rates.push_back(k1);
            pending_rate = false;
        }
        const double t = t0 + plan.dt * static_cast<double>(n);
        State next = rk4_step(rhs, u, k1, t, plan.dt);
        next.time = t0 + plan.dt * static_cast<double>(n + 1);
        ++traj.steps;

        const double norm = next.all_finite() ? model.x_norm(next, control.ladder.s) : NAN;
        if (!std::isfinite(norm)) {
            traj.outcome = RunOutcome::non_finite;
            traj.blowup_time = next.time;
            break;
        }
        u = std::move(next);
        traj.last_finite_norm = norm;
        const std::size_t step = n + 1;
        const bool last = step == plan.steps;

        if (norm > control.blowup_factor * initial_norm) {
            traj.outcome = RunOutcome::blown_up;
            traj.blowup_time = u.time;
            if (step % static_cast<std::size_t>(report_every) == 0) report(u);
            store(u);
            break;
        }
        const bool keep = last || (control.state_cadence > 0 &&
                                   step % static_cast<std::size_t>(control.state_cadence) == 0);
        bool stop = false;
        if (step % static_cast<std::size_t>(report_every) == 0) stop = report(u);
        if (keep || stop) store(u);
        if (stop) traj.outcome = RunOutcome::stopped;
    }
    if (pending_rate) traj.rates.push_back(model.rhs(u));
    return traj;
}

Trajectory linearized_solve(const Model& model, const Trajectory& frozen, const State& initial,
                            const Forcing& forcing, double alpha, const StepperConfig& config) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in [0,1]");
    const double t0 = initial.time;
    const double t1 = t0 + config.t_end;
    if (frozen.empty() || frozen.start_time() > t0 + time_tolerance(t0) || frozen.end_time() < t1 - time_tolerance(t1))
        throw TimeRangeError("frozen trajectory does not cover the requested time range");

    std::optional<SymbolTable> j_alpha;
    if (alpha > 0.0)
        j_alpha = SymbolTable::tabulate(model.grid_ptr(), [alpha](const Vec2& xi) {
            return 1.0 / std::sqrt(1.0 + alpha * (xi[0] * xi[0] + xi[1] * xi[1]));
        });

    auto rhs = [&](double t, const State& u) {
        const State fr = frozen.at(t);
        const State ju = j_alpha ? apply_symbol_state(*j_alpha, u) : u;
        State out(u.grid_ptr());
        for (int j = 0; j < model.dim(); ++j) out -= model.apply_A(fr, j, derivative_state(ju, j));
        if (forcing) out += forcing(t);
        out.time = t;
        return out;
    };

    const double dt_nominal = config.dt_override ? *config.dt_override : cfl_dt(model, frozen.at(t0), config.cfl);
    const StepPlan plan = plan_steps(config.t_end, dt_nominal);

    Trajectory traj;
    traj.dt = plan.dt;
    State u = initial;
    traj.times.push_back(t0);
    traj.states.push_back(u);
    for (std::size_t n = 0; n < plan.steps; ++n) {
        const double t = t0 + plan.dt * static_cast<double>(n);
        const State k1 = rhs(t, u);
        traj.rates.push_back(k1);
        u = rk4_step(rhs, u, k1, t, plan.dt);
        u.time = t0 + plan.dt * static_cast<double>(n + 1);
        if (!u.all_finite()) throw NonFiniteError("linearized solve produced non-finite values");
        traj.times.push_back(u.time);
        traj.states.push_back(u);
        ++traj.steps;
    }
    traj.rates.push_back(rhs(u.time, u));
    return traj;
}

PicardResult picard_solve(const Model& model, const State& initial, const StepperConfig& config) {
    if (model.dim() != 1 || model.grid().points_per_dim() > 64)
        throw std::invalid_argument("Picard reference solver is limited to d = 1 and N <= 64");

    Trajectory prev;
    prev.times.push_back(initial.time);
    prev.states.push_back(initial);
    prev.rates.emplace_back(initial.grid_ptr());
    if (config.t_end > 0.0) {
        State end = initial;
        end.time = initial.time + config.t_end;
        prev.times.push_back(end.time);
        prev.states.push_back(std::move(end));
        prev.rates.emplace_back(initial.grid_ptr());
    }

    PicardResult result;
    for (int n = 0; n < config.picard_max_iter; ++n) {
        Trajectory next = linearized_solve(model, prev, initial, nullptr, config.alpha, config);
        double diff = 0.0;
        for (std::size_t i = 0; i < next.times.size(); ++i)
            diff = std::max(diff, model.x_norm(next.states[i] - prev.at(next.times[i]), 0.0));
        result.cauchy_differences.push_back(diff);
        if (diff < config.picard_tol) {
            result.iterations = n;
            result.trajectory = std::move(next);
            return result;
        }
        prev = std::move(next);
    }
    throw MaxIterExceeded(config.picard_max_iter, result.cauchy_differences.back());
}

}  // namespace whitham
