/// @file timestepper.hpp
/// @brief Fixed-step RK4 for the nonlinear system, the regularized
/// frozen-coefficient linear solver and the Picard iteration built on it.
#pragma once

#include "whitham/diagnostics.hpp"
#include "whitham/model.hpp"

#include <functional>
#include <limits>
#include <optional>
#include <vector>

namespace whitham {

enum class Scheme { rk4, picard_reference };

struct StepperConfig {
    double cfl = 0.4;
    double t_end = 0.0;  ///< duration of the run, measured from the initial time
    std::optional<double> dt_override;
    Scheme scheme = Scheme::rk4;
    /// J_alpha = (1 - alpha Laplacian)^{-1/2} inside the linearized solver;
    /// alpha = 0 disables the regularization.
    double alpha = 0.0;
    double picard_tol = 1e-10;
    int picard_max_iter = 50;

    bool operator==(const StepperConfig&) const = default;
};

enum class RunOutcome { completed, blown_up, non_finite, stopped };

const char* to_string(RunOutcome outcome);

struct Trajectory {
    std::vector<double> times;
    std::vector<State> states;
    /// Time derivatives at `times`; empty when not recorded.
    std::vector<State> rates;
    std::vector<EnergyReport> reports;

    RunOutcome outcome = RunOutcome::completed;
    double blowup_time = std::numeric_limits<double>::quiet_NaN();
    double last_finite_norm = 0.0;  ///< last finite x_norm_s seen
    bool cavitation_flag = false;   ///< some report had min_depth < 0.95 h_min
    double dt = 0.0;
    std::size_t steps = 0;

    bool empty() const { return states.empty(); }
    bool has_rates() const { return !rates.empty() && rates.size() == states.size(); }
    double start_time() const { return times.front(); }
    double end_time() const { return times.back(); }
    const State& final_state() const { return states.back(); }

    /// State at time t: cubic Hermite interpolation when rates are stored,
    /// linear otherwise. Throws TimeRangeError outside [start, end].
    State at(double t) const;
    /// Time derivative at t (derivative of the interpolant).
    State rate_at(double t) const;
};

/// Runs of the nonlinear system stop on these events.
struct RunControl {
    NormLadder ladder;
    double blowup_factor = 100.0;
    int report_cadence = 1;  ///< energy report every n steps (step 0 included)
    int state_cadence = 1;   ///< stored state every n steps; 0 stores first and last only
    bool store_rates = true;
    /// Optional early stop, evaluated on every report.
    std::function<bool(const EnergyReport&)> stop;
};

/// cfl * dx / (sup G1^2 + eps (1 + sup|G2|^2 max|v|)), with max|v| from `state`.
double cfl_dt(const Model& model, const State& state, double cfl);

/// Number of steps and the uniform step that lands exactly on t_end.
struct StepPlan {
    std::size_t steps;
    double dt;
};
StepPlan plan_steps(double t_end, double dt_nominal);

State step_rk4(const Model& model, const State& u, double dt);

/// Integrates from initial.time to initial.time + config.t_end. Throws
/// CavitationError if the initial elevation violates 1 + eps zeta >= h_min.
/// Blow-up and non-finite values end the run early and are reported through
/// Trajectory::outcome.
Trajectory run(const Model& model, const State& initial, const StepperConfig& config,
               const RunControl& control = {});

using Forcing = std::function<State(double)>;

/// Solves d_t u + sum_j A_j(frozen(t)) d_j J_alpha u = forcing(t) on
/// [initial.time, initial.time + config.t_end] with RK4, the frozen
/// coefficients interpolated from `frozen`. Rates are always stored.
Trajectory linearized_solve(const Model& model, const Trajectory& frozen, const State& initial,
                            const Forcing& forcing, double alpha, const StepperConfig& config);

struct PicardResult {
    Trajectory trajectory;
    /// n such that |U_{n+1} - U_n| < tol; the linear case gives 1.
    int iterations = 0;
    /// sup_t x_norm(U_{n+1} - U_n, 0) for n = 0, 1, ...
    std::vector<double> cauchy_differences;
};

/// Picard iteration U_{n+1} = linearized_solve(frozen = U_n) from the
/// constant-in-time U_0. Reference oracle for d = 1 and N <= 64 only.
/// Throws MaxIterExceeded when picard_max_iter iterations do not converge.
PicardResult picard_solve(const Model& model, const State& initial, const StepperConfig& config);

}  // namespace whitham
