/// @file experiments.hpp
/// @brief Multi-run studies: growth-rate fits against epsilon, existence
/// time across (epsilon, mu), model comparison with its stability constant,
/// cross-model mu-order and convergence orders.
///
/// Every study is a pure function of its StudySpec: sweep cells run in
/// parallel (at most WHITHAM_LAB_THREADS threads) and results are assembled
/// in sweep order.
#pragma once

#include "whitham/config.hpp"
#include "whitham/io.hpp"

#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace whitham {

/// Thread cap from WHITHAM_LAB_THREADS, else the hardware concurrency.
int sweep_threads();

/// Calls f(0), ..., f(n - 1) on up to `threads` workers.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& f);

/// Exact solution of the linear (eps = 0) system: each Fourier mode rotates
/// with frequency |xi| G1(xi). Derivatives follow the discrete convention
/// (the Nyquist mode does not move along its axis).
State linear_exact(const Model& model, const State& initial, double t);

/// Builds the model and initial state of `config` and runs it.
Trajectory run_config(const RunConfig& config, const RunControl& control);

// ------------------------------------------------------------- growth fits

struct GrowthFit {
    double epsilon = 0.0;
    double mu = 1.0;
    RunOutcome outcome = RunOutcome::completed;
    double lambda_hat = 0.0;  ///< fitted rate of log x_norm_s
    double kappa_hat = 1.0;   ///< fitted prefactor relative to the initial norm
    double efold_time = std::numeric_limits<double>::quiet_NaN();
    std::size_t window_points = 0;
    bool window_fallback = false;  ///< window too short; the whole run was fitted
    double fit_residual = 0.0;     ///< rms residual of the log fit
    std::vector<double> times;
    std::vector<double> norms;
};

/// Least squares log(norm) = log(kappa norm_0) + lambda t on the window where
/// norm / norm_0 first lies in [lower, upper]. Fewer than three points in the
/// window fall back to the full record.
GrowthFit fit_growth(const std::vector<double>& times, const std::vector<double>& norms, const FitOptions& fit);

struct EnergyFitReport {
    std::vector<GrowthFit> runs;
    double slope = 0.0;            ///< lambda_hat against epsilon, through the origin
    double max_rate_excess = 0.0;  ///< max over runs of lambda_hat / (slope eps)
    double efold_spread = 0.0;     ///< max / min of eps * efold_time
};

EnergyFitReport energy_growth_study(const StudySpec& spec);

// --------------------------------------------------------------- timescale

struct TimescaleRow {
    double epsilon = 0.0;
    double mu = 1.0;
    RunOutcome outcome = RunOutcome::completed;
    bool completed = false;
    double t_reached = 0.0;
    double final_ratio = 1.0;  ///< final x_norm_s / initial
    double max_ratio = 1.0;    ///< largest x_norm_s / initial along the run
};

std::vector<TimescaleRow> timescale_study(const StudySpec& spec);

// ---------------------------------------------------------- model compare

struct CompareReport {
    std::vector<double> times;
    std::vector<double> error;     ///< x_norm(U_A - U_B, s - 1)
    std::vector<double> residual;  ///< x_norm(R, s - 1), NaN at the end points
    double e0 = 0.0;
    double sup_residual = 0.0;
    double c_hat = 0.0;  ///< max_t error / (e0 + t sup_residual)
    bool bound_holds = true;
};

/// Runs A and B on the same grid and time steps and plugs B's solution into
/// A's equations: R = d_t U_B + sum_j A_j^A(U_B) d_j U_B with d_t by centered
/// differences. Throws StudyError on grid mismatch or blow-up.
CompareReport model_compare(const RunConfig& a, const RunConfig& b);

struct StabilityReport {
    std::vector<double> mus;
    std::vector<CompareReport> compares;
    double c_hat_spread = 0.0;  ///< max / min of c_hat across mu
};

StabilityReport stability_study(const StudySpec& spec);

// -------------------------------------------------------------- mu order

struct MuScalingReport {
    std::vector<double> mus;
    std::vector<double> errors;          ///< final-time x_norm(U_A - U_B, 0)
    std::vector<double> spatial_errors;  ///< model A at N against 2N
    std::vector<bool> under_resolved;    ///< spatial error above 10% of the model error
    double slope = 0.0;
    double intercept = 0.0;
};

MuScalingReport mu_scaling_study(const StudySpec& spec);

// ------------------------------------------------------------ convergence

struct ConvergenceReport {
    std::vector<double> dts;
    std::vector<double> temporal_errors;
    std::vector<int> grid_sizes;
    std::vector<double> spatial_errors;
    double temporal_floor = 0.0;  ///< temporal error at the smallest dt
    bool exact_reference = false;
    int temporal_grid = 0;
};

/// Temporal errors at the largest grid against the exact solution when
/// eps = 0 and a dt / 4 reference otherwise; spatial errors at the smallest
/// dt against the largest grid.
ConvergenceReport convergence_study(const StudySpec& spec);

// --------------------------------------------------------------- output

struct StudyOutput {
    std::string kind;
    CsvTable table;
    std::vector<std::pair<std::string, double>> summary;
    std::vector<std::string> notes;
};

StudyOutput run_study(const StudySpec& spec);

/// Writes <dir>/study.csv and <dir>/summary.json.
void write_study_output(const std::string& dir, const StudyOutput& output);

/// Least squares slope and intercept of y against x.
std::pair<double, double> linear_fit(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace whitham
