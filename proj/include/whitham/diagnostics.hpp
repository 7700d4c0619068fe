/// @file diagnostics.hpp
/// @brief Measurements that make the energy estimates checkable: energy
/// reports, coercivity margins, the energy-identity residual, the blow-up
/// monitor, random test fields and the Sobolev estimate ratio suite.
#pragma once

#include "whitham/model.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace whitham {

struct Trajectory;

/// Regularity indices reported alongside the configured s.
struct NormLadder {
    double t0 = 1.01;  ///< Sobolev threshold, > d/2
    double s = 2.01;   ///< configured norm index
};

/// Default threshold d/2 + 0.51.
double default_t0(int dim);

struct EnergyReport {
    double time = 0.0;
    double x_norm_0 = 0.0;
    double x_norm_t0 = 0.0;
    double x_norm_t0p1 = 0.0;
    double x_norm_s = 0.0;
    double y_norm_0 = 0.0;
    double quad_form = 0.0;     ///< (S0(U) U, U)_2
    double min_depth = 1.0;     ///< min of 1 + eps zeta
    double max_velocity = 0.0;  ///< sup |G2 v|

    bool all_finite() const;
};

EnergyReport energy_report(const Model& model, const State& u, const NormLadder& ladder);

/// quadratic_form(frozen, u) - (|zeta|^2 + h_min |G1 v|^2).
double coercivity_margin(const Model& model, const State& frozen, const State& u);

struct CoercivityResult {
    double worst_margin = 0.0;
    /// Worst margin divided by |zeta|^2 + |G1 v|^2 of the offending trial.
    double worst_relative_margin = 0.0;
    int trials = 0;
};

/// Draws n_trials random pairs (frozen, u). Frozen elevations are band-limited
/// and rescaled so that 1 + eps zeta >= h_min holds at every grid point.
CoercivityResult coercivity_check(const Model& model, int n_trials, std::uint64_t seed);

/// Random real field with Gaussian spectral coefficients of standard
/// deviation <xi>^-decay on every mode with all |k_i| <= kmax (kmax < 0 means
/// the two-thirds band). Coefficients are seeded per integer mode, so fields
/// drawn on different grids agree on their common modes.
ScalarField random_field(GridPtr grid, std::uint64_t seed, double decay, int kmax = -1);

/// Random state whose components are independent random fields.
State random_state(GridPtr grid, std::uint64_t seed, double decay, int kmax = -1);

/// Random frozen state satisfying non-cavitation with a margin: the elevation
/// is scaled so that min(1 + eps zeta) lies in [h_min, 1].
State random_frozen_state(const Model& model, std::uint64_t seed, double decay);

enum class MonitorStatus { alive, blown_up };

struct BlowUpStatus {
    MonitorStatus status = MonitorStatus::alive;
    double time = 0.0;  ///< first time the criterion held (blown_up only)
};

/// Blown up once x_norm_s exceeds threshold_factor times its initial value or
/// any recorded quantity is non-finite.
BlowUpStatus blow_up_monitor(const std::vector<EnergyReport>& reports, double threshold_factor);
BlowUpStatus blow_up_monitor(const Trajectory& trajectory, double threshold_factor);

struct ResidualCurve {
    std::vector<double> times;
    std::vector<double> lhs;       ///< centered difference of (S0 u, u)
    std::vector<double> rhs;       ///< assembled right-hand side
    std::vector<double> residual;  ///< |lhs - rhs|

    double max_residual() const;
};

/// Compares d/dt (S0(frozen) u, u) with
///   ((d_t S0) u, u) + sum_j ((d_j A~_j) u, u) + 2 eps sum_j (F_j d_j u, u)
/// at every interior sample. Throws TimeRangeError when the trajectories do
/// not share their sample times. d_t of the frozen elevation uses stored
/// rates when present, centered differences otherwise.
ResidualCurve energy_identity_residual(const Model& model, const Trajectory& frozen, const Trajectory& u);

enum class EstimateId { product, commutator_lambda_s, multiplier_bound, commutator_order0, skew_bound };

std::string to_string(EstimateId id);

struct EstimateRatioSample {
    EstimateId id;
    double measured_lhs;
    double measured_rhs_factor;
    double ratio;
};

struct EstimateSuiteOptions {
    double s = 1.0;
    double t0 = 1.01;
    int n_trials = 20;
    std::uint64_t seed = 1;
    /// Random fields live on |k_i| <= N/4, so products of two of them are
    /// computed without aliasing.
    double decay = 3.01;
};

/// Samples every estimate n_trials times. The multiplier bound uses G1 and
/// G2 of the model; the commutator of order 0 uses G1; the skew bound uses a
/// fixed smooth frozen state and reports y_norm(F_j d_j u, s) / x_norm(u, s).
std::vector<EstimateRatioSample> estimate_ratio_suite(const Model& model, const EstimateSuiteOptions& options);

/// Largest ratio per estimate id.
double max_ratio(const std::vector<EstimateRatioSample>& samples, EstimateId id);

/// Smooth deterministic frozen state used by grid-stability checks:
/// zeta = 0.3 cos(x_1) + 0.2 sin(2 x_1), v_i = 0.25 sin(x_i) + 0.1 cos(3 x_i)
/// scaled to the domain length.
State smooth_frozen_state(GridPtr grid);

}  // namespace whitham
