/// @file config.hpp
/// @brief Run and study configuration: JSON schema, validation and the
/// builders that turn a config into grid, model, initial state and stepper.
#pragma once

#include "whitham/errors.hpp"
#include "whitham/multipliers.hpp"
#include "whitham/timestepper.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace whitham {

struct ModelSpec {
    std::string preset = "shallow_water";
    double a = 0.0;        ///< abcd only
    double b = 1.0 / 3.0;  ///< abcd only
    /// Explicit pair; overrides `preset` when set.
    std::optional<MultiplierPair> custom;
    bool operator==(const ModelSpec&) const = default;
};

enum class InitialKind { gaussian, cosine, random, file };
enum class VelocityProfile { zero, right_moving };

const char* to_string(InitialKind kind);
const char* to_string(VelocityProfile profile);

struct InitialSpec {
    InitialKind kind = InitialKind::gaussian;
    double amplitude = 0.5;
    std::vector<double> center;  ///< empty means the domain centre
    double width = 1.0;
    int mode = 1;         ///< cosine wavenumber along the first axis
    double decay = 3.01;  ///< random fields only
    VelocityProfile velocity = VelocityProfile::zero;
    /// When set, the state is rescaled so that x_norm(u, s) equals it.
    std::optional<double> target_norm;
    std::string path;  ///< snapshot file for kind = file
    bool operator==(const InitialSpec&) const = default;
};

struct OutputSpec {
    std::string dir = "out";
    int csv_cadence = 1;       ///< steps between CSV rows
    int snapshot_cadence = 0;  ///< steps between snapshots; 0 writes initial and final only
    double blowup_factor = 100.0;
    bool operator==(const OutputSpec&) const = default;
};

struct RunConfig {
    ModelSpec model;
    int dim = 1;
    int N = 64;
    double L = 6.283185307179586;
    double mu = 1.0;
    double epsilon = 0.1;
    double h_min = 0.5;
    double s = 2.01;   ///< norm index, defaults to d/2 + 1.51
    double t0 = 1.01;  ///< Sobolev threshold, defaults to d/2 + 0.51
    double t_end_over_eps = 1.0;
    StepperConfig stepper;  ///< stepper.t_end is ignored; see stepper_config()
    InitialSpec initial;
    std::uint64_t seed = 0;
    OutputSpec output;

    /// Defaults with s and t0 adapted to the dimension.
    static RunConfig defaults(int dim);
    bool operator==(const RunConfig&) const = default;
};

/// Parses JSON text. Syntax errors raise ConfigParseError with the line;
/// unknown keys and ill-typed values raise ConfigValidationError. No
/// semantic validation is performed.
RunConfig parse_config(const std::string& text);

/// Reads, parses and validates; throws ConfigValidationError listing every
/// violation.
RunConfig load_config(const std::string& path);

std::string to_json(const RunConfig& config);
void save_config(const RunConfig& config, const std::string& path);

struct ValidationReport {
    std::vector<Violation> violations;
    std::vector<std::string> warnings;
    std::optional<AdmissibilityReport> admissibility;
    std::optional<NonCavitation> non_cavitation;
    bool ok() const { return violations.empty(); }
};

/// Range checks, admissibility of the pair on the grid, non-cavitation of
/// the initial data. s <= d/2 + 1 is a warning only.
ValidationReport validate(const RunConfig& config);

MultiplierPair resolve_pair(const ModelSpec& spec);
GridPtr build_grid(const RunConfig& config);
ModelParams model_params(const RunConfig& config);
State initial_state(const RunConfig& config, const Model& model);
/// Stepper settings with t_end = t_end_over_eps / epsilon (t_end_over_eps
/// itself when epsilon = 0).
StepperConfig stepper_config(const RunConfig& config);
RunControl run_control(const RunConfig& config);

// ----------------------------------------------------------------- studies

enum class StudyKind { energy_growth, timescale, stability, mu_scaling, convergence };
const char* to_string(StudyKind kind);

struct FitOptions {
    double lower = 1.1;  ///< fit window starts once x_norm_s / initial exceeds this
    double upper = 4.0;  ///< and ends once it exceeds this
    bool operator==(const FitOptions&) const = default;
};

struct StudySpec {
    StudyKind kind = StudyKind::energy_growth;
    RunConfig base;
    std::vector<double> epsilons;
    std::vector<double> mus;
    std::vector<int> grid_sizes;
    std::vector<double> dts;
    std::string compare_model = "shallow_water";  ///< model B of stability and mu_scaling
    double t_target = 0.5;                        ///< timescale runs go to t_target / epsilon
    FitOptions fit;
    bool operator==(const StudySpec&) const = default;
};

StudySpec parse_study(const std::string& text);
StudySpec load_study(const std::string& path);
std::string to_json(const StudySpec& spec);

}  // namespace whitham
