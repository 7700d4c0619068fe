/// @file multipliers.hpp
/// @brief Radial Fourier multiplier symbols, the model zoo presets and the
/// sampled admissibility check for a pair (G1, G2).
///
/// Every catalog symbol is radial: G(xi) = g(r) with r = sqrt(mu) |xi|.
#pragma once

#include "whitham/spectral.hpp"

#include <string>
#include <vector>

namespace whitham {

enum class SymbolKind { identity, sqrt_tanh_ratio, tanh_ratio, inv_helmholtz, bcs_boussinesq, custom_table };

std::string to_string(SymbolKind kind);
/// Throws std::invalid_argument for unknown names.
SymbolKind symbol_kind_from_string(const std::string& name);

struct SymbolSpec {
    SymbolKind kind = SymbolKind::identity;
    double a = 0.0;      ///< bcs_boussinesq numerator parameter
    double b = 0.0;      ///< inv_helmholtz / bcs_boussinesq denominator parameter
    double scale = 1.0;  ///< constant factor applied to the symbol
    /// custom_table: samples of g at r = i * table_max / (n - 1).
    std::vector<double> table;
    double table_max = 0.0;

    static SymbolSpec of(SymbolKind k) {
        SymbolSpec s;
        s.kind = k;
        return s;
    }
    bool operator==(const SymbolSpec&) const = default;
};

struct MultiplierPair {
    SymbolSpec g1;
    SymbolSpec g2;
    bool operator==(const MultiplierPair&) const = default;
};

/// Evaluates g(r) for the unscaled radial variable r = sqrt(mu)|xi| >= 0.
/// Throws std::out_of_range for custom tables evaluated beyond table_max and
/// std::domain_error where bcs_boussinesq has 1 - a r^2 < 0.
double radial_eval(const SymbolSpec& spec, double r);

/// G^mu(xi) = g(sqrt(mu) |xi|).
double symbol_eval(const SymbolSpec& spec, double mu, const Vec2& xi);

/// Tabulates G^mu on every mode of the grid.
SymbolTable tabulate(const SymbolSpec& spec, double mu, GridPtr grid);

struct AdmissibilityReport {
    double sup_g[2] = {0.0, 0.0};
    double sup_weighted_grad[2] = {0.0, 0.0};
    double min_g1 = 0.0;
    bool domination_ok = true;
    bool finite = true;
    std::size_t n_samples = 0;
    double xi_min = 0.0;  ///< smallest nonzero sampled |xi|; |xi| = 0 is always sampled too
    double xi_max = 0.0;
    /// Names of violated clauses: "bounded", "positivity", "domination".
    std::vector<std::string> violations;

    bool pass() const { return violations.empty(); }
};

/// Samples |xi| log-spaced on [xi_max * 1e-4, xi_max] plus |xi| = 0. The
/// gradient is a centered difference with step 1e-4 in |xi|.
AdmissibilityReport validate_admissible(const MultiplierPair& pair, double mu, double xi_max,
                                        std::size_t n_samples = 512);

/// Sampling range used for a grid: four times its largest wavenumber.
double admissibility_range(const SpectralGrid& grid);

enum class ConsistencyClass { order_mu, order_mu2_mu_eps, order_mu_eps, unknown };

std::string to_string(ConsistencyClass c);

struct Preset {
    MultiplierPair pair;
    ConsistencyClass consistency;
    /// False for pairs that fail the admissibility definition by design.
    bool admissible_by_design = true;
};

/// Known names: shallow_water, abcd, ddk, quasilinear_wb, open_wb.
/// `a` and `b` are used by abcd only (defaults a = 0, b = 1/3).
Preset preset(const std::string& name, double a = 0.0, double b = 1.0 / 3.0);

const std::vector<std::string>& preset_names();

}  // namespace whitham
