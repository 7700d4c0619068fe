/// @file model.hpp
/// @brief The quasi-linear system with Fourier multipliers
///
///   d_t zeta + G1^2 div v + eps G2 div(zeta G2[v]) = 0,
///   d_t v    + grad zeta  + eps (G2[v] . grad) G2[v] = 0,
///
/// its matricial operators A_j(U), the symmetrizer S0(U), the blocks
/// B_j = S0 A_j with their symmetric part A~_j and skew part F_j, and the
/// energy norms X^s and Y^s.
///
/// Every product is dealiased: M_f[g] = P(Pf . Pg) with P the two-thirds
/// projection. M_f is self-adjoint in the discrete L^2 product, so adjoints
/// of compositions are obtained by reversing the composition order.
/// Operators A_j act on undifferentiated arguments; callers compose them
/// with spectral_derivative.
#pragma once

#include "whitham/multipliers.hpp"
#include "whitham/spectral.hpp"

#include <utility>

namespace whitham {

/// U = (zeta, v) on one grid; v has one component per axis.
struct State {
    ScalarField zeta;
    VectorField v;
    double time = 0.0;

    /// Zero state.
    explicit State(GridPtr grid);
    State(ScalarField zeta, VectorField v, double time = 0.0);

    const SpectralGrid& grid() const { return zeta.grid(); }
    const GridPtr& grid_ptr() const { return zeta.grid_ptr(); }
    int dim() const { return zeta.grid().dim(); }

    /// this += a * x (time is left untouched).
    State& axpy(double a, const State& x);
    State& operator+=(const State& x) { return axpy(1.0, x); }
    State& operator-=(const State& x) { return axpy(-1.0, x); }
    State& operator*=(double a);

    bool all_finite() const;
};

State operator+(State a, const State& b);
State operator-(State a, const State& b);
State operator*(double a, State s);

struct ModelParams {
    MultiplierPair pair;
    double epsilon = 0.1;  ///< in [0, 1]; 0 gives the linear system
    double mu = 1.0;       ///< in (0, 1]
    double h_min = 0.5;    ///< in (0, 1)
};

struct NonCavitation {
    bool ok;
    double min_depth;  ///< min over the grid of 1 + eps zeta
};

NonCavitation check_non_cavitation(const ScalarField& zeta, double epsilon, double h_min);

/// Symmetric and skew parts of B_j: B_j = sym - eps * skew.
struct SymmetricSplit {
    State sym;   ///< A~_j[u]
    State skew;  ///< F_j[u]
};

class Model {
public:
    /// Tabulates the multipliers on `grid`. Throws std::invalid_argument when
    /// parameters are out of range and NonFiniteError for non-finite symbols.
    Model(GridPtr grid, ModelParams params);

    const ModelParams& params() const { return params_; }
    const GridPtr& grid_ptr() const { return grid_; }
    const SpectralGrid& grid() const { return *grid_; }
    int dim() const { return grid_->dim(); }
    double epsilon() const { return params_.epsilon; }

    const SymbolTable& g1() const { return g1_; }
    const SymbolTable& g2() const { return g2_; }
    const SymbolTable& g1_squared() const { return g1sq_; }

    /// Time derivative d_t U of the nonlinear system.
    State rhs(const State& u) const;

    /// A_j(frozen)[u].
    State apply_A(const State& frozen, int j, const State& u) const;
    /// S0(frozen)[u] = (u_zeta, (G1^2 + eps G2[zeta G2[.]]) u_v).
    State apply_S0(const State& frozen, const State& u) const;
    /// (S0(frozen) u, u)_2.
    double quadratic_form(const State& frozen, const State& u) const;

    State apply_B(const State& frozen, int j, const State& u) const;
    State apply_B_adjoint(const State& frozen, int j, const State& u) const;
    State apply_A_tilde(const State& frozen, int j, const State& u) const;
    /// F_j[u] = -(B_j - B_j^*)[u] / (2 eps), assembled without dividing by eps.
    State apply_F(const State& frozen, int j, const State& u) const;
    SymmetricSplit split_symmetric(const State& frozen, int j, const State& u) const;

    /// (d_j A~_j)(frozen)[u]: A~_j with its coefficients differentiated along x_j.
    State apply_dA_tilde(const State& frozen, int j, const State& u) const;
    /// (d_t S0)[u] given the time derivative of the frozen elevation.
    State apply_dt_S0(const ScalarField& frozen_zeta_dt, const State& u) const;

    /// |zeta|_{H^s} + |G1 v|_{H^s}.
    double x_norm(const State& u, double s) const;
    /// |zeta|_{H^s} + |G1^{-1} v|_{H^s}.
    double y_norm(const State& u, double s) const;
    /// sup over the grid of |G2[v]|.
    double max_velocity(const State& u) const;

    /// Applies G1^{-1} to v: produces the velocity of a right-moving wave
    /// in d = 1 when applied to the elevation.
    ScalarField apply_g1_inverse(const ScalarField& f) const;

private:
    struct Frozen;
    Frozen freeze(const State& frozen, int j, bool derivatives = false) const;

    GridPtr grid_;
    ModelParams params_;
    SymbolTable g1_, g2_, g1sq_, g1inv_;
};

}  // namespace whitham
