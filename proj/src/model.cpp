#include "whitham/model.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

namespace whitham {

// ---------------------------------------------------------------------- State

State::State(GridPtr grid) : zeta(grid) {
    for (int i = 0; i < grid->dim(); ++i) v.emplace_back(grid);
}

State::State(ScalarField zeta_in, VectorField v_in, double t)
    : zeta(std::move(zeta_in)), v(std::move(v_in)), time(t) {
    if (static_cast<int>(v.size()) != zeta.grid().dim())
        throw std::invalid_argument("velocity must have one component per axis");
    for (const auto& c : v)
        if (&c.grid() != &zeta.grid()) throw std::invalid_argument("state components live on different grids");
}

State& State::axpy(double a, const State& x) {
    zeta.axpy(a, x.zeta);
    for (std::size_t i = 0; i < v.size(); ++i) v[i].axpy(a, x.v[i]);
    return *this;
}

State& State::operator*=(double a) {
    zeta *= a;
    for (auto& c : v) c *= a;
    return *this;
}

bool State::all_finite() const {
    return zeta.all_finite() && std::all_of(v.begin(), v.end(), [](const ScalarField& c) { return c.all_finite(); });
}

State operator+(State a, const State& b) { return a += b; }
State operator-(State a, const State& b) { return a -= b; }
State operator*(double a, State s) { return s *= a; }

NonCavitation check_non_cavitation(const ScalarField& zeta, double epsilon, double h_min) {
    double lo = INFINITY;
    for (double z : zeta.values()) lo = std::min(lo, 1.0 + epsilon * z);
    return {lo >= h_min, lo};
}

// ---------------------------------------------------------------------- Model

namespace {

struct SpecState {
    Spectrum z;
    std::vector<Spectrum> v;
};

SpecState to_spec(const State& u) {
    SpecState s{forward(u.zeta), {}};
    for (const auto& c : u.v) s.v.push_back(forward(c));
    return s;
}

State to_state(const SpecState& s, double time = 0.0) {
    VectorField v;
    for (const auto& c : s.v) v.push_back(inverse(c));
    return State(inverse(s.z), std::move(v), time);
}

void require_grid(const SpectralGrid& expected, const State& u) {
    if (&u.grid() != &expected) throw std::invalid_argument("state lives on a different grid than the model");
}

}  // namespace

struct Model::Frozen {
    std::optional<ProductOperator> w;   // G2[v_j]
    std::optional<ProductOperator> z;   // zeta
    std::optional<ProductOperator> dw;  // d_j G2[v_j]
    std::optional<ProductOperator> dz;  // d_j zeta
};

Model::Model(GridPtr grid, ModelParams params)
    : grid_(std::move(grid)),
      params_(std::move(params)),
      g1_(tabulate(params_.pair.g1, params_.mu, grid_)),
      g2_(tabulate(params_.pair.g2, params_.mu, grid_)),
      g1sq_(g1_ * g1_),
      g1inv_(SymbolTable::constant(grid_, 1.0)) {
    if (!(params_.epsilon >= 0.0 && params_.epsilon <= 1.0)) throw std::invalid_argument("epsilon must lie in [0,1]");
    if (!(params_.mu > 0.0 && params_.mu <= 1.0)) throw std::invalid_argument("mu must lie in (0,1]");
    if (!(params_.h_min > 0.0 && params_.h_min <= 1.0)) throw std::invalid_argument("h_min must lie in (0,1]");
    if (g1_.inf() > 0.0) g1inv_ = g1_.pow(-1.0);
}

Model::Frozen Model::freeze(const State& frozen, int j, bool derivatives) const {
    require_grid(*grid_, frozen);
    if (j < 0 || j >= dim()) throw std::invalid_argument("operator index out of range");
    Frozen f;
    const Spectrum w = apply_symbol(g2_, forward(frozen.v[j]));
    const Spectrum z = forward(frozen.zeta);
    f.w.emplace(w);
    f.z.emplace(z);
    if (derivatives) {
        f.dw.emplace(derivative(w, j));
        f.dz.emplace(derivative(z, j));
    }
    return f;
}

State Model::rhs(const State& u) const {
    require_grid(*grid_, u);
    const double eps = params_.epsilon;
    const int d = dim();
    const SpecState s = to_spec(u);

    Spectrum dz(grid_);
    for (int k = 0; k < d; ++k) dz -= derivative(apply_symbol(g1sq_, s.v[k]), k);
    SpecState out{dz, {}};
    for (int i = 0; i < d; ++i) out.v.push_back(-1.0 * derivative(s.z, i));

    if (eps != 0.0) {
        std::vector<Spectrum> w;
        for (int k = 0; k < d; ++k) w.push_back(apply_symbol(g2_, s.v[k]));
        const ProductOperator mz(s.z);
        Spectrum flux_div(grid_);
        for (int k = 0; k < d; ++k) flux_div += derivative(mz(w[k]), k);
        out.z.axpy(-eps, apply_symbol(g2_, flux_div));
        for (int k = 0; k < d; ++k) {
            const ProductOperator mw(w[k]);
            for (int i = 0; i < d; ++i) out.v[i].axpy(-eps, mw(derivative(w[i], k)));
        }
    }
    return to_state(out, u.time);
}

State Model::apply_A(const State& frozen, int j, const State& u) const {
    require_grid(*grid_, u);
    const Frozen f = freeze(frozen, j);
    const double eps = params_.epsilon;
    const SpecState s = to_spec(u);
    SpecState out{apply_symbol(g1sq_, s.v[j]), {}};
    for (int i = 0; i < dim(); ++i) out.v.emplace_back(i == j ? s.z : Spectrum(grid_));
    if (eps != 0.0) {
        out.z.axpy(eps, apply_symbol(g2_, (*f.w)(s.z)));
        out.z.axpy(eps, apply_symbol(g2_, (*f.z)(apply_symbol(g2_, s.v[j]))));
        for (int i = 0; i < dim(); ++i) out.v[i].axpy(eps, (*f.w)(apply_symbol(g2_, s.v[i])));
    }
    return to_state(out);
}

State Model::apply_S0(const State& frozen, const State& u) const {
    require_grid(*grid_, frozen);
    require_grid(*grid_, u);
    const double eps = params_.epsilon;
    const ProductOperator mz(forward(frozen.zeta));
    VectorField v;
    for (const auto& c : u.v) {
        const Spectrum vh = forward(c);
        Spectrum r = apply_symbol(g1sq_, vh);
        if (eps != 0.0) r.axpy(eps, apply_symbol(g2_, mz(apply_symbol(g2_, vh))));
        v.push_back(inverse(r));
    }
    return State(u.zeta, std::move(v), u.time);
}

double Model::quadratic_form(const State& frozen, const State& u) const {
    const State su = apply_S0(frozen, u);
    double q = inner_product(su.zeta, u.zeta);
    for (std::size_t i = 0; i < u.v.size(); ++i) q += inner_product(su.v[i], u.v[i]);
    return q;
}

namespace {

enum class Part { B, B_adjoint, A_tilde, F, dA_tilde };

}  // namespace

// All block operators share one assembly routine; `part` selects which
// combination of the structural pieces is returned.
static State assemble_block(const Model& m, const SymbolTable& g1sq, const SymbolTable& g2, const GridPtr& grid,
                            const std::optional<ProductOperator>& w, const std::optional<ProductOperator>& z,
                            const std::optional<ProductOperator>& dw, const std::optional<ProductOperator>& dz,
                            int j, const State& u, Part part) {
    const double eps = m.epsilon();
    const int d = m.dim();
    const SpecState s = to_spec(u);
    auto G2 = [&](const Spectrum& x) { return apply_symbol(g2, x); };
    auto G1sq = [&](const Spectrum& x) { return apply_symbol(g1sq, x); };
    auto Mw = [&](const Spectrum& x) { return (*w)(x); };
    auto Mz = [&](const Spectrum& x) { return (*z)(x); };
    auto Mdw = [&](const Spectrum& x) { return (*dw)(x); };
    auto Mdz = [&](const Spectrum& x) { return (*dz)(x); };

    // T = G1^2 + eps G2 M_zeta G2 and its x_j-derivative eps G2 M_{d zeta} G2.
    auto T = [&](const Spectrum& x) {
        Spectrum r = G1sq(x);
        if (eps != 0.0) r.axpy(eps, G2(Mz(G2(x))));
        return r;
    };
    auto dT = [&](const Spectrum& x) { return eps * G2(Mdz(G2(x))); };

    // B11 = eps G2 M_w; B22 = eps G1^2 M_w G2 + eps^2 G2 M_zeta G2 M_w G2.
    auto B11 = [&](const Spectrum& x) { return eps * G2(Mw(x)); };
    auto B11_adj = [&](const Spectrum& x) { return eps * Mw(G2(x)); };
    auto B22 = [&](const Spectrum& x) {
        const Spectrum g2x = G2(x);
        const Spectrum wg2x = Mw(g2x);
        Spectrum r = eps * G1sq(wg2x);
        r.axpy(eps * eps, G2(Mz(G2(wg2x))));
        return r;
    };
    auto B22_adj = [&](const Spectrum& x) {
        Spectrum r = eps * G2(Mw(G1sq(x)));
        r.axpy(eps * eps, G2(Mw(G2(Mz(G2(x))))));
        return r;
    };

    SpecState out{Spectrum(grid), {}};
    for (int i = 0; i < d; ++i) out.v.emplace_back(grid);

    switch (part) {
        case Part::B:
        case Part::B_adjoint:
        case Part::A_tilde: {
            const Spectrum t_uz = T(s.z);
            out.z = T(s.v[j]);
            out.v[j] += t_uz;
            if (eps == 0.0) break;
            if (part == Part::B) {
                out.z += B11(s.z);
                for (int i = 0; i < d; ++i) out.v[i] += B22(s.v[i]);
            } else if (part == Part::B_adjoint) {
                out.z += B11_adj(s.z);
                for (int i = 0; i < d; ++i) out.v[i] += B22_adj(s.v[i]);
            } else {
                out.z.axpy(0.5, B11(s.z) + B11_adj(s.z));
                for (int i = 0; i < d; ++i) out.v[i].axpy(0.5, B22(s.v[i]) + B22_adj(s.v[i]));
            }
            break;
        }
        case Part::F: {
            out.z = -0.5 * (G2(Mw(s.z)) - Mw(G2(s.z)));
            for (int i = 0; i < d; ++i) {
                const Spectrum& x = s.v[i];
                Spectrum r = G1sq(Mw(G2(x))) - G2(Mw(G1sq(x)));
                if (eps != 0.0) r.axpy(eps, G2(Mz(G2(Mw(G2(x))))) - G2(Mw(G2(Mz(G2(x))))));
                out.v[i] = -0.5 * r;
            }
            break;
        }
        case Part::dA_tilde: {
            if (eps == 0.0) break;
            out.z = dT(s.v[j]);
            out.v[j] += dT(s.z);
            out.z.axpy(0.5 * eps, G2(Mdw(s.z)) + Mdw(G2(s.z)));
            for (int i = 0; i < d; ++i) {
                const Spectrum& x = s.v[i];
                const Spectrum g2x = G2(x);
                const Spectrum zg2x = G2(Mz(g2x));
                Spectrum r = eps * (G1sq(Mdw(g2x)) + G2(Mdw(G1sq(x))));
                r.axpy(eps * eps, G2(Mdz(G2(Mw(g2x)))) + G2(Mz(G2(Mdw(g2x)))));
                r.axpy(eps * eps, G2(Mdw(zg2x)) + G2(Mw(G2(Mdz(g2x)))));
                out.v[i].axpy(0.5, r);
            }
            break;
        }
    }
    return to_state(out);
}

State Model::apply_B(const State& frozen, int j, const State& u) const {
    require_grid(*grid_, u);
    const Frozen f = freeze(frozen, j);
    return assemble_block(*this, g1sq_, g2_, grid_, f.w, f.z, f.dw, f.dz, j, u, Part::B);
}

State Model::apply_B_adjoint(const State& frozen, int j, const State& u) const {
    require_grid(*grid_, u);
    const Frozen f = freeze(frozen, j);
    return assemble_block(*this, g1sq_, g2_, grid_, f.w, f.z, f.dw, f.dz, j, u, Part::B_adjoint);
}

State Model::apply_A_tilde(const State& frozen, int j, const State& u) const {
    require_grid(*grid_, u);
    const Frozen f = freeze(frozen, j);
    return assemble_block(*this, g1sq_, g2_, grid_, f.w, f.z, f.dw, f.dz, j, u, Part::A_tilde);
}

State Model::apply_F(const State& frozen, int j, const State& u) const {
    require_grid(*grid_, u);
    const Frozen f = freeze(frozen, j);
    return assemble_block(*this, g1sq_, g2_, grid_, f.w, f.z, f.dw, f.dz, j, u, Part::F);
}

SymmetricSplit Model::split_symmetric(const State& frozen, int j, const State& u) const {
    require_grid(*grid_, u);
    const Frozen f = freeze(frozen, j);
    return {assemble_block(*this, g1sq_, g2_, grid_, f.w, f.z, f.dw, f.dz, j, u, Part::A_tilde),
            assemble_block(*this, g1sq_, g2_, grid_, f.w, f.z, f.dw, f.dz, j, u, Part::F)};
}

State Model::apply_dA_tilde(const State& frozen, int j, const State& u) const {
    require_grid(*grid_, u);
    const Frozen f = freeze(frozen, j, true);
    return assemble_block(*this, g1sq_, g2_, grid_, f.w, f.z, f.dw, f.dz, j, u, Part::dA_tilde);
}

State Model::apply_dt_S0(const ScalarField& frozen_zeta_dt, const State& u) const {
    require_grid(*grid_, u);
    const double eps = params_.epsilon;
    const ProductOperator mzt(forward(frozen_zeta_dt));
    State out(grid_);
    out.time = u.time;
    if (eps == 0.0) return out;
    for (std::size_t i = 0; i < u.v.size(); ++i)
        out.v[i] = inverse(eps * apply_symbol(g2_, mzt(apply_symbol(g2_, forward(u.v[i])))));
    return out;
}

double Model::x_norm(const State& u, double s) const {
    double vv = 0.0;
    for (const auto& c : u.v) {
        const double n = sobolev_norm(apply_symbol(g1_, forward(c)), s);
        vv += n * n;
    }
    return sobolev_norm(u.zeta, s) + std::sqrt(vv);
}

double Model::y_norm(const State& u, double s) const {
    if (!(g1_.inf() > 0.0)) throw std::domain_error("Y norm requires G1 > 0 on every grid mode");
    double vv = 0.0;
    for (const auto& c : u.v) {
        const double n = sobolev_norm(apply_symbol(g1inv_, forward(c)), s);
        vv += n * n;
    }
    return sobolev_norm(u.zeta, s) + std::sqrt(vv);
}

double Model::max_velocity(const State& u) const {
    std::vector<double> mag2(grid_->size(), 0.0);
    for (const auto& c : u.v) {
        const ScalarField w = apply_symbol(g2_, c);
        for (std::size_t p = 0; p < mag2.size(); ++p) mag2[p] += w[p] * w[p];
    }
    double m = 0.0;
    for (double x : mag2) m = std::max(m, x);
    return std::sqrt(m);
}

ScalarField Model::apply_g1_inverse(const ScalarField& f) const {
    if (!(g1_.inf() > 0.0)) throw std::domain_error("G1 vanishes on a grid mode");
    return apply_symbol(g1inv_, f);
}

}  // namespace whitham
