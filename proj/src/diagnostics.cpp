#include "whitham/diagnostics.hpp"

#include "whitham/errors.hpp"
#include "whitham/timestepper.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace whitham {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t mode_seed(std::uint64_t seed, int kx, int ky) {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ static_cast<std::uint64_t>(static_cast<std::int64_t>(kx)));
    return splitmix64(h ^ (static_cast<std::uint64_t>(static_cast<std::int64_t>(ky)) << 32));
}

// Uniform in (0, 1] from the top 53 bits.
double unit_uniform(std::uint64_t bits) {
    return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

// Box-Muller pair; written out so that fields are identical across standard
// library implementations.
std::pair<double, double> gaussian_pair(std::uint64_t seed) {
    const double u1 = unit_uniform(splitmix64(seed));
    const double u2 = unit_uniform(splitmix64(seed ^ 0x5851f42d4c957f2dULL));
    const double r = std::sqrt(-2.0 * std::log(u1));
    return {r * std::cos(2.0 * std::numbers::pi * u2), r * std::sin(2.0 * std::numbers::pi * u2)};
}

std::size_t mode_index(const SpectralGrid& grid, int kx, int ky) {
    const int n = static_cast<int>(grid.points_per_dim());
    auto wrap = [n](int k) { return static_cast<std::size_t>(k < 0 ? k + n : k); };
    return grid.dim() == 1 ? wrap(kx) : wrap(kx) * grid.points_per_dim() + wrap(ky);
}

double field_inner(const State& a, const State& b) {
    double s = inner_product(a.zeta, b.zeta);
    for (std::size_t i = 0; i < a.v.size(); ++i) s += inner_product(a.v[i], b.v[i]);
    return s;
}

State derivative_state(const State& u, int j) {
    VectorField v;
    for (const auto& c : u.v) v.push_back(spectral_derivative(c, j));
    return State(spectral_derivative(u.zeta, j), std::move(v), u.time);
}

bool same_time(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)); }

}  // namespace

double default_t0(int dim) { return 0.5 * dim + 0.51; }

bool EnergyReport::all_finite() const {
    for (double x : {time, x_norm_0, x_norm_t0, x_norm_t0p1, x_norm_s, y_norm_0, quad_form, min_depth, max_velocity})
        if (!std::isfinite(x)) return false;
    return true;
}

EnergyReport energy_report(const Model& model, const State& u, const NormLadder& ladder) {
    EnergyReport r;
    r.time = u.time;
    r.x_norm_0 = model.x_norm(u, 0.0);
    r.x_norm_t0 = model.x_norm(u, ladder.t0);
    r.x_norm_t0p1 = model.x_norm(u, ladder.t0 + 1.0);
    r.x_norm_s = model.x_norm(u, ladder.s);
    r.y_norm_0 = model.y_norm(u, 0.0);
    r.quad_form = model.quadratic_form(u, u);
    r.min_depth = check_non_cavitation(u.zeta, model.epsilon(), model.params().h_min).min_depth;
    r.max_velocity = model.max_velocity(u);
    return r;
}

double coercivity_margin(const Model& model, const State& frozen, const State& u) {
    double g1v = 0.0;
    for (const auto& c : u.v) {
        const double n = sobolev_norm(apply_symbol(model.g1(), forward(c)), 0.0);
        g1v += n * n;
    }
    const double z = sobolev_norm(u.zeta, 0.0);
    return model.quadratic_form(frozen, u) - (z * z + model.params().h_min * g1v);
}

CoercivityResult coercivity_check(const Model& model, int n_trials, std::uint64_t seed) {
    CoercivityResult res;
    res.worst_margin = INFINITY;
    res.worst_relative_margin = INFINITY;
    const double decay = default_t0(model.dim()) + 2.0;
    for (int t = 0; t < n_trials; ++t) {
        const std::uint64_t base = splitmix64(seed + 2 * static_cast<std::uint64_t>(t));
        const State frozen = random_frozen_state(model, base, decay);
        const State u = random_state(model.grid_ptr(), base ^ 0xa5a5a5a5ULL, decay);
        const double margin = coercivity_margin(model, frozen, u);
        const double scale = model.x_norm(u, 0.0);
        if (margin < res.worst_margin) res.worst_margin = margin;
        res.worst_relative_margin = std::min(res.worst_relative_margin, margin / (scale * scale));
        ++res.trials;
    }
    return res;
}

ScalarField random_field(GridPtr grid, std::uint64_t seed, double decay, int kmax) {
    const int n = static_cast<int>(grid->points_per_dim());
    if (kmax < 0) kmax = n / 3;
    kmax = std::min(kmax, n / 2 - 1);
    Spectrum s(grid);
    const int ky_max = grid->dim() == 2 ? kmax : 0;
    for (int kx = 0; kx <= kmax; ++kx) {
        for (int ky = -ky_max; ky <= ky_max; ++ky) {
            // canonical half: kx > 0, or kx == 0 and ky >= 0
            if (kx == 0 && ky < 0) continue;
            const std::size_t m = mode_index(*grid, kx, ky);
            const double sigma = std::pow(1.0 + grid->wavenumber_squared(m), -0.5 * decay);
            const auto [a, b] = gaussian_pair(mode_seed(seed, kx, ky));
            if (kx == 0 && ky == 0) {
                s[m] = sigma * a;
                continue;
            }
            const Complex c = sigma * Complex(a, b) / std::numbers::sqrt2;
            s[m] = c;
            s[mode_index(*grid, -kx, -ky)] = std::conj(c);
        }
    }
    return inverse(s);
}

State random_state(GridPtr grid, std::uint64_t seed, double decay, int kmax) {
    State u(grid);
    u.zeta = random_field(grid, splitmix64(seed), decay, kmax);
    for (int i = 0; i < grid->dim(); ++i)
        u.v[i] = random_field(grid, splitmix64(seed + 1 + static_cast<std::uint64_t>(i)), decay, kmax);
    return u;
}

State random_frozen_state(const Model& model, std::uint64_t seed, double decay) {
    State frozen = random_state(model.grid_ptr(), seed, decay);
    const double eps = model.epsilon();
    const double h_min = model.params().h_min;
    const double lo = min_value(frozen.zeta);
    if (eps > 0.0 && lo < 0.0) {
        // target minimum depth drawn uniformly in [h_min, 1]
        const double target = h_min + (1.0 - h_min) * (unit_uniform(splitmix64(seed ^ 0x1234567ULL)) - 0x1.0p-53);
        frozen.zeta *= (1.0 - target) / (eps * -lo);
    }
    return frozen;
}

BlowUpStatus blow_up_monitor(const std::vector<EnergyReport>& reports, double threshold_factor) {
    if (reports.empty()) return {};
    const double initial = reports.front().x_norm_s;
    for (const auto& r : reports) {
        if (!r.all_finite() || r.x_norm_s > threshold_factor * initial) return {MonitorStatus::blown_up, r.time};
    }
    return {};
}

BlowUpStatus blow_up_monitor(const Trajectory& trajectory, double threshold_factor) {
    if (trajectory.outcome == RunOutcome::blown_up || trajectory.outcome == RunOutcome::non_finite)
        return {MonitorStatus::blown_up, trajectory.blowup_time};
    return blow_up_monitor(trajectory.reports, threshold_factor);
}

double ResidualCurve::max_residual() const {
    double m = 0.0;
    for (double r : residual) m = std::max(m, r);
    return m;
}

ResidualCurve energy_identity_residual(const Model& model, const Trajectory& frozen, const Trajectory& u) {
    if (frozen.times.size() != u.times.size())
        throw TimeRangeError("energy identity needs trajectories sampled at the same times");
    for (std::size_t n = 0; n < u.times.size(); ++n)
        if (!same_time(frozen.times[n], u.times[n]))
            throw TimeRangeError("energy identity needs trajectories sampled at the same times");

    const double eps = model.epsilon();
    const std::size_t count = u.times.size();
    std::vector<double> q(count);
    for (std::size_t n = 0; n < count; ++n) q[n] = model.quadratic_form(frozen.states[n], u.states[n]);

    ResidualCurve curve;
    for (std::size_t n = 1; n + 1 < count; ++n) {
        const double span = u.times[n + 1] - u.times[n - 1];
        const double lhs = (q[n + 1] - q[n - 1]) / span;

        const State& fr = frozen.states[n];
        const State& un = u.states[n];
        ScalarField zeta_dt = frozen.has_rates()
                                  ? frozen.rates[n].zeta
                                  : (1.0 / span) * (frozen.states[n + 1].zeta - frozen.states[n - 1].zeta);
        double rhs = field_inner(model.apply_dt_S0(zeta_dt, un), un);
        for (int j = 0; j < model.dim(); ++j) {
            rhs += field_inner(model.apply_dA_tilde(fr, j, un), un);
            if (eps != 0.0) rhs += 2.0 * eps * field_inner(model.apply_F(fr, j, derivative_state(un, j)), un);
        }
        curve.times.push_back(u.times[n]);
        curve.lhs.push_back(lhs);
        curve.rhs.push_back(rhs);
        curve.residual.push_back(std::abs(lhs - rhs));
    }
    return curve;
}

std::string to_string(EstimateId id) {
    switch (id) {
        case EstimateId::product: return "product";
        case EstimateId::commutator_lambda_s: return "commutator_lambda_s";
        case EstimateId::multiplier_bound: return "multiplier_bound";
        case EstimateId::commutator_order0: return "commutator_order0";
        case EstimateId::skew_bound: return "skew_bound";
    }
    return "unknown";
}

State smooth_frozen_state(GridPtr grid) {
    const double k = 2.0 * std::numbers::pi / grid->length();
    const int d = grid->dim();
    State u(grid);
    u.zeta = ScalarField::sample(grid, [&](const Vec2& x) {
        double z = 0.3 * std::cos(k * x[0]) + 0.2 * std::sin(2.0 * k * x[0]);
        if (d == 2) z += 0.15 * std::cos(k * x[1]);
        return z;
    });
    for (int i = 0; i < d; ++i)
        u.v[i] = ScalarField::sample(
            grid, [&](const Vec2& x) { return 0.25 * std::sin(k * x[i]) + 0.1 * std::cos(3.0 * k * x[i]); });
    return u;
}

std::vector<EstimateRatioSample> estimate_ratio_suite(const Model& model, const EstimateSuiteOptions& o) {
    const GridPtr grid = model.grid_ptr();
    const int kmax = static_cast<int>(grid->points_per_dim() / 4);
    const double s = o.s, t0 = o.t0;
    const SymbolTable lambda_s =
        SymbolTable::tabulate(grid, [s](const Vec2& xi) { return std::pow(1.0 + xi[0] * xi[0] + xi[1] * xi[1], 0.5 * s); });
    const State frozen = smooth_frozen_state(grid);

    auto pointwise = [](ScalarField a, const ScalarField& b) {
        for (std::size_t i = 0; i < a.size(); ++i) a[i] *= b[i];
        return a;
    };
    std::vector<EstimateRatioSample> out;
    auto record = [&out](EstimateId id, double lhs, double rhs) { out.push_back({id, lhs, rhs, lhs / rhs}); };

    for (int t = 0; t < o.n_trials; ++t) {
        const std::uint64_t base = splitmix64(o.seed * 7919 + static_cast<std::uint64_t>(t));
        ScalarField f = random_field(grid, base, o.decay, kmax);
        ScalarField g = random_field(grid, base ^ 0x9e3779b9ULL, o.decay, kmax);
        f *= 1.0 / sobolev_norm(f, 0.0);
        g *= 1.0 / sobolev_norm(g, 0.0);
        const ScalarField fg = pointwise(f, g);

        record(EstimateId::product, sobolev_norm(fg, s), sobolev_norm(f, std::max(t0, s)) * sobolev_norm(g, s));

        const double comm_rhs = sobolev_norm(f, std::max(t0 + 1.0, s)) * sobolev_norm(g, s - 1.0);
        const ScalarField lam = apply_symbol(lambda_s, fg) - pointwise(f, apply_symbol(lambda_s, g));
        record(EstimateId::commutator_lambda_s, sobolev_norm(lam, 0.0), comm_rhs);

        for (const SymbolTable* sym : {&model.g1(), &model.g2()})
            record(EstimateId::multiplier_bound, sobolev_norm(apply_symbol(*sym, f), s), sobolev_norm(f, s));

        const ScalarField c0 = apply_symbol(model.g1(), fg) - pointwise(f, apply_symbol(model.g1(), g));
        record(EstimateId::commutator_order0, sobolev_norm(c0, s), comm_rhs);

        const State u = random_state(grid, base ^ 0x51ed27ULL, o.decay, kmax);
        for (int j = 0; j < model.dim(); ++j) {
            const State fu = model.apply_F(frozen, j, derivative_state(u, j));
            record(EstimateId::skew_bound, model.y_norm(fu, s), model.x_norm(u, s));
        }
    }
    return out;
}

double max_ratio(const std::vector<EstimateRatioSample>& samples, EstimateId id) {
    double m = 0.0;
    for (const auto& x : samples)
        if (x.id == id) m = std::max(m, x.ratio);
    return m;
}

}  // namespace whitham
