#include "whitham/multipliers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace whitham {

namespace {

double tanh_ratio(double r) {
    if (r < 1e-4) {
        const double r2 = r * r;
        return 1.0 - r2 / 3.0 + 2.0 * r2 * r2 / 15.0;
    }
    return std::tanh(r) / r;
}

double table_lookup(const SymbolSpec& spec, double r) {
    const auto& t = spec.table;
    if (t.size() < 2 || !(spec.table_max > 0.0)) throw std::invalid_argument("custom table needs >= 2 samples and table_max > 0");
    if (r > spec.table_max) throw std::out_of_range("custom table evaluated outside its tabulated range");
    const double pos = r / spec.table_max * static_cast<double>(t.size() - 1);
    const auto i = std::min(static_cast<std::size_t>(pos), t.size() - 2);
    const double w = pos - static_cast<double>(i);
    return (1.0 - w) * t[i] + w * t[i + 1];
}

}  // namespace

std::string to_string(SymbolKind kind) {
    switch (kind) {
        case SymbolKind::identity: return "identity";
        case SymbolKind::sqrt_tanh_ratio: return "sqrt_tanh_ratio";
        case SymbolKind::tanh_ratio: return "tanh_ratio";
        case SymbolKind::inv_helmholtz: return "inv_helmholtz";
        case SymbolKind::bcs_boussinesq: return "bcs_boussinesq";
        case SymbolKind::custom_table: return "custom_table";
    }
    return "unknown";
}

SymbolKind symbol_kind_from_string(const std::string& name) {
    for (auto k : {SymbolKind::identity, SymbolKind::sqrt_tanh_ratio, SymbolKind::tanh_ratio,
                   SymbolKind::inv_helmholtz, SymbolKind::bcs_boussinesq, SymbolKind::custom_table})
        if (to_string(k) == name) return k;
    throw std::invalid_argument("unknown symbol kind '" + name + "'");
}

double radial_eval(const SymbolSpec& spec, double r) {
    r = std::abs(r);
    double g = 1.0;
    switch (spec.kind) {
        case SymbolKind::identity: g = 1.0; break;
        case SymbolKind::tanh_ratio: g = tanh_ratio(r); break;
        case SymbolKind::sqrt_tanh_ratio: g = std::sqrt(tanh_ratio(r)); break;
        case SymbolKind::inv_helmholtz: g = 1.0 / (1.0 + spec.b * r * r); break;
        case SymbolKind::bcs_boussinesq: {
            const double num = 1.0 - spec.a * r * r;
            if (num < 0.0) throw std::domain_error("bcs_boussinesq symbol undefined where 1 - a r^2 < 0");
            g = std::sqrt(num) / (1.0 + spec.b * r * r);
            break;
        }
        case SymbolKind::custom_table: g = table_lookup(spec, r); break;
    }
    return spec.scale * g;
}

double symbol_eval(const SymbolSpec& spec, double mu, const Vec2& xi) {
    return radial_eval(spec, std::sqrt(mu) * std::hypot(xi[0], xi[1]));
}

SymbolTable tabulate(const SymbolSpec& spec, double mu, GridPtr grid) {
    return SymbolTable::tabulate(std::move(grid), [&](const Vec2& xi) { return symbol_eval(spec, mu, xi); });
}

double admissibility_range(const SpectralGrid& grid) { return 4.0 * grid.max_wavenumber(); }

AdmissibilityReport validate_admissible(const MultiplierPair& pair, double mu, double xi_max,
                                        std::size_t n_samples) {
    if (n_samples < 64) throw std::invalid_argument("admissibility check needs at least 64 samples");
    if (!(xi_max > 0.0)) throw std::invalid_argument("admissibility range must be positive");
    constexpr double step = 1e-4;
    constexpr double slack = 1e-12;

    AdmissibilityReport rep;
    rep.xi_max = xi_max;
    rep.xi_min = xi_max * 1e-4;
    rep.min_g1 = INFINITY;
    bool positive = true;

    std::vector<double> samples{0.0};
    const double log_lo = std::log(rep.xi_min), log_hi = std::log(xi_max);
    for (std::size_t i = 0; i < n_samples - 1; ++i)
        samples.push_back(std::exp(log_lo + (log_hi - log_lo) * static_cast<double>(i) /
                                                static_cast<double>(n_samples - 2)));
    rep.n_samples = samples.size();

    const SymbolSpec* specs[2] = {&pair.g1, &pair.g2};
    auto eval = [mu](const SymbolSpec& s, double xi) { return radial_eval(s, std::sqrt(mu) * xi); };
    try {
        for (double xi : samples) {
            double g[2];
            for (int k = 0; k < 2; ++k) {
                g[k] = eval(*specs[k], xi);
                const double grad = (eval(*specs[k], xi + step) - eval(*specs[k], xi - step)) / (2.0 * step);
                const double weighted = std::sqrt(1.0 + xi * xi) * std::abs(grad);
                if (!std::isfinite(g[k]) || !std::isfinite(weighted)) rep.finite = false;
                rep.sup_g[k] = std::max(rep.sup_g[k], std::abs(g[k]));
                rep.sup_weighted_grad[k] = std::max(rep.sup_weighted_grad[k], weighted);
            }
            rep.min_g1 = std::min(rep.min_g1, g[0]);
            if (!(g[0] > 0.0)) positive = false;
            if (std::abs(g[1]) > g[0] * (1.0 + slack)) rep.domination_ok = false;
        }
    } catch (const std::exception&) {
        // custom tables that do not cover the range, or undefined square roots
        rep.finite = false;
    }

    if (!rep.finite) rep.violations.emplace_back("bounded");
    if (!positive) rep.violations.emplace_back("positivity");
    if (!rep.domination_ok) rep.violations.emplace_back("domination");
    return rep;
}

std::string to_string(ConsistencyClass c) {
    switch (c) {
        case ConsistencyClass::order_mu: return "O(mu)";
        case ConsistencyClass::order_mu2_mu_eps: return "O(mu^2+mu*eps)";
        case ConsistencyClass::order_mu_eps: return "O(mu*eps)";
        case ConsistencyClass::unknown: return "unknown";
    }
    return "unknown";
}

const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names{"shallow_water", "abcd", "ddk", "quasilinear_wb", "open_wb"};
    return names;
}

Preset preset(const std::string& name, double a, double b) {
    const SymbolSpec id = SymbolSpec::of(SymbolKind::identity);
    const SymbolSpec sqrt_tanh = SymbolSpec::of(SymbolKind::sqrt_tanh_ratio);
    const SymbolSpec tanh_r = SymbolSpec::of(SymbolKind::tanh_ratio);
    if (name == "shallow_water") return {{id, id}, ConsistencyClass::order_mu};
    if (name == "abcd") {
        SymbolSpec g1 = SymbolSpec::of(SymbolKind::bcs_boussinesq);
        g1.a = a;
        g1.b = b;
        SymbolSpec g2 = SymbolSpec::of(SymbolKind::inv_helmholtz);
        g2.b = b;
        // a > 0 makes G1 vanish at finite frequency; such pairs are only
        // admissible on bounded frequency ranges.
        return {{g1, g2}, ConsistencyClass::order_mu2_mu_eps, a == 0.0};
    }
    if (name == "ddk") return {{sqrt_tanh, tanh_r}, ConsistencyClass::order_mu_eps};
    if (name == "quasilinear_wb") return {{sqrt_tanh, sqrt_tanh}, ConsistencyClass::order_mu_eps};
    if (name == "open_wb") return {{sqrt_tanh, id}, ConsistencyClass::order_mu_eps, false};
    throw std::invalid_argument("unknown preset '" + name + "'");
}

}  // namespace whitham
