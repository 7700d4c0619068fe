#include "test_support.hpp"

#include "whitham/errors.hpp"
#include "whitham/experiments.hpp"
#include "whitham/multipliers.hpp"

#include "json.hpp"

#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <numbers>

using namespace whitham;
using namespace test_support;

namespace {

constexpr double pi = std::numbers::pi;

Model ddk_model(int dim, std::size_t n, double eps, double mu = 1.0) {
    ModelParams p;
    p.pair = preset("ddk").pair;
    p.epsilon = eps;
    p.mu = mu;
    return Model(make_grid(dim, n, 2 * pi), p);
}

// frequency of the linear DDK system, written out from the dispersion relation
double ddk_omega(double k, double mu) { return k * std::sqrt(std::tanh(std::sqrt(mu) * k) / (std::sqrt(mu) * k)); }

RunConfig bump_config(const std::string& model, double eps, double mu, double t_over_eps) {
    RunConfig c = RunConfig::defaults(1);
    c.model.preset = model;
    c.N = 64;
    c.epsilon = eps;
    c.mu = mu;
    c.t_end_over_eps = t_over_eps;
    c.initial.amplitude = 0.5;
    c.initial.width = 1.5;
    c.initial.velocity = VelocityProfile::right_moving;
    return c;
}

class ThreadEnv {
public:
    explicit ThreadEnv(const char* value) {
        if (const char* old = std::getenv("WHITHAM_LAB_THREADS")) saved_ = old;
        if (value)
            ::setenv("WHITHAM_LAB_THREADS", value, 1);
        else
            ::unsetenv("WHITHAM_LAB_THREADS");
    }
    ~ThreadEnv() {
        if (saved_.empty())
            ::unsetenv("WHITHAM_LAB_THREADS");
        else
            ::setenv("WHITHAM_LAB_THREADS", saved_.c_str(), 1);
    }

private:
    std::string saved_;
};

}  // namespace

// ---------------------------------------------------------------- parallel

TEST(Parallel, VisitsEveryIndexOnce) {
    std::vector<std::atomic<int>> hits(257);
    parallel_for(hits.size(), 8, [&](std::size_t i) { hits[i]++; });
    for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
}

TEST(Parallel, PropagatesExceptions) {
    EXPECT_THROW(parallel_for(10, 4,
                              [](std::size_t i) {
                                  if (i == 7) throw StudyError("seven");
                              }),
                 StudyError);
}

TEST(Parallel, ZeroItemsIsNoop) {
    parallel_for(0, 4, [](std::size_t) { FAIL(); });
}

TEST(Parallel, ThreadCapFromEnvironment) {
    {
        ThreadEnv env("3");
        EXPECT_EQ(sweep_threads(), 3);
    }
    {
        ThreadEnv env("garbage");
        EXPECT_GE(sweep_threads(), 1);
    }
    {
        ThreadEnv env(nullptr);
        EXPECT_GE(sweep_threads(), 1);
    }
}

// ------------------------------------------------------------ linear exact

TEST(LinearExact, IdentityAtTimeZero) {
    const Model m = ddk_model(1, 32, 0.0);
    const State u = random_state(m.grid_ptr(), 3, 2.0);
    EXPECT_LT(max_abs_diff(linear_exact(m, u, 0.0), u), 1e-14);
}

TEST(LinearExact, SingleModeMatchesClosedForm) {
    for (double mu : {0.1, 1.0}) {
        const Model m = ddk_model(1, 32, 0.0, mu);
        const double k = 3.0, w = ddk_omega(k, mu), t = 0.77;
        State u(m.grid_ptr());
        u.zeta = ScalarField::sample(m.grid_ptr(), [&](const Vec2& x) { return std::cos(k * x[0]); });
        const State e = linear_exact(m, u, t);
        const ScalarField z = ScalarField::sample(
            m.grid_ptr(), [&](const Vec2& x) { return std::cos(k * x[0]) * std::cos(w * t); });
        const ScalarField v = ScalarField::sample(
            m.grid_ptr(), [&](const Vec2& x) { return k / w * std::sin(k * x[0]) * std::sin(w * t); });
        EXPECT_LT(max_abs_diff(samples(e.zeta), samples(z)), 1e-13);
        EXPECT_LT(max_abs_diff(samples(e.v[0]), samples(v)), 1e-13);
        EXPECT_DOUBLE_EQ(e.time, t);
    }
}

TEST(LinearExact, ObliqueModeIn2D) {
    const Model m = ddk_model(2, 16, 0.0);
    const double k1 = 2, k2 = 1, r = std::hypot(k1, k2), w = ddk_omega(r, 1.0), t = 1.3;
    State u(m.grid_ptr());
    u.zeta = ScalarField::sample(m.grid_ptr(), [&](const Vec2& x) { return std::cos(k1 * x[0] + k2 * x[1]); });
    // a divergence-free velocity component does not move
    u.v[0] = ScalarField::sample(m.grid_ptr(), [&](const Vec2& x) { return -k2 * std::cos(k1 * x[0] + k2 * x[1]); });
    u.v[1] = ScalarField::sample(m.grid_ptr(), [&](const Vec2& x) { return k1 * std::cos(k1 * x[0] + k2 * x[1]); });
    const State e = linear_exact(m, u, t);
    auto phase = [&](const Vec2& x) { return k1 * x[0] + k2 * x[1]; };
    const ScalarField z =
        ScalarField::sample(m.grid_ptr(), [&](const Vec2& x) { return std::cos(phase(x)) * std::cos(w * t); });
    const ScalarField v0 = ScalarField::sample(m.grid_ptr(), [&](const Vec2& x) {
        return k1 / w * std::sin(phase(x)) * std::sin(w * t) - k2 * std::cos(phase(x));
    });
    const ScalarField v1 = ScalarField::sample(m.grid_ptr(), [&](const Vec2& x) {
        return k2 / w * std::sin(phase(x)) * std::sin(w * t) + k1 * std::cos(phase(x));
    });
    EXPECT_LT(max_abs_diff(samples(e.zeta), samples(z)), 1e-13);
    EXPECT_LT(max_abs_diff(samples(e.v[0]), samples(v0)), 1e-13);
    EXPECT_LT(max_abs_diff(samples(e.v[1]), samples(v1)), 1e-13);
}

TEST(LinearExact, SatisfiesTheLinearSystem) {
    const Model m = ddk_model(1, 32, 0.0);
    const State u = random_state(m.grid_ptr(), 8, 2.0);
    const double t = 0.4, h = 1e-4;
    const State dt = (1.0 / (2 * h)) * (linear_exact(m, u, t + h) - linear_exact(m, u, t - h));
    const State r = m.rhs(linear_exact(m, u, t));
    EXPECT_LT(max_abs_diff(dt, r), 1e-6 * max_abs(samples(r)));
}

// --------------------------------------------------------------- fitting

TEST(Fit, LinearFitRecoversLine) {
    const auto [a, b] = linear_fit({0, 1, 2, 3}, {1, 3.5, 6, 8.5});
    EXPECT_NEAR(a, 2.5, 1e-14);
    EXPECT_NEAR(b, 1.0, 1e-14);
}

TEST(Fit, ExponentialGrowth) {
    std::vector<double> t, n;
    for (int i = 0; i <= 100; ++i) {
        t.push_back(0.1 * i);
        n.push_back(2.0 * std::exp(0.3 * t.back()));
    }
    const GrowthFit g = fit_growth(t, n, {1.1, 4.0});
    EXPECT_NEAR(g.lambda_hat, 0.3, 1e-12);
    EXPECT_NEAR(g.kappa_hat, 1.0, 1e-12);
    EXPECT_NEAR(g.efold_time, 1.0 / 0.3, 1e-3);
    EXPECT_FALSE(g.window_fallback);
    // ratio in [1.1, 4]: t in [ln 1.1 / 0.3, ln 4 / 0.3]
    std::size_t inside = 0;
    for (double x : t)
        if (x >= std::log(1.1) / 0.3 && x <= std::log(4.0) / 0.3) ++inside;
    EXPECT_EQ(g.window_points, inside);
    EXPECT_LT(g.fit_residual, 1e-12);
}

TEST(Fit, ShortWindowFallsBack) {
    const std::vector<double> t = {0, 1, 2, 3};
    const std::vector<double> n = {1, 1.01, 1.02, 5.0};
    const GrowthFit g = fit_growth(t, n, {1.1, 4.0});
    EXPECT_TRUE(g.window_fallback);
    EXPECT_EQ(g.window_points, 4u);
}

TEST(Fit, NoGrowthHasNoEfoldTime) {
    const GrowthFit g = fit_growth({0, 1, 2}, {1, 1, 1}, {});
    EXPECT_TRUE(std::isnan(g.efold_time));
    EXPECT_NEAR(g.lambda_hat, 0.0, 1e-15);
}

// --------------------------------------------------------------- studies

TEST(Studies, EnergyGrowthRateIsLinearInEpsilon) {
    StudySpec s;
    s.kind = StudyKind::energy_growth;
    s.base = bump_config("shallow_water", 0.1, 1.0, 5.0);
    s.base.N = 128;
    s.base.initial.width = 0.8;
    s.epsilons = {0.1, 0.2};
    const auto rep = energy_growth_study(s);
    ASSERT_EQ(rep.runs.size(), 2u);
    for (const auto& g : rep.runs) {
        EXPECT_EQ(g.outcome, RunOutcome::stopped);
        EXPECT_FALSE(g.window_fallback);
        EXPECT_GT(g.lambda_hat, 0.0);
    }
    EXPECT_NEAR(rep.runs[1].lambda_hat / rep.runs[0].lambda_hat, 2.0, 0.2);
    EXPECT_LT(rep.max_rate_excess, 1.5);
    EXPECT_LT(rep.efold_spread, 2.0);
}

TEST(Studies, TimescaleRowsCoverTheGrid) {
    StudySpec s;
    s.kind = StudyKind::timescale;
    s.base = bump_config("ddk", 0.1, 1.0, 1.0);
    s.base.initial.target_norm = 1.0;
    s.epsilons = {0.2, 0.4};
    s.mus = {0.1, 1.0};
    const auto rows = timescale_study(s);
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_EQ(rows[0].epsilon, 0.2);
    EXPECT_EQ(rows[1].mu, 1.0);
    for (const auto& r : rows) {
        EXPECT_TRUE(r.completed);
        EXPECT_NEAR(r.t_reached, s.t_target / r.epsilon, 1e-12);
        EXPECT_GE(r.max_ratio, r.final_ratio);
    }
}

TEST(Studies, CompareIdenticalModelsHasZeroError) {
    const RunConfig a = bump_config("ddk", 0.1, 0.1, 0.2);
    const auto rep = model_compare(a, a);
    for (double e : rep.error) EXPECT_EQ(e, 0.0);
    EXPECT_TRUE(std::isnan(rep.residual.front()));
    EXPECT_TRUE(std::isnan(rep.residual.back()));
    // only the centered difference error of an RK4 trajectory remains
    EXPECT_LT(rep.sup_residual, 1e-3);
    EXPECT_EQ(rep.c_hat, 0.0);
}

TEST(Studies, CompareResidualIsModelGap) {
    const RunConfig a = bump_config("ddk", 0.1, 0.1, 0.2);
    RunConfig b = a;
    b.model.preset = "shallow_water";
    const auto rep = model_compare(a, b);
    EXPECT_EQ(rep.e0, 0.0);
    EXPECT_GT(rep.sup_residual, 1e-3);
    EXPECT_TRUE(rep.bound_holds);
    for (std::size_t k = 0; k < rep.times.size(); ++k)
        EXPECT_LE(rep.error[k],
                  rep.c_hat * (rep.e0 + (rep.times[k] - rep.times.front()) * rep.sup_residual) * (1 + 1e-12));
}

TEST(Studies, CompareNeedsOneGrid) {
    RunConfig a = bump_config("ddk", 0.1, 0.1, 0.2), b = a;
    b.N = 32;
    EXPECT_THROW(model_compare(a, b), ConfigValidationError);
}

TEST(Studies, MuScalingIsFirstOrder) {
    StudySpec s;
    s.kind = StudyKind::mu_scaling;
    s.base = bump_config("ddk", 0.1, 1.0, 0.2);
    s.mus = {0.01, 0.04};
    const auto rep = mu_scaling_study(s);
    EXPECT_NEAR(rep.slope, 1.0, 0.15);
    for (std::size_t i = 0; i < 2; ++i) EXPECT_FALSE(rep.under_resolved[i]);
}

TEST(Studies, ConvergenceAgainstExactSolution) {
    StudySpec s;
    s.kind = StudyKind::convergence;
    s.base = RunConfig::defaults(1);
    s.base.model.preset = "ddk";
    s.base.epsilon = 0.0;
    s.base.t_end_over_eps = 1.0;
    s.base.initial.kind = InitialKind::cosine;
    s.base.initial.mode = 3;
    s.dts = {0.1, 0.05, 0.025};
    s.grid_sizes = {16, 32};
    const auto rep = convergence_study(s);
    EXPECT_TRUE(rep.exact_reference);
    for (std::size_t i = 1; i < rep.dts.size(); ++i)
        EXPECT_NEAR(rep.temporal_errors[i - 1] / rep.temporal_errors[i], 16.0, 3.2);
    // a single resolved mode: every grid gives the same answer
    EXPECT_LT(rep.spatial_errors.front(), 1e-12);
    EXPECT_LT(rep.spatial_errors.back(), 1e-14);
}

TEST(Studies, ConvergenceRejectsUnnestedLadders) {
    StudySpec s;
    s.kind = StudyKind::convergence;
    s.base = RunConfig::defaults(1);
    s.dts = {0.1, 0.03};
    s.grid_sizes = {16, 32};
    EXPECT_THROW(convergence_study(s), ConfigValidationError);
    s.dts = {0.1, 0.05};
    s.grid_sizes = {16, 24};
    EXPECT_THROW(convergence_study(s), ConfigValidationError);
}

TEST(Studies, InvalidCellIsAValidationError) {
    StudySpec s;
    s.kind = StudyKind::timescale;
    s.base = bump_config("ddk", 0.1, 1.0, 1.0);
    s.base.initial.amplitude = -3.0;
    s.epsilons = {1.0};
    s.mus = {1.0};
    try {
        timescale_study(s);
        FAIL() << "expected ConfigValidationError";
    } catch (const ConfigValidationError& e) {
        EXPECT_EQ(e.violations.at(0).field, "timescale.initial");
    }
}

// ---------------------------------------------------------------- output

TEST(StudyOutputs, IndependentOfThreadCount) {
    StudySpec s;
    s.kind = StudyKind::timescale;
    s.base = bump_config("ddk", 0.1, 1.0, 1.0);
    s.epsilons = {0.2, 0.4};
    s.mus = {0.1, 1.0};
    std::string one, many;
    {
        ThreadEnv env("1");
        one = run_study(s).table.to_string();
    }
    {
        ThreadEnv env("4");
        many = run_study(s).table.to_string();
    }
    EXPECT_EQ(one, many);
}

TEST(StudyOutputs, WritesCsvAndSummary) {
    StudySpec s;
    s.kind = StudyKind::mu_scaling;
    s.base = bump_config("ddk", 0.1, 1.0, 0.2);
    s.mus = {0.01, 0.04};
    const StudyOutput out = run_study(s);
    EXPECT_EQ(out.table.columns, (std::vector<std::string>{"mu", "error", "spatial_error", "under_resolved"}));
    EXPECT_EQ(out.table.rows.size(), 2u);
    EXPECT_FALSE(out.notes.empty());

    const auto dir = std::filesystem::temp_directory_path() / "whitham_study_output";
    std::filesystem::remove_all(dir);
    write_study_output(dir.string(), out);
    EXPECT_EQ(read_file((dir / "study.csv").string()), out.table.to_string());
    const auto j = nlohmann::json::parse(read_file((dir / "summary.json").string()));
    EXPECT_EQ(j["study"], "mu_scaling");
    EXPECT_NEAR(j["summary"]["slope"].get<double>(), out.summary[0].second, 1e-15);
    std::filesystem::remove_all(dir);
}
